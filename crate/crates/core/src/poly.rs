//! Dense polynomials over a Galois ring, constant term first.

use crate::galois_ring::{GaloisRing, GrElement};

pub type Poly = Vec<GrElement>;

pub fn trim(ring: &GaloisRing, mut f: Poly) -> Poly {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    let _ = ring;
    f
}

pub fn add(ring: &GaloisRing, f: &[GrElement], g: &[GrElement]) -> Poly {
    let len = f.len().max(g.len());
    let zero = ring.zero();
    (0..len)
        .map(|k| ring.add(f.get(k).unwrap_or(&zero), g.get(k).unwrap_or(&zero)))
        .collect()
}

pub fn sub(ring: &GaloisRing, f: &[GrElement], g: &[GrElement]) -> Poly {
    let len = f.len().max(g.len());
    let zero = ring.zero();
    (0..len)
        .map(|k| ring.sub(f.get(k).unwrap_or(&zero), g.get(k).unwrap_or(&zero)))
        .collect()
}

pub fn mul(ring: &GaloisRing, f: &[GrElement], g: &[GrElement]) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ring.zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            if !b.is_zero() {
                let t = ring.mul(a, b);
                ring.add_assign(&mut out[i + j], &t);
            }
        }
    }
    out
}

pub fn pow(ring: &GaloisRing, f: &[GrElement], mut exp: u64) -> Poly {
    let mut acc = vec![ring.one()];
    let mut base = f.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = trim(ring, mul(ring, &acc, &base));
        }
        exp >>= 1;
        if exp > 0 {
            base = trim(ring, mul(ring, &base, &base));
        }
    }
    acc
}

/// Quotient and remainder by a monic divisor.
pub fn divmod_monic(ring: &GaloisRing, num: &[GrElement], den: &[GrElement]) -> (Poly, Poly) {
    let dl = den.len() - 1;
    debug_assert_eq!(den[dl], ring.one());
    let mut rem = num.to_vec();
    if rem.len() <= dl {
        return (Vec::new(), rem);
    }
    let mut quot = vec![ring.zero(); rem.len() - dl];
    for k in (dl..rem.len()).rev() {
        let top = rem[k].clone();
        if top.is_zero() {
            continue;
        }
        quot[k - dl] = top.clone();
        for (j, d) in den.iter().enumerate() {
            let t = ring.mul(&top, d);
            rem[k - dl + j] = ring.sub(&rem[k - dl + j], &t);
        }
    }
    rem.truncate(dl);
    (quot, rem)
}

pub fn monomial(ring: &GaloisRing, coeff: GrElement, degree: usize) -> Poly {
    let mut f = vec![ring.zero(); degree + 1];
    f[degree] = coeff;
    f
}

pub fn is_zero(f: &[GrElement]) -> bool {
    f.iter().all(|c| c.is_zero())
}

/// Human-readable form such as `x^2 + 2x + 2`; coefficients use the element display.
pub fn render(ring: &GaloisRing, f: &[GrElement]) -> String {
    let one = ring.one();
    let mut terms = Vec::new();
    for (k, c) in f.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coeff = if *c == one && k > 0 { String::new() } else { c.to_string() };
        terms.push(match k {
            0 => coeff,
            1 => format!("{coeff}x"),
            _ => format!("{coeff}x^{k}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
