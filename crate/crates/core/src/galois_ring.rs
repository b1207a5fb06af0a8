//! Galois rings `GR(p^a, m) = Z_{p^a}[u] / (f(u))`.
//!
//! Elements are stored as `m` residues modulo `p^a` in the basis `1, u, ..., u^{m-1}`.
//! The ring context owns the modulus and the Teichmüller set
//! `T = {0, 1, xi, ..., xi^{p^m - 2}}`, which gives every element a unique
//! base-`p` expansion `r = t_0 + p t_1 + ... + p^{a-1} t_{a-1}` with digits in `T`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

type Coeffs = SmallVec<[u64; 4]>;

/// Largest characteristic `p^a` accepted; keeps every product of two residues inside a `u64`.
const MAX_CHARACTERISTIC: u64 = 1 << 31;
/// Largest residue field handled; the Teichmüller table and discrete logs are dense arrays.
const MAX_RESIDUE_FIELD: u64 = 1 << 20;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GrElement(Coeffs);

impl GrElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "[")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for GrElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for GrElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u64>::deserialize(deserializer)?;
        Ok(GrElement(v.into_iter().collect()))
    }
}

/// Base-`p` expansion of an element with Teichmüller digits.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TeichDigits {
    pub digits: Vec<GrElement>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum UnitKind {
    Type0,
    Type1,
}

/// Decomposition `lambda = xi_0 + p xi_1 + p^2 z` of a unit.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct UnitProfile {
    pub kind: UnitKind,
    pub xi0: GrElement,
    pub xi1: GrElement,
    /// `(lambda - xi_0 - p xi_1) / p^2` with coefficients in `[0, p^{a-2})`; zero when `a <= 2`.
    pub z: GrElement,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Neg,
    Mul,
}

/// Immutable description of `GR(p^a, m)`.
#[derive(Clone, Debug)]
pub struct GaloisRing {
    p: u64,
    a: u32,
    m: usize,
    q: u64,
    modulus: Vec<u64>,
    teich: Vec<GrElement>,
    // residue code -> index into `teich`
    lift_table: Vec<u32>,
    residue_size: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over Z_p, constant term first.
fn poly_rem_mod_p(num: &[u64], den: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = num.iter().map(|c| c % p).collect();
    let dl = den.len() - 1;
    let lead_inv = modpow(den[dl] % p, p - 2, p);
    while r.len() > dl {
        let top = *r.last().unwrap();
        if top != 0 {
            let factor = top * lead_inv % p;
            let shift = r.len() - 1 - dl;
            for (k, &d) in den.iter().enumerate() {
                r[shift + k] = (r[shift + k] + p - factor * d % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn modpow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn digits_base(mut code: u64, base: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % base);
        code /= base;
    }
    out
}

/// Irreducibility over `F_p` by trial division with every monic polynomial of degree `<= deg/2`.
pub fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d as u32) {
            let mut g = digits_base(code, p, d);
            g.push(1);
            if poly_rem_mod_p(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl GaloisRing {
    /// Builds `GR(p^a, m)`. Without a modulus, the lowest monic irreducible polynomial over `F_p`
    /// (coefficients compared from the top degree down) is lifted unchanged to `Z_{p^a}`.
    pub fn new(p: u64, a: u32, m: usize, modulus: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if a == 0 || m == 0 {
            return Err(Error::InvalidParameters("a and m must be at least 1".into()));
        }
        let q = p
            .checked_pow(a)
            .filter(|&q| q <= MAX_CHARACTERISTIC)
            .ok_or_else(|| Error::InvalidParameters(format!("p^a = {p}^{a} is too large")))?;
        let residue_size = p
            .checked_pow(m as u32)
            .filter(|&r| r <= MAX_RESIDUE_FIELD)
            .ok_or_else(|| Error::InvalidParameters(format!("p^m = {p}^{m} is too large")))?;

        let modulus = match modulus {
            Some(f) => {
                if f.len() != m + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients for degree {m}, got {}",
                        m + 1,
                        f.len()
                    )));
                }
                let f: Vec<u64> = f.iter().map(|c| c % q).collect();
                if f[m] != 1 {
                    return Err(Error::InvalidModulus("polynomial is not monic".into()));
                }
                if !is_irreducible_mod_p(&f, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                f
            }
            None => (0..residue_size)
                .map(|code| {
                    let mut f = digits_base(code, p, m);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible_mod_p(f, p))
                .expect("an irreducible polynomial of every degree exists"),
        };

        let mut ring = GaloisRing {
            p,
            a,
            m,
            q,
            modulus,
            teich: Vec::new(),
            lift_table: Vec::new(),
            residue_size,
        };
        ring.build_teichmuller();
        Ok(ring)
    }

    fn build_teichmuller(&mut self) {
        let size = self.residue_size;
        let lifts: Vec<GrElement> = (0..size)
            .map(|code| {
                let x = GrElement(digits_base(code, self.p, self.m).into_iter().collect());
                self.teichmuller_lift_iterative(&x)
            })
            .collect();

        let order = size - 1;
        let factors = prime_factors(order);
        let one = self.one();
        let xi = (1..size)
            .map(|code| &lifts[code as usize])
            .find(|t| factors.iter().all(|&l| self.pow(t, order / l) != one))
            .expect("the residue field has a primitive element")
            .clone();

        let mut teich = Vec::with_capacity(size as usize);
        teich.push(self.zero());
        let mut power = one;
        for _ in 0..order {
            teich.push(power.clone());
            power = self.mul(&power, &xi);
        }
        let mut lift_table = vec![0u32; size as usize];
        for (idx, t) in teich.iter().enumerate() {
            let code = self.residue_code(t);
            debug_assert_eq!(&lifts[code], t);
            lift_table[code] = idx as u32;
        }
        self.teich = teich;
        self.lift_table = lift_table;
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The characteristic `p^a`.
    pub fn characteristic(&self) -> u64 {
        self.q
    }

    /// Size of the residue field, `p^m`.
    pub fn residue_size(&self) -> u64 {
        self.residue_size
    }

    /// `|GR(p^a, m)| = p^{am}`, as an exponent of `p`.
    pub fn order_exponent(&self) -> u64 {
        self.a as u64 * self.m as u64
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Teichmüller set in power order: `0, 1, xi, xi^2, ...`.
    pub fn teich(&self) -> &[GrElement] {
        &self.teich
    }

    pub fn xi(&self) -> &GrElement {
        if self.teich.len() > 2 {
            &self.teich[2]
        } else {
            &self.teich[1]
        }
    }

    pub fn zero(&self) -> GrElement {
        GrElement(SmallVec::from_elem(0, self.m))
    }

    pub fn one(&self) -> GrElement {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> GrElement {
        let mut c = self.zero();
        c.0[0] = v.rem_euclid(self.q as i64) as u64;
        c
    }

    /// Element from coefficients in the `u`-basis (constant first), reduced modulo `p^a`.
    pub fn element(&self, coeffs: &[i64]) -> Result<GrElement> {
        if coeffs.len() != self.m {
            return Err(Error::ContextMismatch(format!(
                "expected {} coefficients, got {}",
                self.m,
                coeffs.len()
            )));
        }
        Ok(GrElement(
            coeffs.iter().map(|&c| c.rem_euclid(self.q as i64) as u64).collect(),
        ))
    }

    pub fn check(&self, x: &GrElement) -> Result<()> {
        if x.0.len() != self.m || x.0.iter().any(|&c| c >= self.q) {
            return Err(Error::ContextMismatch(format!(
                "{x} is not a canonical element of GR({}^{}, {})",
                self.p, self.a, self.m
            )));
        }
        Ok(())
    }

    /// Number of elements, `p^{am}` (fits in `u64` for every ring small enough to enumerate).
    pub fn order(&self) -> Option<u64> {
        self.q.checked_pow(self.m as u32)
    }

    pub fn element_from_index(&self, mut idx: u64) -> GrElement {
        let mut c = self.zero();
        for k in 0..self.m {
            c.0[k] = idx % self.q;
            idx /= self.q;
        }
        c
    }

    pub fn elements(&self) -> impl Iterator<Item = GrElement> + '_ {
        let total = self.order().expect("ring too large to enumerate");
        (0..total).map(move |idx| self.element_from_index(idx))
    }

    pub fn units(&self) -> impl Iterator<Item = GrElement> + '_ {
        self.elements().filter(move |x| self.is_unit(x))
    }

    pub fn add(&self, x: &GrElement, y: &GrElement) -> GrElement {
        let q = self.q;
        GrElement(x.0.iter().zip(&y.0).map(|(&a, &b)| (a + b) % q).collect())
    }

    pub fn sub(&self, x: &GrElement, y: &GrElement) -> GrElement {
        let q = self.q;
        GrElement(x.0.iter().zip(&y.0).map(|(&a, &b)| (a + q - b) % q).collect())
    }

    pub fn neg(&self, x: &GrElement) -> GrElement {
        let q = self.q;
        GrElement(x.0.iter().map(|&a| (q - a) % q).collect())
    }

    pub fn add_assign(&self, x: &mut GrElement, y: &GrElement) {
        for (a, &b) in x.0.iter_mut().zip(&y.0) {
            *a = (*a + b) % self.q;
        }
    }

    pub fn scale_int(&self, x: &GrElement, k: u64) -> GrElement {
        let k = k % self.q;
        GrElement(x.0.iter().map(|&a| a * k % self.q).collect())
    }

    pub fn mul(&self, x: &GrElement, y: &GrElement) -> GrElement {
        let q = self.q;
        let m = self.m;
        if m == 1 {
            return GrElement(smallvec::smallvec![x.0[0] * y.0[0] % q]);
        }
        let mut prod: SmallVec<[u64; 8]> = SmallVec::from_elem(0, 2 * m - 1);
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % q;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            for j in 0..m {
                let t = top * self.modulus[j] % q;
                prod[k - m + j] = (prod[k - m + j] + q - t) % q;
            }
        }
        GrElement(prod[..m].iter().copied().collect())
    }

    pub fn pow(&self, x: &GrElement, mut exp: u64) -> GrElement {
        let mut acc = self.one();
        let mut base = x.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `x^{p^k}` without forming `p^k`.
    pub fn pow_p_power(&self, x: &GrElement, k: u32) -> GrElement {
        (0..k).fold(x.clone(), |y, _| self.pow(&y, self.p))
    }

    /// Checked arithmetic entry point; `y` is ignored for `Neg`.
    pub fn arith(&self, op: ArithOp, x: &GrElement, y: &GrElement) -> Result<GrElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(match op {
            ArithOp::Add => self.add(x, y),
            ArithOp::Sub => self.sub(x, y),
            ArithOp::Neg => self.neg(x),
            ArithOp::Mul => self.mul(x, y),
        })
    }

    /// Index of `x mod p` in `[0, p^m)`, constant coefficient least significant.
    pub fn residue_code(&self, x: &GrElement) -> usize {
        x.0.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c % self.p) as usize
    }

    pub fn is_unit(&self, x: &GrElement) -> bool {
        x.0.iter().any(|&c| c % self.p != 0)
    }

    /// Largest `v <= a` with `x in p^v GR`.
    pub fn p_valuation(&self, x: &GrElement) -> u32 {
        x.0.iter()
            .filter(|&&c| c != 0)
            .map(|&c| {
                let mut v = 0;
                let mut c = c;
                while c % self.p == 0 {
                    c /= self.p;
                    v += 1;
                }
                v
            })
            .min()
            .unwrap_or(self.a)
    }

    /// Exact division by `p^v`; quotient coefficients lie in `[0, p^{a-v})`.
    pub fn div_p_pow(&self, x: &GrElement, v: u32) -> Option<GrElement> {
        let d = self.p.pow(v);
        if x.0.iter().any(|&c| c % d != 0) {
            return None;
        }
        Some(GrElement(x.0.iter().map(|&c| c / d).collect()))
    }

    pub fn mul_p_pow(&self, x: &GrElement, v: u32) -> GrElement {
        if v >= self.a {
            return self.zero();
        }
        self.scale_int(x, self.p.pow(v))
    }

    /// Inverse of a unit: residue inverse `x^{p^m - 2}`, then `y <- y (2 - x y)` until exact.
    pub fn inv(&self, x: &GrElement) -> Result<GrElement> {
        if !self.is_unit(x) {
            return Err(Error::NotUnit);
        }
        let mut y = self.pow(x, self.residue_size - 2 + if self.residue_size == 2 { 1 } else { 0 });
        let two = self.from_int(2);
        let steps = u32::BITS - (self.a - 1).leading_zeros();
        for _ in 0..steps {
            y = self.mul(&y, &self.sub(&two, &self.mul(x, &y)));
        }
        debug_assert_eq!(self.mul(x, &y), self.one());
        Ok(y)
    }

    /// The contract form of the Teichmüller lift: iterate `y <- y^{p^m}` until fixed.
    pub fn teichmuller_lift_iterative(&self, x: &GrElement) -> GrElement {
        let mut y = x.clone();
        for _ in 0..=self.a {
            let next = self.pow(&y, self.residue_size);
            if next == y {
                break;
            }
            y = next;
        }
        y
    }

    /// Unique `t` in the Teichmüller set with `t = x (mod p)`.
    pub fn teichmuller_lift(&self, x: &GrElement) -> GrElement {
        self.teich[self.lift_table[self.residue_code(x)] as usize].clone()
    }

    pub fn is_teichmuller(&self, x: &GrElement) -> bool {
        self.teichmuller_lift(x) == *x
    }

    pub fn teich_digits(&self, x: &GrElement) -> TeichDigits {
        let mut digits = Vec::with_capacity(self.a as usize);
        let mut rest = x.clone();
        for _ in 0..self.a {
            let d = self.teichmuller_lift(&rest);
            let diff = self.sub(&rest, &d);
            rest = self.div_p_pow(&diff, 1).expect("x - lift(x) is divisible by p");
            digits.push(d);
        }
        TeichDigits { digits }
    }

    pub fn from_digits(&self, digits: &TeichDigits) -> GrElement {
        digits
            .digits
            .iter()
            .enumerate()
            .fold(self.zero(), |acc, (k, d)| self.add(&acc, &self.mul_p_pow(d, k as u32)))
    }

    pub fn classify_unit(&self, lambda: &GrElement) -> Result<UnitProfile> {
        if !self.is_unit(lambda) {
            return Err(Error::NotUnit);
        }
        let digits = self.teich_digits(lambda).digits;
        let xi0 = digits[0].clone();
        let xi1 = if self.a >= 2 { digits[1].clone() } else { self.zero() };
        let z = if self.a >= 3 {
            let rest = self.sub(&self.sub(lambda, &xi0), &self.mul_p_pow(&xi1, 1));
            self.div_p_pow(&rest, 2).expect("lambda - xi0 - p xi1 is divisible by p^2")
        } else {
            self.zero()
        };
        let kind = if xi1.is_zero() { UnitKind::Type0 } else { UnitKind::Type1 };
        Ok(UnitProfile { kind, xi0, xi1, z })
    }

    /// Smallest positive `a0` with `2^{a0} >= a`.
    fn doubling_depth(&self) -> u32 {
        let mut a0 = 1;
        while (1u64 << a0) < self.a as u64 {
            a0 += 1;
        }
        a0
    }

    // (1 - y) * prod_{j = first..a0-1} (1 + y^{2^j})
    fn truncated_inverse_series(&self, y: &GrElement, first: u32) -> GrElement {
        let one = self.one();
        let mut acc = self.sub(&one, y);
        let mut y_pow = y.clone();
        for j in 0..self.doubling_depth() {
            if j >= first {
                acc = self.mul(&acc, &self.add(&one, &y_pow));
            }
            y_pow = self.mul(&y_pow, &y_pow);
        }
        acc
    }

    fn type1_inverse_with_start(&self, lambda: &GrElement, first: u32) -> Result<GrElement> {
        let profile = self.classify_unit(lambda)?;
        if profile.kind != UnitKind::Type1 {
            return Err(Error::NotType1);
        }
        let xi0_inv = self.inv(&profile.xi0)?;
        let w = self.add(
            &self.mul(&xi0_inv, &profile.xi1),
            &self.mul_p_pow(&self.mul(&xi0_inv, &profile.z), 1),
        );
        let y = self.mul_p_pow(&w, 1);
        Ok(self.mul(&xi0_inv, &self.truncated_inverse_series(&y, first)))
    }

    /// Closed-form inverse of a Type (1) unit with the product taken over `j >= 1`.
    /// The result is checked against `lambda * result = 1` and re-classified as Type (1).
    pub fn type1_inverse_formula(&self, lambda: &GrElement) -> Result<GrElement> {
        let inv = self.type1_inverse_with_start(lambda, 1)?;
        if self.mul(lambda, &inv) != self.one() {
            return Err(Error::LemmaViolation(format!("type (1) inverse of {lambda} is wrong")));
        }
        if self.classify_unit(&inv)?.kind != UnitKind::Type1 {
            return Err(Error::LemmaViolation(format!("inverse of {lambda} is not Type (1)")));
        }
        Ok(inv)
    }

    /// The same expression with the product starting at `j = 0`; it collapses to `xi_0^{-1}`.
    pub fn type1_inverse_printed(&self, lambda: &GrElement) -> Result<GrElement> {
        self.type1_inverse_with_start(lambda, 0)
    }

    fn type0_inverse_with_start(&self, lambda: &GrElement, first: u32) -> Result<GrElement> {
        let profile = self.classify_unit(lambda)?;
        if profile.kind != UnitKind::Type0 {
            return Err(Error::NotType0);
        }
        // lambda = xi_0 (1 + p^2 xi_0^{-1} z)
        let xi0_inv = self.inv(&profile.xi0)?;
        let y = self.mul_p_pow(&self.mul(&xi0_inv, &profile.z), 2);
        Ok(self.mul(&xi0_inv, &self.truncated_inverse_series(&y, first)))
    }

    pub fn type0_inverse_formula(&self, lambda: &GrElement) -> Result<GrElement> {
        let inv = self.type0_inverse_with_start(lambda, 1)?;
        if self.mul(lambda, &inv) != self.one() {
            return Err(Error::LemmaViolation(format!("type (0) inverse of {lambda} is wrong")));
        }
        if self.classify_unit(&inv)?.kind != UnitKind::Type0 {
            return Err(Error::LemmaViolation(format!("inverse of {lambda} is not Type (0)")));
        }
        Ok(inv)
    }

    pub fn type0_inverse_printed(&self, lambda: &GrElement) -> Result<GrElement> {
        self.type0_inverse_with_start(lambda, 0)
    }

    /// `k` in `[0, p^m - 1)` with `xi^k = t`.
    pub fn dlog_teich(&self, t: &GrElement) -> Result<u64> {
        if t.is_zero() || !self.is_teichmuller(t) {
            return Err(Error::NotTeichmuller);
        }
        Ok(self.lift_table[self.residue_code(t)] as u64 - 1)
    }

    /// Square test through the leading Teichmüller digit. For `p = 2` every `xi_0` is a square.
    pub fn is_square_unit(&self, lambda: &GrElement) -> Result<bool> {
        if !self.is_unit(lambda) {
            return Err(Error::NotUnit);
        }
        if self.p == 2 {
            return Ok(true);
        }
        Ok(self.dlog_teich(&self.teichmuller_lift(lambda))? % 2 == 0)
    }

    /// The Teichmüller element `alpha` with `alpha^{p^s} = xi_0`.
    pub fn solve_alpha(&self, xi0: &GrElement, s: u32) -> Result<GrElement> {
        let k = self.dlog_teich(xi0)?;
        let order = self.residue_size - 1;
        if order == 1 {
            return Ok(self.one());
        }
        let e = modpow(self.p, s as u64, order) as i64;
        let gcd = (e).extended_gcd(&(order as i64));
        debug_assert_eq!(gcd.gcd, 1);
        let e_inv = gcd.x.rem_euclid(order as i64) as u64;
        let t = (k as u128 * e_inv as u128 % order as u128) as usize;
        let alpha = self.teich[t + 1].clone();
        debug_assert_eq!(&self.pow_p_power(&alpha, s), xi0);
        Ok(alpha)
    }

    /// The residue field `F_{p^m}`, realised as `GR(p, m)` with the reduced modulus.
    pub fn residue_field(&self) -> GaloisRing {
        let f: Vec<u64> = self.modulus.iter().map(|c| c % self.p).collect();
        GaloisRing::new(self.p, 1, self.m, Some(&f)).expect("reduced modulus stays irreducible")
    }

    /// Image of `x` in the residue field built by [`Self::residue_field`].
    pub fn reduce_mod_p(&self, x: &GrElement) -> GrElement {
        GrElement(x.0.iter().map(|c| c % self.p).collect())
    }

    /// Parses a constant-first coefficient list, accepting a single integer when `m = 1`.
    pub fn parse_element(&self, text: &str) -> Result<GrElement> {
        let parsed: std::result::Result<Vec<i64>, _> = text
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect();
        let coeffs = parsed.map_err(|e| Error::ContextMismatch(format!("cannot parse {text:?}: {e}")))?;
        let mut coeffs = coeffs;
        if coeffs.len() < self.m {
            coeffs.resize(self.m, 0);
        }
        self.element(&coeffs)
    }
}
