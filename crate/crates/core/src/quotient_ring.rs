//! The quotient ring `R = GR(p^a, m)[x] / (x^n - lambda)` with `n = 4 p^s`.
//!
//! In chain mode (Type (1), non-square `lambda`, residue quartic irreducible) `R` is a chain
//! ring with maximal ideal `<g>`, `g = x^4 - alpha`, and every ideal is a power of `g`.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois_ring::{GaloisRing, GrElement, UnitKind, UnitProfile};
use crate::poly::{self, Poly};

/// Largest code length handled; keeps schoolbook products and enumeration tables small.
const MAX_LENGTH: u64 = 1 << 12;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QrElement {
    coeffs: Vec<GrElement>,
}

impl QrElement {
    pub fn coeffs(&self) -> &[GrElement] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn into_coeffs(self) -> Vec<GrElement> {
        self.coeffs
    }
}

impl Serialize for QrElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Shape<'a> {
            n: usize,
            coeffs: &'a [GrElement],
        }
        Shape { n: self.coeffs.len(), coeffs: &self.coeffs }.serialize(serializer)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Chain,
    Generic,
}

/// Evidence that `x^4 - alpha` splits over the residue field.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GuardWitness {
    pub p: u64,
    pub m: usize,
    pub quartic: Vec<GrElement>,
    pub factors: Vec<Vec<GrElement>>,
    pub factorization: String,
}

impl fmt::Display for GuardWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "residue quartic x^4 - alpha is reducible over the field with {} elements: {}; \
             the quotient ring is not local",
            self.p.pow(self.m as u32),
            self.factorization
        )
    }
}

/// Searches for a root or a monic quadratic factor of `x^4 - alpha` over the residue field.
/// Returns `None` when the quartic is irreducible.
pub fn locality_guard(ring: &GaloisRing, alpha: &GrElement) -> Option<GuardWitness> {
    let field = ring.residue_field();
    let alpha_bar = ring.reduce_mod_p(alpha);
    let mut quartic = vec![field.neg(&alpha_bar), field.zero(), field.zero(), field.zero()];
    quartic.push(field.one());
    let size = field.residue_size();

    let split = |factor: Poly| -> Option<Vec<Poly>> {
        let (q, r) = poly::divmod_monic(&field, &quartic, &factor);
        poly::is_zero(&r).then(|| vec![factor, q])
    };

    let mut found = None;
    for code in 0..size {
        let r = field.element_from_index(code);
        if let Some(f) = split(vec![field.neg(&r), field.one()]) {
            found = Some(f);
            break;
        }
    }
    if found.is_none() {
        'outer: for c1 in 0..size {
            for c0 in 0..size {
                let quad = vec![field.element_from_index(c0), field.element_from_index(c1), field.one()];
                if let Some(f) = split(quad) {
                    found = Some(f);
                    break 'outer;
                }
            }
        }
    }
    let factors = found?;
    let factorization = format!(
        "{} = {}",
        poly::render(&field, &quartic),
        factors
            .iter()
            .map(|f| format!("({})", poly::render(&field, f)))
            .collect::<String>()
    );
    Some(GuardWitness { p: ring.p(), m: ring.m(), quartic, factors, factorization })
}

#[derive(Clone, Debug)]
struct ChainData {
    alpha: GrElement,
    // g^k for k = 0..=nilpotency
    g_powers: Vec<QrElement>,
    w: QrElement,
    w_inv: QrElement,
    // g^{p^s - 1} w^{-1}, so that p = g * p_over_g
    p_over_g: QrElement,
    nilpotency: usize,
}

/// Base-`g` expansion with digits of degree `<= 3` and Teichmüller coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DigitExpansion {
    pub digits: Vec<Vec<GrElement>>,
}

impl DigitExpansion {
    /// Index of the first nonzero digit, or the number of digits for zero.
    pub fn leading_index(&self) -> usize {
        self.digits
            .iter()
            .position(|d| !poly::is_zero(d))
            .unwrap_or(self.digits.len())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ExpansionWitness {
    /// `(x^4 + b)^{p^n} = x^{4p^n} + b^{p^n} + p (x^4 + b) theta`
    Odd { theta: Vec<GrElement> },
    /// `(x^4 + b)^{2^n} = x^{2^{n+2}} + b^{2^n} + 2 alpha_n`, `alpha_n = (b x^4)^{2^{n-1}} + 2 beta_n`
    Even { alpha_n: Vec<GrElement>, beta_n: Vec<GrElement> },
}

#[derive(Clone, Debug)]
pub struct QuotientCtx {
    ring: Arc<GaloisRing>,
    s: Option<u32>,
    n: usize,
    lambda: GrElement,
    profile: UnitProfile,
    chain: Option<ChainData>,
    guard_failure: Option<GuardWitness>,
}

fn length_for(p: u64, s: u32) -> Result<usize> {
    p.checked_pow(s)
        .and_then(|ps| ps.checked_mul(4))
        .filter(|&n| n <= MAX_LENGTH)
        .map(|n| n as usize)
        .ok_or_else(|| Error::InvalidParameters(format!("length 4*{p}^{s} is too large")))
}

impl QuotientCtx {
    /// Builds `R_p(a, m, lambda)` of length `4p^s`. Chain mode validates the Type (1)
    /// non-square hypotheses and the locality guard; `force` lets a guard failure through.
    pub fn new(ring: Arc<GaloisRing>, lambda: GrElement, s: u32, mode: Mode, force: bool) -> Result<Self> {
        ring.check(&lambda)?;
        let profile = ring.classify_unit(&lambda)?;
        let n = length_for(ring.p(), s)?;
        let mut ctx = QuotientCtx {
            ring,
            s: Some(s),
            n,
            lambda,
            profile,
            chain: None,
            guard_failure: None,
        };
        if mode == Mode::Chain {
            ctx.setup_chain(force)?;
        }
        Ok(ctx)
    }

    /// Generic quotient `GR[x] / (x^n - lambda)` of arbitrary length, with no chain structure.
    pub fn with_length(ring: Arc<GaloisRing>, lambda: GrElement, n: usize) -> Result<Self> {
        ring.check(&lambda)?;
        if n == 0 || n as u64 > MAX_LENGTH {
            return Err(Error::InvalidParameters(format!("length {n} out of range")));
        }
        let profile = ring.classify_unit(&lambda)?;
        Ok(QuotientCtx { ring, s: None, n, lambda, profile, chain: None, guard_failure: None })
    }

    fn setup_chain(&mut self, force: bool) -> Result<()> {
        let ring = self.ring.clone();
        let s = self.s.expect("chain mode has an exponent");
        if ring.a() < 2 {
            return Err(Error::CharacteristicTooSmall(ring.a()));
        }
        if self.profile.kind != UnitKind::Type1 {
            return Err(Error::NotType1);
        }
        if ring.is_square_unit(&self.lambda)? {
            return Err(Error::SquareLambda);
        }
        let alpha = ring.solve_alpha(&self.profile.xi0, s)?;
        if let Some(witness) = locality_guard(&ring, &alpha) {
            if !force {
                return Err(Error::GuardFailure(witness));
            }
            self.guard_failure = Some(witness);
        }

        let ps = ring.p().pow(s);
        let nilpotency = ring.a() as usize * ps as usize;
        let mut g_poly = vec![ring.neg(&alpha), ring.zero(), ring.zero(), ring.zero()];
        g_poly.push(ring.one());
        let g = self.reduce_poly(&g_poly);

        let mut g_powers = Vec::with_capacity(nilpotency + 1);
        g_powers.push(self.one());
        for k in 1..=nilpotency {
            let next = self.mul(&g_powers[k - 1], &g);
            g_powers.push(next);
        }
        if !g_powers[nilpotency].is_zero() || g_powers[nilpotency - 1].is_zero() {
            return Err(Error::LemmaViolation(format!(
                "x^4 - alpha does not have nilpotency index {nilpotency}"
            )));
        }

        let g_ps = &g_powers[ps as usize];
        let w_coeffs: Option<Vec<GrElement>> = g_ps.coeffs.iter().map(|c| ring.div_p_pow(c, 1)).collect();
        let w = QrElement {
            coeffs: w_coeffs.ok_or_else(|| {
                Error::LemmaViolation("(x^4 - alpha)^{p^s} is not divisible by p".into())
            })?,
        };
        let seed = self.constant(ring.inv(&self.profile.xi1)?);
        let w_inv = self.invert_with_seed(&w, &seed, nilpotency)?;
        let p_over_g = self.mul(&g_powers[ps as usize - 1], &w_inv);
        if self.mul(&p_over_g, &g) != self.constant(ring.from_int(ring.p() as i64)) {
            return Err(Error::LemmaViolation("p != g * g^{p^s - 1} w^{-1}".into()));
        }

        self.chain = Some(ChainData { alpha, g_powers, w, w_inv, p_over_g, nilpotency });
        Ok(())
    }

    fn chain(&self) -> Result<&ChainData> {
        self.chain.as_ref().ok_or(Error::NotChainMode)
    }

    pub fn ring(&self) -> &Arc<GaloisRing> {
        &self.ring
    }

    pub fn s(&self) -> Option<u32> {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &GrElement {
        &self.lambda
    }

    pub fn profile(&self) -> &UnitProfile {
        &self.profile
    }

    pub fn is_chain(&self) -> bool {
        self.chain.is_some()
    }

    /// Set when chain mode was forced past a failing locality guard.
    pub fn guard_failure(&self) -> Option<&GuardWitness> {
        self.guard_failure.as_ref()
    }

    pub fn alpha(&self) -> Result<&GrElement> {
        Ok(&self.chain()?.alpha)
    }

    /// `x^4 - alpha`.
    pub fn g(&self) -> Result<&QrElement> {
        Ok(&self.chain()?.g_powers[1])
    }

    /// `(x^4 - alpha)^k` for `k <= a p^s`.
    pub fn g_pow(&self, k: usize) -> Result<&QrElement> {
        let chain = self.chain()?;
        chain
            .g_powers
            .get(k)
            .ok_or(Error::ExponentOutOfRange { i: k, max: chain.nilpotency })
    }

    /// The unit `w` with `(x^4 - alpha)^{p^s} = p w`, coefficients in `[0, p^{a-1})`.
    pub fn w(&self) -> Result<&QrElement> {
        Ok(&self.chain()?.w)
    }

    pub fn w_inv(&self) -> Result<&QrElement> {
        Ok(&self.chain()?.w_inv)
    }

    /// `a p^s`, the nilpotency index of `x^4 - alpha`.
    pub fn nilpotency_index(&self) -> Result<usize> {
        Ok(self.chain()?.nilpotency)
    }

    /// `|R| = p^{amn}` as an exponent of `p`.
    pub fn order_exponent(&self) -> u64 {
        self.ring.order_exponent() * self.n as u64
    }

    pub fn zero(&self) -> QrElement {
        QrElement { coeffs: vec![self.ring.zero(); self.n] }
    }

    pub fn one(&self) -> QrElement {
        self.constant(self.ring.one())
    }

    pub fn constant(&self, c: GrElement) -> QrElement {
        let mut f = self.zero();
        f.coeffs[0] = c;
        f
    }

    pub fn x_pow(&self, k: usize) -> QrElement {
        self.shift(&self.one(), k)
    }

    pub fn from_coeffs(&self, coeffs: Vec<GrElement>) -> Result<QrElement> {
        if coeffs.len() != self.n {
            return Err(Error::ContextMismatch(format!(
                "expected {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        for c in &coeffs {
            self.ring.check(c)?;
        }
        Ok(QrElement { coeffs })
    }

    pub fn check(&self, f: &QrElement) -> Result<()> {
        if f.coeffs.len() != self.n {
            return Err(Error::ContextMismatch(format!(
                "element of length {} used in a context of length {}",
                f.coeffs.len(),
                self.n
            )));
        }
        f.coeffs.iter().try_for_each(|c| self.ring.check(c))
    }

    /// Image of a polynomial of any degree, folding `x^{n+k}` to `lambda x^k`.
    pub fn reduce_poly(&self, f: &[GrElement]) -> QrElement {
        let mut out = self.zero();
        for (k, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut c = c.clone();
            for _ in 0..k / self.n {
                c = self.ring.mul(&c, &self.lambda);
            }
            self.ring.add_assign(&mut out.coeffs[k % self.n], &c);
        }
        out
    }

    pub fn add(&self, f: &QrElement, g: &QrElement) -> QrElement {
        QrElement { coeffs: poly::add(&self.ring, &f.coeffs, &g.coeffs) }
    }

    pub fn sub(&self, f: &QrElement, g: &QrElement) -> QrElement {
        QrElement { coeffs: poly::sub(&self.ring, &f.coeffs, &g.coeffs) }
    }

    pub fn neg(&self, f: &QrElement) -> QrElement {
        QrElement { coeffs: f.coeffs.iter().map(|c| self.ring.neg(c)).collect() }
    }

    pub fn scale(&self, f: &QrElement, c: &GrElement) -> QrElement {
        QrElement { coeffs: f.coeffs.iter().map(|a| self.ring.mul(a, c)).collect() }
    }

    pub fn mul(&self, f: &QrElement, g: &QrElement) -> QrElement {
        let n = self.n;
        let ring = &*self.ring;
        let mut out = vec![ring.zero(); n];
        for (i, a) in f.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let a_wrapped = ring.mul(a, &self.lambda);
            for (j, b) in g.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = i + j;
                if k < n {
                    let t = ring.mul(a, b);
                    ring.add_assign(&mut out[k], &t);
                } else {
                    let t = ring.mul(&a_wrapped, b);
                    ring.add_assign(&mut out[k - n], &t);
                }
            }
        }
        QrElement { coeffs: out }
    }

    /// Checked product for operands of unknown provenance.
    pub fn checked_mul(&self, f: &QrElement, g: &QrElement) -> Result<QrElement> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.mul(f, g))
    }

    pub fn pow(&self, f: &QrElement, mut exp: u64) -> QrElement {
        let mut acc = self.one();
        let mut base = f.clone();
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

    /// Multiplication by `x^k` for `k < n`.
    pub fn shift(&self, f: &QrElement, k: usize) -> QrElement {
        let n = self.n;
        let k = k % n;
        let mut out = vec![self.ring.zero(); n];
        for (r, c) in f.coeffs.iter().enumerate() {
            if r + k < n {
                out[r + k] = c.clone();
            } else {
                out[r + k - n] = self.ring.mul(c, &self.lambda);
            }
        }
        QrElement { coeffs: out }
    }

    /// `(c_0, ..., c_{n-1}) -> (lambda c_{n-1}, c_0, ..., c_{n-2})`.
    pub fn consta_shift(&self, f: &QrElement) -> QrElement {
        self.shift(f, 1)
    }

    /// Euclidean inner product `sum a_i b_i` over the Galois ring.
    pub fn inner_product(&self, f: &QrElement, g: &QrElement) -> GrElement {
        f.coeffs
            .iter()
            .zip(&g.coeffs)
            .fold(self.ring.zero(), |acc, (a, b)| self.ring.add(&acc, &self.ring.mul(a, b)))
    }

    fn mul_by_g(&self, f: &QrElement, alpha: &GrElement) -> QrElement {
        let shifted = self.shift(f, 4);
        self.sub(&shifted, &self.scale(f, alpha))
    }

    /// `a p^s - min{k : f g^k = 0}`; `f` lies in `<g^i>` exactly when the result is `>= i`.
    pub fn valuation(&self, f: &QrElement) -> Result<usize> {
        let chain = self.chain()?;
        let mut cur = f.clone();
        for k in 0..=chain.nilpotency {
            if cur.is_zero() {
                return Ok(chain.nilpotency - k);
            }
            cur = self.mul_by_g(&cur, &chain.alpha);
        }
        Err(Error::LemmaViolation("annihilator scan did not terminate".into()))
    }

    pub fn contains(&self, f: &QrElement, exponent: usize) -> Result<bool> {
        Ok(self.valuation(f)? >= exponent)
    }

    pub fn digit_expansion(&self, f: &QrElement) -> Result<DigitExpansion> {
        let chain = self.chain()?;
        let ring = &*self.ring;
        let g_poly = {
            let mut g = vec![ring.neg(&chain.alpha), ring.zero(), ring.zero(), ring.zero()];
            g.push(ring.one());
            g
        };
        let mut cur = f.clone();
        let mut digits = Vec::with_capacity(chain.nilpotency);
        for _ in 0..chain.nilpotency {
            let (q, r) = poly::divmod_monic(ring, &cur.coeffs, &g_poly);
            let mut digit = Vec::with_capacity(4);
            let mut carry = Vec::with_capacity(4);
            for k in 0..4 {
                let c = r.get(k).cloned().unwrap_or_else(|| ring.zero());
                let t = ring.teichmuller_lift(&c);
                carry.push(ring.div_p_pow(&ring.sub(&c, &t), 1).expect("c - lift(c) is divisible by p"));
                digit.push(t);
            }
            digits.push(digit);
            let pushed = self.mul(&chain.p_over_g, &self.reduce_poly(&carry));
            cur = self.add(&self.reduce_poly(&q), &pushed);
        }
        let expansion = DigitExpansion { digits };
        if self.recompose(&expansion)? != *f {
            return Err(Error::LemmaViolation("digit expansion does not round-trip".into()));
        }
        Ok(expansion)
    }

    pub fn recompose(&self, expansion: &DigitExpansion) -> Result<QrElement> {
        let chain = self.chain()?;
        let mut acc = self.zero();
        for (j, d) in expansion.digits.iter().enumerate() {
            if poly::is_zero(d) {
                continue;
            }
            let term = self.mul(&self.reduce_poly(d), &chain.g_powers[j]);
            acc = self.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Newton refinement `y <- y (2 - f y)` from a seed whose error is nilpotent of index `<= depth`.
    pub fn invert_with_seed(&self, f: &QrElement, seed: &QrElement, depth: usize) -> Result<QrElement> {
        let one = self.one();
        let two = self.constant(self.ring.from_int(2));
        let mut y = seed.clone();
        let steps = usize::BITS - depth.max(1).leading_zeros() + 1;
        for _ in 0..=steps {
            let fy = self.mul(f, &y);
            if fy == one {
                return Ok(y);
            }
            y = self.mul(&y, &self.sub(&two, &fy));
        }
        Err(Error::NotInvertible)
    }

    // (1 + N)^{-1} as a finite alternating series for nilpotent N.
    fn geometric_inverse(&self, nil: &QrElement) -> Result<QrElement> {
        let cap = self.n * self.ring.a() as usize + 2;
        let mut acc = self.zero();
        let mut term = self.one();
        for _ in 0..cap {
            if term.is_zero() {
                return Ok(acc);
            }
            acc = self.add(&acc, &term);
            term = self.neg(&self.mul(&term, nil));
        }
        Err(Error::NotInvertible)
    }

    // Inverse of a polynomial of degree <= 3 whose image modulo (p, g) is nonzero. The top
    // unit-coefficient part M is completed to x^4 + L by a cofactor, and x^4 + L = g + (L + alpha)
    // has a lower-degree leading part, so the recursion terminates.
    fn invert_low_degree(&self, f: &[GrElement]) -> Result<QrElement> {
        let chain = self.chain()?;
        let ring = &*self.ring;
        let d = f.iter().rposition(|c| ring.is_unit(c)).ok_or(Error::NotInvertible)?;
        let lead_inv = ring.inv(&f[d])?;
        let monic: Poly = f[..=d].iter().map(|c| ring.mul(c, &lead_inv)).collect();

        let monic_inv = if d == 0 {
            self.one()
        } else {
            let e = &monic[d - 1];
            let cofactor: Poly = match d {
                1 => vec![ring.neg(&ring.pow(e, 3)), ring.mul(e, e), ring.neg(e), ring.one()],
                2 => {
                    let f0 = &monic[0];
                    vec![ring.sub(&ring.mul(e, e), f0), ring.neg(e), ring.one()]
                }
                _ => vec![ring.neg(e), ring.one()],
            };
            let product = poly::mul(ring, &monic, &cofactor);
            debug_assert!(product.len() == 5 && product[4] == ring.one());
            let mut low: Poly = product[..4].to_vec();
            low[0] = ring.add(&low[0], &chain.alpha);
            let low_inv = self.invert_low_degree(&low)?;
            let series = self.geometric_inverse(&self.mul(&low_inv, &chain.g_powers[1]))?;
            self.mul(&self.reduce_poly(&cofactor), &self.mul(&low_inv, &series))
        };
        let head_inv = self.scale(&monic_inv, &lead_inv);

        let mut tail = f.to_vec();
        for c in tail.iter_mut().take(d + 1) {
            *c = ring.zero();
        }
        if poly::is_zero(&tail) {
            return Ok(head_inv);
        }
        let series = self.geometric_inverse(&self.mul(&head_inv, &self.reduce_poly(&tail)))?;
        Ok(self.mul(&head_inv, &series))
    }

    /// Inverse of a unit: invert the leading digit by the cofactor cases, then the remaining
    /// `1 + (x^4 - alpha) q` factor by a geometric series. The product is checked.
    pub fn invert(&self, f: &QrElement) -> Result<QrElement> {
        self.check(f)?;
        if self.valuation(f)? > 0 {
            return Err(Error::NotInvertible);
        }
        let head = self.digit_expansion(f)?.digits.swap_remove(0);
        let head_inv = self.invert_low_degree(&head)?;
        let rest = self.sub(f, &self.reduce_poly(&head));
        let series = self.geometric_inverse(&self.mul(&head_inv, &rest))?;
        let inv = self.mul(&head_inv, &series);
        if self.mul(f, &inv) != self.one() {
            return Err(Error::NotInvertible);
        }
        Ok(inv)
    }
}

/// Checks the identity for `(x^4 + b)^{p^n}` by exact polynomial division over `Z_{p^a}[x]`.
pub fn verify_expansion_identity(ring: &GaloisRing, b: &GrElement, n: u32) -> Result<ExpansionWitness> {
    ring.check(b)?;
    if !ring.is_unit(b) {
        return Err(Error::NotUnit);
    }
    if n == 0 {
        return Err(Error::InvalidParameters("the iterate n must be at least 1".into()));
    }
    let p = ring.p();
    let pn = p
        .checked_pow(n)
        .filter(|&v| v <= MAX_LENGTH)
        .ok_or_else(|| Error::InvalidParameters(format!("{p}^{n} is too large")))?;
    let base = {
        let mut f = vec![b.clone(), ring.zero(), ring.zero(), ring.zero()];
        f.push(ring.one());
        f
    };
    let lhs = poly::pow(ring, &base, pn);
    let lead = poly::monomial(ring, ring.one(), 4 * pn as usize);
    let b_pow = ring.pow_p_power(b, n);
    let diff = poly::sub(ring, &poly::sub(ring, &lhs, &lead), std::slice::from_ref(&b_pow));
    let halve = |f: &[GrElement], what: &str| -> Result<Poly> {
        f.iter()
            .map(|c| ring.div_p_pow(c, 1))
            .collect::<Option<Poly>>()
            .ok_or_else(|| Error::LemmaViolation(format!("{what} is not divisible by {p}")))
    };

    if p != 2 {
        let (quot, rem) = poly::divmod_monic(ring, &diff, &base);
        if !poly::is_zero(&rem) {
            return Err(Error::LemmaViolation("x^4 + b does not divide the difference".into()));
        }
        let theta = poly::trim(ring, halve(&quot, "the quotient")?);
        let rebuilt = poly::add(
            ring,
            &poly::add(ring, &lead, &[b_pow]),
            &poly::mul(ring, &base, &theta.iter().map(|c| ring.mul_p_pow(c, 1)).collect::<Poly>()),
        );
        if poly::trim(ring, rebuilt) != poly::trim(ring, lhs) {
            return Err(Error::LemmaViolation("theta does not reproduce the power".into()));
        }
        return Ok(ExpansionWitness::Odd { theta });
    }

    let alpha_n = poly::trim(ring, halve(&diff, "the difference")?);
    // alpha_1 = b x^4, alpha_k = (b x^4)^{2^{k-1}} + 2 beta_k,
    // beta_k = alpha_{k-1}^2 + alpha_{k-1} x^{2^{k+1}} + alpha_{k-1} b^{2^{k-1}}
    let bx4 = poly::monomial(ring, b.clone(), 4);
    let mut alpha = bx4.clone();
    let mut beta: Poly = Vec::new();
    for k in 2..=n {
        let prev = alpha;
        let sq = poly::mul(ring, &prev, &prev);
        let shifted = poly::mul(ring, &prev, &poly::monomial(ring, ring.one(), 1 << (k + 1)));
        let scaled: Poly = prev.iter().map(|c| ring.mul(c, &ring.pow_p_power(b, k - 1))).collect();
        beta = poly::trim(ring, poly::add(ring, &poly::add(ring, &sq, &shifted), &scaled));
        let lead_term = poly::pow(ring, &bx4, 1 << (k - 1));
        let doubled: Poly = beta.iter().map(|c| ring.mul_p_pow(c, 1)).collect();
        alpha = poly::trim(ring, poly::add(ring, &lead_term, &doubled));
    }
    let half_modulus = ring.characteristic() / 2;
    let reduce_half = |f: &[GrElement]| -> Poly {
        let f: Poly = f
            .iter()
            .map(|c| {
                let coeffs: Vec<i64> = c.coeffs().iter().map(|&v| (v % half_modulus) as i64).collect();
                ring.element(&coeffs).expect("same dimension")
            })
            .collect();
        poly::trim(ring, f)
    };
    if reduce_half(&alpha) != reduce_half(&alpha_n) {
        return Err(Error::LemmaViolation("alpha_n disagrees with the recursive shape".into()));
    }

    // In R_2(a, m, b) with s = n, x^{2^{n+2}} = b, so (b x^4)^{-2^{n-1}} = b^{-2^{n-1}-1} x^{2^{n+1}}.
    let r2 = QuotientCtx::new(Arc::new(ring.clone()), b.clone(), n, Mode::Generic, false)?;
    let alpha_elt = r2.reduce_poly(&alpha_n);
    let b_factor = ring.inv(&ring.pow(b, (1u64 << (n - 1)) + 1))?;
    let seed = r2.scale(&r2.x_pow(1usize << (n + 1)), &b_factor);
    r2.invert_with_seed(&alpha_elt, &seed, ring.a() as usize)
        .map_err(|_| Error::LemmaViolation("alpha_n is not invertible".into()))?;
    Ok(ExpansionWitness::Even { alpha_n, beta_n: beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z25_chain() -> QuotientCtx {
        let ring = Arc::new(GaloisRing::new(5, 2, 1, None).unwrap());
        let lambda = ring.from_int(12);
        QuotientCtx::new(ring, lambda, 1, Mode::Chain, false).unwrap()
    }

    fn int_poly(ctx: &QuotientCtx, coeffs: &[i64]) -> QrElement {
        let c: Vec<GrElement> = coeffs.iter().map(|&v| ctx.ring().from_int(v)).collect();
        ctx.reduce_poly(&c)
    }

    #[test]
    fn p1_context() {
        let ctx = z25_chain();
        assert_eq!(ctx.n(), 20);
        assert_eq!(ctx.alpha().unwrap().coeffs(), &[7]);
        assert_eq!(ctx.nilpotency_index().unwrap(), 10);
        let w: Vec<u64> = ctx.w().unwrap().coeffs().iter().map(|c| c.coeffs()[0]).collect();
        let mut expected = vec![0; 20];
        expected[0] = 1;
        expected[4] = 1;
        expected[8] = 4;
        expected[12] = 3;
        expected[16] = 3;
        assert_eq!(w, expected);
        assert_eq!(ctx.w().unwrap().coeffs()[0].coeffs()[0] % 5, 1);
    }

    #[test]
    fn guard_rejects_z9() {
        let ring = Arc::new(GaloisRing::new(3, 2, 1, None).unwrap());
        let lambda = ring.from_int(2);
        let err = QuotientCtx::new(ring.clone(), lambda.clone(), 1, Mode::Chain, false).unwrap_err();
        match err {
            Error::GuardFailure(w) => {
                assert_eq!(w.factorization, "x^4 + 1 = (x^2 + x + 2)(x^2 + 2x + 2)")
            }
            other => panic!("unexpected {other:?}"),
        }
        let forced = QuotientCtx::new(ring, lambda, 1, Mode::Chain, true).unwrap();
        assert!(forced.guard_failure().is_some());
    }

    #[test]
    fn chain_mode_preconditions() {
        let ring = Arc::new(GaloisRing::new(5, 2, 1, None).unwrap());
        let mk = |v: i64| QuotientCtx::new(ring.clone(), ring.from_int(v), 1, Mode::Chain, false);
        assert!(matches!(mk(4), Err(Error::SquareLambda)));
        assert!(matches!(mk(7), Err(Error::NotType1)));
        assert!(matches!(mk(10), Err(Error::NotUnit)));
        let f5 = Arc::new(GaloisRing::new(5, 1, 1, None).unwrap());
        assert!(matches!(
            QuotientCtx::new(f5.clone(), f5.from_int(2), 1, Mode::Chain, false),
            Err(Error::CharacteristicTooSmall(1))
        ));
        let generic = QuotientCtx::new(ring.clone(), ring.from_int(4), 1, Mode::Generic, false).unwrap();
        assert!(!generic.is_chain());
        assert!(matches!(generic.alpha(), Err(Error::NotChainMode)));
    }

    #[test]
    fn multiplication_rules() {
        let ctx = z25_chain();
        let x19 = ctx.x_pow(19);
        assert_eq!(ctx.mul(&x19, &ctx.x_pow(1)), ctx.constant(ctx.ring().from_int(12)));
        let f = int_poly(&ctx, &[3, 1, 4, 1, 5, 9, 2, 6]);
        assert_eq!(ctx.mul(&f, &ctx.one()), f);
        let mut c = ctx.x_pow(19);
        c = ctx.consta_shift(&c);
        assert_eq!(c, ctx.constant(ctx.ring().from_int(12)));
        let mut g = f.clone();
        for _ in 0..20 {
            g = ctx.consta_shift(&g);
        }
        assert_eq!(g, ctx.scale(&f, &ctx.ring().from_int(12)));
        assert_eq!(ctx.shift(&f, 3), ctx.mul(&f, &ctx.x_pow(3)));
    }

    #[test]
    fn lemma_on_g_power() {
        let ctx = z25_chain();
        let g5 = ctx.g_pow(5).unwrap();
        let pw = ctx.scale(ctx.w().unwrap(), &ctx.ring().from_int(5));
        assert_eq!(g5, &pw);
        assert!(ctx.mul(g5, g5).is_zero());
        assert_eq!(ctx.mul(ctx.w().unwrap(), ctx.w_inv().unwrap()), ctx.one());
    }

    #[test]
    fn valuations() {
        let ctx = z25_chain();
        assert_eq!(ctx.valuation(&ctx.one()).unwrap(), 0);
        assert_eq!(ctx.valuation(&ctx.constant(ctx.ring().from_int(5))).unwrap(), 5);
        assert_eq!(ctx.valuation(ctx.g_pow(3).unwrap()).unwrap(), 3);
        assert_eq!(ctx.valuation(&ctx.zero()).unwrap(), 10);
        for i in 0..10 {
            let gi = ctx.g_pow(i).unwrap();
            let gi1 = ctx.g_pow(i + 1).unwrap();
            assert!(ctx.contains(gi1, i).unwrap());
            assert!(!ctx.contains(gi, i + 1).unwrap());
        }
    }

    #[test]
    fn expansions() {
        let ctx = z25_chain();
        for i in 0..10 {
            let e = ctx.digit_expansion(ctx.g_pow(i).unwrap()).unwrap();
            assert_eq!(e.digits.len(), 10);
            assert_eq!(e.leading_index(), i);
            assert_eq!(e.digits[i][0], ctx.ring().one());
        }
        let five = ctx.digit_expansion(&ctx.constant(ctx.ring().from_int(5))).unwrap();
        assert_eq!(five.leading_index(), 5);
        let f = int_poly(&ctx, &[29, 1, 1]);
        let e = ctx.digit_expansion(&f).unwrap();
        let r = ctx.ring();
        assert_eq!(e.digits[0], vec![r.from_int(24), r.one(), r.one(), r.zero()]);
        assert!(e.digits[1..5].iter().all(|d| poly::is_zero(d)));
        assert!(!poly::is_zero(&e.digits[5]));
    }

    #[test]
    fn inverses() {
        let ctx = z25_chain();
        let f = int_poly(&ctx, &[1, 1]);
        let inv = ctx.invert(&f).unwrap();
        assert_eq!(ctx.mul(&f, &inv), ctx.one());
        assert_eq!(ctx.invert(&ctx.one()).unwrap(), ctx.one());
        assert!(matches!(ctx.invert(ctx.g().unwrap()), Err(Error::NotInvertible)));
        let f = int_poly(&ctx, &[3, 0, 7, 18, 2, 0, 0, 0, 11]);
        let inv = ctx.invert(&f).unwrap();
        assert_eq!(ctx.mul(&f, &inv), ctx.one());
    }

    #[test]
    fn every_teichmuller_digit_is_invertible() {
        let ctx = z25_chain();
        let r = ctx.ring().clone();
        let t = r.teich();
        for code in 1..625usize {
            let coeffs: Vec<GrElement> = (0..4).map(|k| t[(code / 5usize.pow(k)) % 5].clone()).collect();
            let f = ctx.reduce_poly(&coeffs);
            assert_eq!(ctx.valuation(&f).unwrap(), 0);
            let inv = ctx.invert(&f).unwrap();
            assert_eq!(ctx.mul(&f, &inv), ctx.one());
        }
    }

    #[test]
    fn expansion_identities() {
        for (p, n) in [(5u64, 1u32), (5, 2), (3, 1), (2, 1), (2, 2), (2, 3)] {
            for a in [2u32, 3] {
                let ring = GaloisRing::new(p, a, 1, None).unwrap();
                for b in ring.units().take(4) {
                    let w = verify_expansion_identity(&ring, &b, n).unwrap();
                    if p == 2 && n == 1 {
                        let ExpansionWitness::Even { alpha_n, .. } = w else { panic!() };
                        // alpha_n is only determined modulo 2^{a-1}
                        let half = ring.characteristic() / 2;
                        let b_half = ring.from_int((b.coeffs()[0] % half) as i64);
                        assert_eq!(alpha_n, poly::monomial(&ring, b_half, 4));
                    }
                }
            }
        }
        let ring = GaloisRing::new(5, 2, 1, None).unwrap();
        assert!(matches!(verify_expansion_identity(&ring, &ring.from_int(5), 1), Err(Error::NotUnit)));
    }

    #[test]
    fn gr9_chain() {
        let ring = Arc::new(GaloisRing::new(3, 2, 2, None).unwrap());
        let xi = ring.xi().clone();
        let lambda = ring.add(&xi, &ring.from_int(3));
        let ctx = QuotientCtx::new(ring, lambda, 1, Mode::Chain, false).unwrap();
        assert_eq!(ctx.n(), 12);
        assert_eq!(ctx.nilpotency_index().unwrap(), 6);
        let f = ctx.x_pow(1);
        let inv = ctx.invert(&f).unwrap();
        assert_eq!(ctx.mul(&f, &inv), ctx.one());
    }
}
