//! Codes `<(x^4 - alpha)^i>` in the chain ring, their duals, and related structure theorems.

pub mod crt;
pub mod echelon;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois_ring::{GaloisRing, GrElement, UnitKind};
use crate::quotient_ring::{Mode, QrElement, QuotientCtx};
pub use echelon::{pack, EchelonBasis, Pivot};

/// `p^exp`, kept symbolic so that cardinalities never overflow.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct PrimePower {
    p: u64,
    exp: u64,
}

impl PrimePower {
    pub fn new(p: u64, exp: u64) -> Self {
        PrimePower { p, exp }
    }

    pub fn base(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn to_biguint(&self) -> BigUint {
        BigUint::from(self.p).pow(self.exp as u32)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.p.checked_pow(u32::try_from(self.exp).ok()?)
    }

    pub fn fits_within(&self, budget: u64) -> bool {
        self.to_u64().is_some_and(|v| v <= budget)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "1")
        } else {
            write!(f, "{}^{}", self.p, self.exp)
        }
    }
}

impl Serialize for PrimePower {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The ideal `<(x^4 - alpha)^i>` of a chain-mode quotient ring.
#[derive(Clone, Debug)]
pub struct ChainCode {
    ctx: Arc<QuotientCtx>,
    exponent: usize,
    generator: QrElement,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeReport {
    pub p: u64,
    pub a: u32,
    pub m: usize,
    pub s: u32,
    pub lambda: GrElement,
    pub alpha: GrElement,
    pub i: usize,
    pub cardinality: PrimePower,
    pub generator: Vec<GrElement>,
}

impl ChainCode {
    pub fn new(ctx: Arc<QuotientCtx>, exponent: usize) -> Result<Self> {
        let generator = ctx.g_pow(exponent)?.clone();
        Ok(ChainCode { ctx, exponent, generator })
    }

    pub fn ctx(&self) -> &Arc<QuotientCtx> {
        &self.ctx
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn generator(&self) -> &QrElement {
        &self.generator
    }

    pub fn nilpotency(&self) -> usize {
        self.ctx.nilpotency_index().expect("chain codes live in chain contexts")
    }

    pub fn is_zero_code(&self) -> bool {
        self.exponent == self.nilpotency()
    }

    pub fn is_whole_ring(&self) -> bool {
        self.exponent == 0
    }

    /// `p^{4m(ap^s - i)}`.
    pub fn cardinality(&self) -> PrimePower {
        let ring = self.ctx.ring();
        PrimePower::new(ring.p(), 4 * ring.m() as u64 * (self.nilpotency() - self.exponent) as u64)
    }

    /// `x^r g` for `r = 0..n`.
    pub fn spanning_rows(&self) -> Vec<QrElement> {
        (0..self.ctx.n()).map(|r| self.ctx.shift(&self.generator, r)).collect()
    }

    pub fn echelon(&self) -> EchelonBasis {
        EchelonBasis::from_rows(
            self.ctx.ring().clone(),
            self.ctx.n(),
            self.spanning_rows().into_iter().map(QrElement::into_coeffs),
        )
    }

    pub fn contains(&self, f: &QrElement) -> Result<bool> {
        self.ctx.contains(f, self.exponent)
    }

    /// The dual: `<(x^4 - alpha^{-1})^{ap^s - i}>` in the `lambda^{-1}` quotient ring.
    pub fn dual(&self) -> Result<ChainCode> {
        let ring = self.ctx.ring().clone();
        let lambda_inv = ring.inv(self.ctx.lambda())?;
        let forced = self.ctx.guard_failure().is_some();
        let s = self.ctx.s().ok_or(Error::NotChainMode)?;
        let dual_ctx = QuotientCtx::new(ring, lambda_inv, s, Mode::Chain, forced)?;
        ChainCode::new(Arc::new(dual_ctx), self.nilpotency() - self.exponent)
    }

    pub fn report(&self) -> CodeReport {
        let ring = self.ctx.ring();
        CodeReport {
            p: ring.p(),
            a: ring.a(),
            m: ring.m(),
            s: self.ctx.s().unwrap_or(0),
            lambda: self.ctx.lambda().clone(),
            alpha: self.ctx.alpha().expect("chain context").clone(),
            i: self.exponent,
            cardinality: self.cardinality(),
            generator: self.generator.coeffs().to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCheck {
    pub orthogonal: bool,
    /// First pair of echelon rows with a nonzero inner product.
    pub counterexample: Option<(usize, usize)>,
    pub cardinality_product: PrimePower,
    pub ambient: PrimePower,
    pub holds: bool,
}

fn inner(ring: &GaloisRing, u: &[GrElement], v: &[GrElement]) -> GrElement {
    u.iter().zip(v).fold(ring.zero(), |acc, (a, b)| ring.add(&acc, &ring.mul(a, b)))
}

/// Certifies `claimed = code^perp` by pairwise orthogonality of spanning sets together with
/// `|code| |claimed| = |GR|^n`.
pub fn verify_dual_rows(ring: &Arc<GaloisRing>, n: usize, code: &[Vec<GrElement>], claimed: &[Vec<GrElement>]) -> DualCheck {
    let left = EchelonBasis::from_rows(ring.clone(), n, code.iter().cloned());
    let right = EchelonBasis::from_rows(ring.clone(), n, claimed.iter().cloned());
    let mut counterexample = None;
    'outer: for (x, u) in left.rows().iter().enumerate() {
        for (y, v) in right.rows().iter().enumerate() {
            if !inner(ring, u, v).is_zero() {
                counterexample = Some((x, y));
                break 'outer;
            }
        }
    }
    let cardinality_product = PrimePower::new(
        ring.p(),
        left.cardinality().exponent() + right.cardinality().exponent(),
    );
    let ambient = PrimePower::new(ring.p(), ring.order_exponent() * n as u64);
    DualCheck {
        orthogonal: counterexample.is_none(),
        counterexample,
        cardinality_product,
        ambient,
        holds: counterexample.is_none() && cardinality_product == ambient,
    }
}

pub fn verify_dual(code: &ChainCode, claimed: &ChainCode) -> Result<DualCheck> {
    if code.ctx.n() != claimed.ctx.n() {
        return Err(Error::ContextMismatch("codes of different length".into()));
    }
    let rows = |c: &ChainCode| -> Vec<Vec<GrElement>> {
        c.spanning_rows().into_iter().map(QrElement::into_coeffs).collect()
    };
    Ok(verify_dual_rows(code.ctx.ring(), code.ctx.n(), &rows(code), &rows(claimed)))
}

fn xi0_is_involution(ctx: &QuotientCtx) -> Result<bool> {
    let ring = ctx.ring();
    let xi0 = &ctx.profile().xi0;
    Ok(*xi0 == ring.inv(xi0)?)
}

/// Threshold form: `ceil(ap^s / 2) <= i` when `xi_0 = xi_0^{-1}`, else `ceil(a/2) p^s <= i`.
pub fn self_orthogonal_formula(code: &ChainCode) -> Result<bool> {
    let ctx = &code.ctx;
    let nil = ctx.nilpotency_index()?;
    let ps = nil / ctx.ring().a() as usize;
    let threshold = if xi0_is_involution(ctx)? {
        nil.div_ceil(2)
    } else {
        (ctx.ring().a() as usize).div_ceil(2) * ps
    };
    Ok(code.exponent >= threshold)
}

/// All pairwise inner products of the spanning rows vanish.
pub fn self_orthogonal_bruteforce(code: &ChainCode) -> bool {
    let rows = code.spanning_rows();
    rows.iter()
        .enumerate()
        .all(|(k, u)| rows[k..].iter().all(|v| code.ctx.inner_product(u, v).is_zero()))
}

/// The self-dual codes predicted by the closed form: at most one.
pub fn self_dual_enumerate(ctx: &Arc<QuotientCtx>) -> Result<Vec<ChainCode>> {
    let nil = ctx.nilpotency_index()?;
    let a = ctx.ring().a() as usize;
    let exponent = if xi0_is_involution(ctx)? {
        (nil % 2 == 0).then_some(nil / 2)
    } else {
        a.is_multiple_of(2).then_some(a / 2 * (nil / a))
    };
    exponent.map(|i| ChainCode::new(ctx.clone(), i)).into_iter().collect()
}

/// Exponents whose code is self-orthogonal by inner products and has `|C|^2 = |R|`.
pub fn self_dual_bruteforce(ctx: &Arc<QuotientCtx>) -> Result<Vec<usize>> {
    let nil = ctx.nilpotency_index()?;
    let mut out = Vec::new();
    for i in 0..=nil {
        let code = ChainCode::new(ctx.clone(), i)?;
        if 2 * code.cardinality().exponent() == ctx.order_exponent() && self_orthogonal_bruteforce(&code) {
            out.push(i);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiMethod {
    Enumeration,
    Closure,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiReport {
    pub equal: bool,
    pub method: MultiMethod,
    pub codewords: Option<u64>,
}

// every spanning row of `code`, shifted in `other`, stays inside `code`
fn shift_closed(code: &ChainCode, other: &QuotientCtx) -> Result<bool> {
    for row in code.spanning_rows() {
        if !code.contains(&other.consta_shift(&row))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compares `<(x^4 - alpha)^i>` over `lambda_1` and `lambda_2` sharing `xi_0`.
pub fn multi_constacyclic_equal(
    ring: &Arc<GaloisRing>,
    lambda1: &GrElement,
    lambda2: &GrElement,
    s: u32,
    exponent: usize,
    budget: u64,
    force: bool,
) -> Result<MultiReport> {
    let p1 = ring.classify_unit(lambda1)?;
    let p2 = ring.classify_unit(lambda2)?;
    if p1.xi0 != p2.xi0 {
        return Err(Error::Xi0Mismatch);
    }
    let ctx1 = Arc::new(QuotientCtx::new(ring.clone(), lambda1.clone(), s, Mode::Chain, force)?);
    let ctx2 = Arc::new(QuotientCtx::new(ring.clone(), lambda2.clone(), s, Mode::Chain, force)?);
    let c1 = ChainCode::new(ctx1.clone(), exponent)?;
    let c2 = ChainCode::new(ctx2.clone(), exponent)?;

    if c1.cardinality().fits_within(budget) {
        let collect = |code: &ChainCode| -> Result<HashSet<Box<[u64]>>> {
            let mut set = HashSet::new();
            code.echelon().for_each_codeword(budget, |w| {
                set.insert(pack(ring, w));
            })?;
            Ok(set)
        };
        let s1 = collect(&c1)?;
        let s2 = collect(&c2)?;
        return Ok(MultiReport {
            equal: s1 == s2,
            method: MultiMethod::Enumeration,
            codewords: Some(s1.len() as u64),
        });
    }
    let equal = c1.echelon().cardinality() == c2.echelon().cardinality()
        && shift_closed(&c1, &ctx2)?
        && shift_closed(&c2, &ctx1)?;
    Ok(MultiReport { equal, method: MultiMethod::Closure, codewords: None })
}

/// `p^m - 1`: one class of Type (1) codes per nonzero `xi_0`.
pub fn count_type1_classes(ring: &GaloisRing) -> Result<u64> {
    if ring.a() < 2 {
        return Err(Error::CharacteristicTooSmall(ring.a()));
    }
    Ok(ring.residue_size() - 1)
}

/// Groups all Type (1) units by `xi_0`; keys are discrete logs of `xi_0`.
pub fn type1_units_by_xi0(ring: &GaloisRing) -> Result<BTreeMap<u64, u64>> {
    let mut groups = BTreeMap::new();
    for u in ring.units() {
        let profile = ring.classify_unit(&u)?;
        if profile.kind == UnitKind::Type1 {
            *groups.entry(ring.dlog_teich(&profile.xi0)?).or_insert(0) += 1;
        }
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z25_chain() -> Arc<QuotientCtx> {
        let ring = Arc::new(GaloisRing::new(5, 2, 1, None).unwrap());
        let lambda = ring.from_int(12);
        Arc::new(QuotientCtx::new(ring, lambda, 1, Mode::Chain, false).unwrap())
    }

    #[test]
    fn cardinalities_match_echelon() {
        let ctx = z25_chain();
        for i in 0..=10 {
            let code = ChainCode::new(ctx.clone(), i).unwrap();
            assert_eq!(code.cardinality().exponent(), 4 * (10 - i) as u64);
            assert_eq!(code.echelon().cardinality(), code.cardinality());
        }
        assert_eq!(ChainCode::new(ctx.clone(), 4).unwrap().cardinality().to_string(), "5^24");
        assert_eq!(ChainCode::new(ctx.clone(), 10).unwrap().cardinality().to_string(), "1");
        assert!(matches!(ChainCode::new(ctx, 11), Err(Error::ExponentOutOfRange { i: 11, max: 10 })));
    }

    #[test]
    fn echelon_shapes() {
        let ctx = z25_chain();
        let whole = ChainCode::new(ctx.clone(), 0).unwrap().echelon();
        assert_eq!(whole.rows().len(), 20);
        assert!(whole.pivots().iter().all(|p| p.valuation == 0));
        assert!(ChainCode::new(ctx.clone(), 10).unwrap().echelon().rows().is_empty());
        let nine = ChainCode::new(ctx, 9).unwrap().echelon();
        let cols: Vec<usize> = nine.pivots().iter().map(|p| p.column).collect();
        assert!(cols.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(nine.cardinality().to_u64(), Some(625));
    }

    #[test]
    fn dual_of_c9() {
        let ctx = z25_chain();
        let code = ChainCode::new(ctx, 9).unwrap();
        let dual = code.dual().unwrap();
        assert_eq!(dual.ctx().lambda().coeffs(), &[23]);
        assert_eq!(dual.exponent(), 1);
        assert_eq!(dual.ctx().alpha().unwrap().coeffs(), &[18]);
        assert_eq!(dual.cardinality().to_string(), "5^36");
        assert!(verify_dual(&code, &dual).unwrap().holds);
        let same = verify_dual(&code, &code).unwrap();
        assert!(!same.holds);
    }

    #[test]
    fn self_orthogonality_and_self_duality() {
        let ctx = z25_chain();
        for i in 0..=10 {
            let code = ChainCode::new(ctx.clone(), i).unwrap();
            assert_eq!(self_orthogonal_formula(&code).unwrap(), i >= 5);
            assert_eq!(self_orthogonal_bruteforce(&code), i >= 5);
        }
        let sd = self_dual_enumerate(&ctx).unwrap();
        assert_eq!(sd.len(), 1);
        assert_eq!(sd[0].exponent(), 5);
        assert_eq!(self_dual_bruteforce(&ctx).unwrap(), vec![5]);
    }

    #[test]
    fn multi_constacyclic_small() {
        let ring = Arc::new(GaloisRing::new(5, 2, 1, None).unwrap());
        for i in [0, 9, 10] {
            let r = multi_constacyclic_equal(&ring, &ring.from_int(12), &ring.from_int(17), 1, i, 1000, false).unwrap();
            assert!(r.equal);
        }
        let r = multi_constacyclic_equal(&ring, &ring.from_int(12), &ring.from_int(17), 1, 4, 1000, false).unwrap();
        assert_eq!((r.equal, r.method), (true, MultiMethod::Closure));
        assert!(matches!(
            multi_constacyclic_equal(&ring, &ring.from_int(12), &ring.from_int(3), 1, 9, 1000, false),
            Err(Error::Xi0Mismatch)
        ));
    }

    #[test]
    fn type1_classes() {
        let z25 = GaloisRing::new(5, 2, 1, None).unwrap();
        assert_eq!(count_type1_classes(&z25).unwrap(), 4);
        let groups = type1_units_by_xi0(&z25).unwrap();
        assert_eq!(groups.len(), 4);
        assert!(groups.values().all(|&c| c == 4));
        let gr9 = GaloisRing::new(3, 2, 2, None).unwrap();
        assert_eq!(count_type1_classes(&gr9).unwrap(), 8);
        assert_eq!(type1_units_by_xi0(&gr9).unwrap().len(), 8);
        let f5 = GaloisRing::new(5, 1, 1, None).unwrap();
        assert!(count_type1_classes(&f5).is_err());
    }
}
