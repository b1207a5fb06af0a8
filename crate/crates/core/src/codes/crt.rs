//! Square `lambda = delta^2`: `x^n - lambda = (x^{n/2} - delta)(x^{n/2} + delta)` and codes split
//! as direct sums of codes over the two halves.

use std::sync::Arc;

use serde::Serialize;

use super::{verify_dual_rows, DualCheck, EchelonBasis, PrimePower};
use crate::error::{Error, Result};
use crate::galois_ring::{GaloisRing, GrElement};
use crate::quotient_ring::{QrElement, QuotientCtx};

/// Brute-force square root among the units, in element order.
pub fn find_square_root(ring: &GaloisRing, lambda: &GrElement) -> Option<GrElement> {
    ring.units().find(|u| ring.mul(u, u) == *lambda)
}

/// `e1 = (2 delta)^{-1} (x^{n/2} + delta)` and `e2 = 1 - e1`.
pub fn crt_idempotents(ctx: &QuotientCtx, delta: &GrElement) -> Result<(QrElement, QrElement)> {
    let ring = ctx.ring();
    if ring.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    ring.check(delta)?;
    if ring.mul(delta, delta) != *ctx.lambda() {
        return Err(Error::NotSquareRoot);
    }
    if !ctx.n().is_multiple_of(2) {
        return Err(Error::InvalidParameters("length must be even".into()));
    }
    let half = ctx.n() / 2;
    let two_delta_inv = ring.inv(&ring.scale_int(delta, 2))?;
    let base = ctx.add(&ctx.x_pow(half), &ctx.constant(delta.clone()));
    let e1 = ctx.scale(&base, &two_delta_inv);
    let e2 = ctx.sub(&ctx.one(), &e1);
    if ctx.mul(&e1, &e1) != e1 || ctx.mul(&e2, &e2) != e2 || !ctx.mul(&e1, &e2).is_zero() {
        return Err(Error::LemmaViolation("CRT idempotent identities fail".into()));
    }
    Ok((e1, e2))
}

#[derive(Clone, Debug)]
pub struct SquareSplit {
    ctx: Arc<QuotientCtx>,
    delta: GrElement,
    e1: QrElement,
    e2: QrElement,
    // GR[x] / (x^{n/2} - delta) and GR[x] / (x^{n/2} + delta)
    plus: Arc<QuotientCtx>,
    minus: Arc<QuotientCtx>,
}

/// A component code of a half-length ring, given by one generator.
#[derive(Clone, Debug)]
pub enum ComponentCode {
    Whole,
    Zero,
    /// `<p^k>`
    PPower(u32),
    Generator(QrElement),
}

impl ComponentCode {
    pub fn generator(&self, ctx: &QuotientCtx) -> QrElement {
        let ring = ctx.ring();
        match self {
            ComponentCode::Whole => ctx.one(),
            ComponentCode::Zero => ctx.zero(),
            ComponentCode::PPower(k) => ctx.constant(ring.mul_p_pow(&ring.one(), *k)),
            ComponentCode::Generator(g) => g.clone(),
        }
    }

    /// The dual for the structured choices; opaque generators have no known dual.
    pub fn dual(&self, a: u32) -> Option<ComponentCode> {
        match self {
            ComponentCode::Whole => Some(ComponentCode::Zero),
            ComponentCode::Zero => Some(ComponentCode::Whole),
            ComponentCode::PPower(k) => Some(ComponentCode::PPower(a.saturating_sub(*k))),
            ComponentCode::Generator(_) => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectSumReport {
    pub first: PrimePower,
    pub second: PrimePower,
    pub joined: PrimePower,
    pub multiplicative: bool,
    pub component_duals: [bool; 2],
    pub dual_direct_sum: DualCheck,
    pub holds: bool,
}

impl SquareSplit {
    pub fn new(ctx: Arc<QuotientCtx>, delta: GrElement) -> Result<Self> {
        let (e1, e2) = crt_idempotents(&ctx, &delta)?;
        let ring = ctx.ring().clone();
        let half = ctx.n() / 2;
        let plus = Arc::new(QuotientCtx::with_length(ring.clone(), delta.clone(), half)?);
        let minus = Arc::new(QuotientCtx::with_length(ring.clone(), ring.neg(&delta), half)?);
        Ok(SquareSplit { ctx, delta, e1, e2, plus, minus })
    }

    pub fn ctx(&self) -> &Arc<QuotientCtx> {
        &self.ctx
    }

    pub fn delta(&self) -> &GrElement {
        &self.delta
    }

    pub fn idempotents(&self) -> (&QrElement, &QrElement) {
        (&self.e1, &self.e2)
    }

    pub fn plus(&self) -> &Arc<QuotientCtx> {
        &self.plus
    }

    pub fn minus(&self) -> &Arc<QuotientCtx> {
        &self.minus
    }

    /// `c -> (c mod (x^{n/2} - delta), c mod (x^{n/2} + delta))`.
    pub fn split(&self, c: &QrElement) -> Result<(QrElement, QrElement)> {
        self.ctx.check(c)?;
        let ring = self.ctx.ring();
        let half = self.ctx.n() / 2;
        let (lo, hi) = c.coeffs().split_at(half);
        let scaled: Vec<GrElement> = hi.iter().map(|h| ring.mul(h, &self.delta)).collect();
        let c1 = lo.iter().zip(&scaled).map(|(l, h)| ring.add(l, h)).collect();
        let c2 = lo.iter().zip(&scaled).map(|(l, h)| ring.sub(l, h)).collect();
        Ok((self.plus.from_coeffs(c1)?, self.minus.from_coeffs(c2)?))
    }

    /// `(c1, c2) -> c1 e1 + c2 e2`.
    pub fn join(&self, c1: &QrElement, c2: &QrElement) -> Result<QrElement> {
        self.plus.check(c1)?;
        self.minus.check(c2)?;
        let lift1 = self.ctx.reduce_poly(c1.coeffs());
        let lift2 = self.ctx.reduce_poly(c2.coeffs());
        Ok(self.ctx.add(&self.ctx.mul(&lift1, &self.e1), &self.ctx.mul(&lift2, &self.e2)))
    }

    fn component_rows(ctx: &QuotientCtx, generator: &QrElement) -> Vec<QrElement> {
        (0..ctx.n()).map(|r| ctx.shift(generator, r)).collect()
    }

    /// Spanning rows of `C_1 e_1 + C_2 e_2`.
    pub fn direct_sum_rows(&self, first: &QrElement, second: &QrElement) -> Result<Vec<QrElement>> {
        let mut rows = Vec::new();
        for r in Self::component_rows(&self.plus, first) {
            rows.push(self.join(&r, &self.minus.zero())?);
        }
        for r in Self::component_rows(&self.minus, second) {
            rows.push(self.join(&self.plus.zero(), &r)?);
        }
        Ok(rows)
    }

    /// Checks `|C| = |C_1| |C_2|` and `C^perp = C_1^perp + C_2^perp` against the split of the
    /// `lambda^{-1}` ring by `delta^{-1}`.
    pub fn verify_direct_sum(&self, first: &ComponentCode, second: &ComponentCode) -> Result<DirectSumReport> {
        let ring = self.ctx.ring().clone();
        let a = ring.a();
        let unknown = || Error::InvalidParameters("dual of an opaque component generator is unknown".into());
        let dual_first = first.dual(a).ok_or_else(unknown)?;
        let dual_second = second.dual(a).ok_or_else(unknown)?;

        let lambda_inv = ring.inv(self.ctx.lambda())?;
        let delta_inv = ring.inv(&self.delta)?;
        let dual_ctx = Arc::new(QuotientCtx::with_length(ring.clone(), lambda_inv, self.ctx.n())?);
        let dual_split = SquareSplit::new(dual_ctx, delta_inv)?;

        let rows = |rs: Vec<QrElement>| -> Vec<Vec<GrElement>> { rs.into_iter().map(QrElement::into_coeffs).collect() };
        let g1 = first.generator(&self.plus);
        let g2 = second.generator(&self.minus);
        let h1 = dual_first.generator(&dual_split.plus);
        let h2 = dual_second.generator(&dual_split.minus);

        let card = |ctx: &QuotientCtx, g: &QrElement| {
            EchelonBasis::from_rows(ring.clone(), ctx.n(), rows(Self::component_rows(ctx, g))).cardinality()
        };
        let first_card = card(&self.plus, &g1);
        let second_card = card(&self.minus, &g2);
        let joined_rows = rows(self.direct_sum_rows(&g1, &g2)?);
        let joined = EchelonBasis::from_rows(ring.clone(), self.ctx.n(), joined_rows.iter().cloned()).cardinality();
        let multiplicative = joined.exponent() == first_card.exponent() + second_card.exponent();

        let half = self.plus.n();
        let component_duals = [
            verify_dual_rows(&ring, half, &rows(Self::component_rows(&self.plus, &g1)), &rows(Self::component_rows(&dual_split.plus, &h1))).holds,
            verify_dual_rows(&ring, half, &rows(Self::component_rows(&self.minus, &g2)), &rows(Self::component_rows(&dual_split.minus, &h2))).holds,
        ];
        let dual_rows = rows(dual_split.direct_sum_rows(&h1, &h2)?);
        let dual_direct_sum = verify_dual_rows(&ring, self.ctx.n(), &joined_rows, &dual_rows);
        let holds = multiplicative && component_duals.iter().all(|&b| b) && dual_direct_sum.holds;
        Ok(DirectSumReport {
            first: first_card,
            second: second_card,
            joined,
            multiplicative,
            component_duals,
            dual_direct_sum,
            holds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient_ring::Mode;

    fn square_ctx() -> Arc<QuotientCtx> {
        let ring = Arc::new(GaloisRing::new(5, 2, 1, None).unwrap());
        let lambda = ring.from_int(4);
        Arc::new(QuotientCtx::new(ring, lambda, 1, Mode::Generic, false).unwrap())
    }

    #[test]
    fn idempotents_at_lambda_4() {
        let ctx = square_ctx();
        let ring = ctx.ring();
        let (e1, e2) = crt_idempotents(&ctx, &ring.from_int(2)).unwrap();
        assert_eq!(e1.coeffs()[0], ring.from_int(19 * 2 % 25));
        assert_eq!(e1.coeffs()[10], ring.from_int(19));
        assert_eq!(ctx.add(&e1, &e2), ctx.one());
        assert!(matches!(crt_idempotents(&ctx, &ring.from_int(3)), Err(Error::NotSquareRoot)));
        assert_eq!(find_square_root(ring, &ring.from_int(4)).map(|d| ring.mul(&d, &d)), Some(ring.from_int(4)));
        assert!(find_square_root(ring, &ring.from_int(12)).is_none());
    }

    #[test]
    fn even_characteristic_rejected() {
        let ring = Arc::new(GaloisRing::new(2, 2, 1, None).unwrap());
        let ctx = QuotientCtx::new(ring.clone(), ring.one(), 1, Mode::Generic, false).unwrap();
        assert!(matches!(crt_idempotents(&ctx, &ring.one()), Err(Error::EvenCharacteristic)));
    }

    #[test]
    fn split_join_roundtrip() {
        let ctx = square_ctx();
        let ring = ctx.ring();
        let split = SquareSplit::new(ctx.clone(), ring.from_int(2)).unwrap();
        let (z1, z2) = (split.plus().zero(), split.minus().zero());
        assert!(split.join(&z1, &z2).unwrap().is_zero());
        assert_eq!(split.join(&split.plus().one(), &split.minus().one()).unwrap(), ctx.one());
        let c: Vec<GrElement> = (0..20).map(|k| ring.from_int((k * k + 3) as i64)).collect();
        let c = ctx.from_coeffs(c).unwrap();
        let (c1, c2) = split.split(&c).unwrap();
        assert_eq!(split.join(&c1, &c2).unwrap(), c);
    }

    #[test]
    fn direct_sums() {
        let ctx = square_ctx();
        let split = SquareSplit::new(ctx.clone(), ctx.ring().from_int(2)).unwrap();
        let choices = [ComponentCode::Whole, ComponentCode::Zero, ComponentCode::PPower(1)];
        for a in &choices {
            for b in &choices {
                let report = split.verify_direct_sum(a, b).unwrap();
                assert!(report.holds, "{a:?} {b:?} {report:?}");
            }
        }
        let r = split.verify_direct_sum(&ComponentCode::Whole, &ComponentCode::Zero).unwrap();
        assert_eq!(r.joined.to_string(), "5^20");
    }
}
