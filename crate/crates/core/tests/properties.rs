mod common;

use std::sync::Arc;

use consta::codes::crt::SquareSplit;
use consta::codes::ChainCode;
use consta::distances::{rt_distribution_formula, rt_distribution_structural, scan};
use consta::{GaloisRing, GrElement, Mode, QrElement, QuotientCtx, UnitKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z25() -> Arc<GaloisRing> {
    Arc::new(GaloisRing::new(5, 2, 1, None).unwrap())
}

fn gr9() -> Arc<GaloisRing> {
    Arc::new(GaloisRing::new(3, 2, 2, None).unwrap())
}

fn z25_chain() -> Arc<QuotientCtx> {
    let ring = z25();
    let lambda = ring.from_int(12);
    Arc::new(QuotientCtx::new(ring, lambda, 1, Mode::Chain, false).unwrap())
}

fn gr9_chain() -> Arc<QuotientCtx> {
    let ring = gr9();
    let lambda = ring.add(ring.xi(), &ring.from_int(3));
    Arc::new(QuotientCtx::new(ring, lambda, 1, Mode::Chain, false).unwrap())
}

fn random_element(ctx: &QuotientCtx, rng: &mut ChaCha8Rng) -> QrElement {
    let ring = ctx.ring();
    let size = ring.order().unwrap();
    let coeffs = (0..ctx.n()).map(|_| ring.element_from_index(rng.gen_range(0..size))).collect();
    ctx.from_coeffs(coeffs).unwrap()
}

fn element_strategy(ring: Arc<GaloisRing>) -> impl Strategy<Value = GrElement> {
    let size = ring.order().unwrap();
    (0..size).prop_map(move |k| ring.element_from_index(k))
}

proptest! {
    #[test]
    fn ring_axioms(x in element_strategy(gr9()), y in element_strategy(gr9()), z in element_strategy(gr9())) {
        let r = gr9();
        prop_assert_eq!(r.add(&x, &y), r.add(&y, &x));
        prop_assert_eq!(r.mul(&x, &y), r.mul(&y, &x));
        prop_assert_eq!(r.mul(&r.mul(&x, &y), &z), r.mul(&x, &r.mul(&y, &z)));
        prop_assert_eq!(r.mul(&x, &r.add(&y, &z)), r.add(&r.mul(&x, &y), &r.mul(&x, &z)));
        prop_assert_eq!(r.add(&x, &r.neg(&x)), r.zero());
        prop_assert_eq!(r.mul(&x, &r.one()), x);
    }

    #[test]
    fn teichmuller_lift_is_multiplicative(x in element_strategy(gr9()), y in element_strategy(gr9())) {
        let r = gr9();
        let lx = r.teichmuller_lift(&x);
        prop_assert_eq!(r.teichmuller_lift(&lx), lx.clone());
        prop_assert_eq!(&lx, &r.teichmuller_lift_iterative(&x));
        let ly = r.teichmuller_lift(&y);
        prop_assert_eq!(r.teichmuller_lift(&r.mul(&x, &y)), r.mul(&lx, &ly));
    }
}

#[test]
fn digit_round_trip_exhaustive() {
    for ring in [z25(), gr9()] {
        for x in ring.elements() {
            let digits = ring.teich_digits(&x);
            assert!(digits.digits.iter().all(|d| ring.is_teichmuller(d)));
            assert_eq!(ring.from_digits(&digits), x);
        }
    }
}

#[test]
fn inverse_agrees_with_type1_formula() {
    for ring in [z25(), gr9(), Arc::new(GaloisRing::new(3, 3, 1, None).unwrap())] {
        for u in ring.units() {
            let inv = ring.inv(&u).unwrap();
            assert_eq!(ring.mul(&u, &inv), ring.one());
            if ring.classify_unit(&u).unwrap().kind == UnitKind::Type1 {
                assert_eq!(ring.type1_inverse_formula(&u).unwrap(), inv, "unit {u}");
            }
        }
    }
}

// the inverse of a Type (1) unit is Type (1), with the inverse leading digit
#[test]
fn type1_inverses_stay_type1() {
    for p in [3u64, 5] {
        let ring = GaloisRing::new(p, 2, 1, None).unwrap();
        let type1: Vec<GrElement> = ring
            .units()
            .filter(|u| ring.classify_unit(u).unwrap().kind == UnitKind::Type1)
            .collect();
        for u in &type1 {
            let inv = ring.inv(u).unwrap();
            assert_eq!(ring.classify_unit(&inv).unwrap().kind, UnitKind::Type1);
            let profile = ring.classify_unit(u).unwrap();
            assert_eq!(ring.classify_unit(&inv).unwrap().xi0, ring.inv(&profile.xi0).unwrap());
        }
    }
}

#[test]
fn square_test_matches_brute_force() {
    for ring in [z25(), gr9(), Arc::new(GaloisRing::new(7, 2, 1, None).unwrap())] {
        let squares: std::collections::HashSet<GrElement> = ring.units().map(|u| ring.mul(&u, &u)).collect();
        for u in ring.units() {
            assert_eq!(ring.is_square_unit(&u).unwrap(), squares.contains(&u), "unit {u}");
        }
    }
}

#[test]
fn p_power_ideals_have_expected_size() {
    for ring in [z25(), gr9()] {
        for i in 0..=ring.a() {
            let size = ring.elements().filter(|x| ring.p_valuation(x) >= i).count() as u64;
            let expect = ring.p().pow(ring.m() as u32 * (ring.a() - i));
            assert_eq!(size, expect);
        }
    }
}

#[test]
fn valuation_is_additive() {
    let ctx = z25_chain();
    let nil = ctx.nilpotency_index().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let f = random_element(&ctx, &mut rng);
        let g = random_element(&ctx, &mut rng);
        let (vf, vg) = (ctx.valuation(&f).unwrap(), ctx.valuation(&g).unwrap());
        let vfg = ctx.valuation(&ctx.mul(&f, &g)).unwrap();
        assert_eq!(vfg, (vf + vg).min(nil));
    }
}

#[test]
fn digit_expansion_round_trip() {
    for ctx in [z25_chain(), gr9_chain()] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let f = random_element(&ctx, &mut rng);
            let e = ctx.digit_expansion(&f).unwrap();
            assert_eq!(ctx.recompose(&e).unwrap(), f);
            assert_eq!(e.leading_index(), ctx.valuation(&f).unwrap());
        }
    }
}

#[test]
fn random_units_invert() {
    let ctx = z25_chain();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut tried = 0;
    while tried < 500 {
        let f = random_element(&ctx, &mut rng);
        if ctx.valuation(&f).unwrap() != 0 {
            continue;
        }
        tried += 1;
        let inv = ctx.invert(&f).unwrap();
        assert_eq!(ctx.mul(&f, &inv), ctx.one());
    }
}

#[test]
fn chain_is_strict() {
    for ctx in [z25_chain(), gr9_chain()] {
        let nil = ctx.nilpotency_index().unwrap();
        for i in 0..nil {
            let g_i = ctx.g_pow(i).unwrap();
            assert!(ctx.contains(g_i, i).unwrap());
            assert!(!ctx.contains(g_i, i + 1).unwrap(), "g^{i} lies in the next ideal");
            let code = ChainCode::new(ctx.clone(), i + 1).unwrap();
            assert!(code.contains(ctx.g_pow(i + 1).unwrap()).unwrap());
        }
    }
}

#[test]
fn crt_round_trip_gr9() {
    let ring = gr9();
    // lambda = delta^2 for a Type (1) delta
    let delta = ring.add(ring.xi(), &ring.from_int(3));
    let lambda = ring.mul(&delta, &delta);
    let ctx = Arc::new(QuotientCtx::new(ring.clone(), lambda, 1, Mode::Generic, false).unwrap());
    let split = SquareSplit::new(ctx.clone(), delta).unwrap();
    let (e1, e2) = split.idempotents();
    assert_eq!(&ctx.mul(e1, e1), e1);
    assert_eq!(ctx.add(e1, e2), ctx.one());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let c = random_element(&ctx, &mut rng);
        let (c1, c2) = split.split(&c).unwrap();
        assert_eq!(split.join(&c1, &c2).unwrap(), c);
    }
}

#[test]
fn rt_distribution_over_gr9() {
    let ctx = gr9_chain();
    for i in [4usize, 5, 6] {
        let code = ChainCode::new(ctx.clone(), i).unwrap();
        let formula = rt_distribution_formula(&code);
        assert_eq!(formula, rt_distribution_structural(&code), "i = {i}");
        assert_eq!(formula.total(), code.cardinality().to_biguint());
        if code.cardinality().fits_within(1_000_000) {
            let hist: Vec<num_bigint::BigUint> = scan(&code, 1_000_000)
                .unwrap()
                .rt_histogram
                .into_iter()
                .map(Into::into)
                .collect();
            assert_eq!(formula.counts, hist, "i = {i}");
        }
    }
}

#[test]
fn oracle_agrees_with_library_multiplication() {
    let ctx = z25_chain();
    let oracle = common::IntQuotient::new(25, 20, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..1000 {
        let f = random_element(&ctx, &mut rng);
        let g = random_element(&ctx, &mut rng);
        let prod = common::ints(ctx.mul(&f, &g).coeffs());
        assert_eq!(prod, oracle.mul(&common::ints(f.coeffs()), &common::ints(g.coeffs())));
    }
}
