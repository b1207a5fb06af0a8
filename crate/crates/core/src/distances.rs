//! Rosenbloom–Tsfasman and Hamming weights, distances and RT weight distributions.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::codes::ChainCode;
use crate::error::{Error, Result};
use crate::galois_ring::GrElement;

/// 0 for the zero word, otherwise one plus the highest nonzero index.
pub fn rt_weight(c: &[GrElement]) -> usize {
    c.iter().rposition(|x| !x.is_zero()).map_or(0, |k| k + 1)
}

pub fn hamming_weight(c: &[GrElement]) -> usize {
    c.iter().filter(|x| !x.is_zero()).count()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Metric {
    #[serde(rename = "RT")]
    Rt,
    Hamming,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Formula,
    Bruteforce,
    Structural,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct HammingParams {
    pub beta0: u64,
    pub tau0: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub metric: Metric,
    pub value: usize,
    pub method: Method,
    pub i: usize,
    pub p: u64,
    pub a: u32,
    pub m: usize,
    pub s: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamming_params: Option<HammingParams>,
}

fn report(code: &ChainCode, metric: Metric, method: Method, value: usize) -> DistanceReport {
    let ring = code.ctx().ring();
    DistanceReport {
        metric,
        value,
        method,
        i: code.exponent(),
        p: ring.p(),
        a: ring.a(),
        m: ring.m(),
        s: code.ctx().s().unwrap_or(0),
        hamming_params: None,
    }
}

fn ps_of(code: &ChainCode) -> usize {
    code.nilpotency() / code.ctx().ring().a() as usize
}

/// `0` for the zero code, `1` up to `(a-1)p^s`, then `4i - 4(a-1)p^s + 1`.
pub fn d_rt_formula(code: &ChainCode) -> DistanceReport {
    let i = code.exponent();
    let nil = code.nilpotency();
    let low = nil - ps_of(code);
    let value = if i == nil {
        0
    } else if i <= low {
        1
    } else {
        4 * i - 4 * low + 1
    };
    report(code, Metric::Rt, Method::Formula, value)
}

/// Result of one pass over all codewords.
#[derive(Clone, Debug)]
pub struct Scan {
    pub d_rt: usize,
    pub d_h: usize,
    pub rt_histogram: Vec<u64>,
    pub codewords: u64,
}

/// Enumerates the code once and records both minimum weights and the RT histogram.
pub fn scan(code: &ChainCode, budget: u64) -> Result<Scan> {
    let n = code.ctx().n();
    let mut hist = vec![0u64; n + 1];
    let mut d_rt = usize::MAX;
    let mut d_h = usize::MAX;
    let mut count = 0u64;
    code.echelon().for_each_codeword(budget, |c| {
        count += 1;
        let rt = rt_weight(c);
        hist[rt] += 1;
        if rt > 0 {
            d_rt = d_rt.min(rt);
            d_h = d_h.min(hamming_weight(c));
        }
    })?;
    let zero_if_empty = |d: usize| if d == usize::MAX { 0 } else { d };
    Ok(Scan { d_rt: zero_if_empty(d_rt), d_h: zero_if_empty(d_h), rt_histogram: hist, codewords: count })
}

pub fn d_rt_bruteforce(code: &ChainCode, budget: u64) -> Result<DistanceReport> {
    Ok(report(code, Metric::Rt, Method::Bruteforce, scan(code, budget)?.d_rt))
}

pub fn d_h_bruteforce(code: &ChainCode, budget: u64) -> Result<DistanceReport> {
    Ok(report(code, Metric::Hamming, Method::Bruteforce, scan(code, budget)?.d_h))
}

/// Locates `(beta_0, tau_0)` with
/// `ap^s - p^{s-tau_0} + beta_0 p^{s-tau_0-1} + 1 <= i <= ap^s - p^{s-tau_0} + (beta_0+1) p^{s-tau_0-1}`.
fn locate_hamming_params(p: u64, a: u64, s: u32, i: u64) -> Vec<HammingParams> {
    let ps = p.pow(s);
    let mut hits = Vec::new();
    for tau0 in 0..s {
        let outer = p.pow(s - tau0);
        let inner = p.pow(s - tau0 - 1);
        for beta0 in 0..=p - 2 {
            let lo = a * ps - outer + beta0 * inner + 1;
            let hi = a * ps - outer + (beta0 + 1) * inner;
            if lo <= i && i <= hi {
                hits.push(HammingParams { beta0, tau0 });
            }
        }
    }
    hits
}

/// Closed-form Hamming distance for odd `p`: `1`, `0`, or `(beta_0 + 2) p^{tau_0}`.
pub fn d_h_formula(code: &ChainCode) -> Result<DistanceReport> {
    let ring = code.ctx().ring();
    if ring.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let i = code.exponent();
    let nil = code.nilpotency();
    let ps = ps_of(code);
    let s = code.ctx().s().ok_or(Error::NotChainMode)?;
    let hits = locate_hamming_params(ring.p(), ring.a() as u64, s, i as u64);
    let in_low = i <= nil - ps;
    let in_zero = i == nil;
    // exactly one of the three regions must claim i
    if usize::from(in_low) + usize::from(in_zero) + hits.len() != 1 {
        return Err(Error::LemmaViolation(format!("Hamming ranges do not tile at i = {i}")));
    }
    let mut r = report(code, Metric::Hamming, Method::Formula, 0);
    if in_low {
        r.value = 1;
    } else if let Some(h) = hits.first() {
        r.value = (h.beta0 as usize + 2) * ring.p().pow(h.tau0) as usize;
        r.hamming_params = Some(*h);
    }
    Ok(r)
}

/// `A_j` for `j = 0..=n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RtDistribution {
    pub p: u64,
    pub counts: Vec<BigUint>,
}

impl RtDistribution {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Rows `(j, A_j)` with counts written as `c*p^e`.
    pub fn rows(&self) -> Vec<(usize, String)> {
        self.counts
            .iter()
            .enumerate()
            .map(|(j, c)| (j, format_count(c, self.p)))
            .collect()
    }
}

impl Serialize for RtDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<usize, String> = self.rows().into_iter().collect();
        map.serialize(serializer)
    }
}

/// Writes `value` as `c*p^e` with `p` not dividing `c`, or just `p^e` / `c`.
pub fn format_count(value: &BigUint, p: u64) -> String {
    if value.is_zero() {
        return "0".into();
    }
    let base = BigUint::from(p);
    let mut c = value.clone();
    let mut e = 0u64;
    while (&c % &base).is_zero() {
        c /= &base;
        e += 1;
    }
    match (c.is_one(), e) {
        (_, 0) => c.to_string(),
        (true, _) => format!("{p}^{e}"),
        (false, _) => format!("{c}*{p}^{e}"),
    }
}

fn big_pow(p: u64, e: u64) -> BigUint {
    BigUint::from(p).pow(e as u32)
}

/// Closed-form RT distribution. For `i = (b-1)p^s + k` with `1 <= k < p^s`, the codewords
/// supported on the first `j` coordinates number `Q^j q^{max(0, j - 4k)}` with
/// `Q = p^{m(a-b)}`, `q = p^m`; for `i = tp^s` they number `p^{m(a-t) j}`.
pub fn rt_distribution_formula(code: &ChainCode) -> RtDistribution {
    let ring = code.ctx().ring();
    let (p, a, m) = (ring.p(), ring.a() as u64, ring.m() as u64);
    let n = code.ctx().n();
    let ps = ps_of(code);
    let i = code.exponent();
    let mut counts = vec![BigUint::zero(); n + 1];
    counts[0] = BigUint::one();
    if i == code.nilpotency() {
        return RtDistribution { p, counts };
    }
    let (t, k) = (i / ps, i % ps);
    // k = 0: the code is <p^t>; otherwise it lies strictly between <p^{t+1}> and <p^t>
    let q_exp = if k == 0 { m * (a - t as u64) } else { m * (a - t as u64 - 1) };
    let truncated = |j: usize| -> u64 {
        let free = if k == 0 { 0 } else { j.saturating_sub(4 * k) as u64 };
        q_exp * j as u64 + m * free
    };
    for (j, slot) in counts.iter_mut().enumerate().skip(1) {
        *slot = big_pow(p, truncated(j)) - big_pow(p, truncated(j - 1));
    }
    RtDistribution { p, counts }
}

/// Literal evaluation of the printed case table. Rows are tried in printed order and the first
/// matching row wins; indices outside `0..=n` are kept so the comparison can show them.
pub fn rt_distribution_printed(code: &ChainCode) -> BTreeMap<i64, BigUint> {
    let ring = code.ctx().ring();
    let (p, a, m) = (ring.p(), ring.a() as i64, ring.m() as u64);
    let ps = ps_of(code) as i64;
    let i = code.exponent() as i64;
    let mut out = BTreeMap::new();
    out.insert(0, BigUint::one());
    let mut put = |j: i64, v: BigUint| {
        out.entry(j).or_insert(v);
    };
    let geometric = |e: u64, j: i64| -> BigUint {
        if j < 1 {
            return BigUint::zero();
        }
        (big_pow(p, e) - 1u32) * big_pow(p, e * (j as u64 - 1))
    };
    if i == a * ps {
        return out;
    }
    if (a - 1) * ps < i {
        let start = 4 * i - 4 * (a - 1) * ps;
        for j in 1..=start {
            put(j, BigUint::zero());
        }
        for t in 0..=(4 * a * ps - 4 * i - 1) {
            put(start + 1 + t, (big_pow(p, m) - 1u32) * big_pow(p, m * t as u64));
        }
    } else if i % ps == 0 {
        let t = i / ps;
        let e = m * (a - t) as u64;
        for j in 0..=(4 * a * ps) {
            put(j, geometric(e, j));
        }
    } else {
        let b = i / ps + 1;
        let e = m * (a - b) as u64;
        for j in 1..=(4 * i - (b - 1) * ps) {
            put(j, geometric(e, j));
        }
        for t in 0..=(4 * a * ps - 4 * i - 1) {
            let j = 4 * i - 4 * (a - 1) * ps + 1 + t;
            let lead = big_pow(p, 4 * e * ps as u64) * (big_pow(p, m) - 1u32) * big_pow(p, m * t as u64);
            put(j, lead + geometric(e, j));
        }
    }
    out
}

/// Oracle distribution: enumeration histogram within the budget, otherwise
/// `A_j = N_j - N_{j-1}` with `N_j` read off the pivots below column `j` of an echelon basis.
pub fn rt_distribution_oracle(code: &ChainCode, budget: u64) -> Result<(RtDistribution, Method)> {
    let p = code.ctx().ring().p();
    if code.cardinality().fits_within(budget) {
        let s = scan(code, budget)?;
        let counts = s.rt_histogram.into_iter().map(BigUint::from).collect();
        return Ok((RtDistribution { p, counts }, Method::Bruteforce));
    }
    Ok((rt_distribution_structural(code), Method::Structural))
}

pub fn rt_distribution_structural(code: &ChainCode) -> RtDistribution {
    let p = code.ctx().ring().p();
    let basis = code.echelon();
    let n = code.ctx().n();
    let mut counts = vec![BigUint::one()];
    for j in 1..=n {
        counts.push(basis.truncated_cardinality(j).to_biguint() - basis.truncated_cardinality(j - 1).to_biguint());
    }
    RtDistribution { p, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois_ring::GaloisRing;
    use crate::quotient_ring::{Mode, QuotientCtx};
    use std::sync::Arc;

    fn z25_code(i: usize) -> ChainCode {
        let ring = Arc::new(GaloisRing::new(5, 2, 1, None).unwrap());
        let lambda = ring.from_int(12);
        let ctx = Arc::new(QuotientCtx::new(ring, lambda, 1, Mode::Chain, false).unwrap());
        ChainCode::new(ctx, i).unwrap()
    }

    #[test]
    fn weights() {
        let r = GaloisRing::new(5, 2, 1, None).unwrap();
        let mut v = vec![r.zero(); 20];
        assert_eq!((rt_weight(&v), hamming_weight(&v)), (0, 0));
        v[0] = r.one();
        assert_eq!(rt_weight(&v), 1);
        v[16] = r.from_int(5);
        assert_eq!((rt_weight(&v), hamming_weight(&v)), (17, 2));
    }

    #[test]
    fn rt_formula_values() {
        assert_eq!(d_rt_formula(&z25_code(9)).value, 17);
        assert_eq!(d_rt_formula(&z25_code(8)).value, 13);
        assert_eq!(d_rt_formula(&z25_code(5)).value, 1);
        assert_eq!(d_rt_formula(&z25_code(3)).value, 1);
        assert_eq!(d_rt_formula(&z25_code(10)).value, 0);
    }

    #[test]
    fn hamming_formula_values() {
        let got: Vec<usize> = (0..=10).map(|i| d_h_formula(&z25_code(i)).unwrap().value).collect();
        assert_eq!(got, vec![1, 1, 1, 1, 1, 1, 2, 3, 4, 5, 0]);
        let r = d_h_formula(&z25_code(8)).unwrap();
        assert_eq!(r.hamming_params, Some(HammingParams { beta0: 2, tau0: 0 }));
    }

    #[test]
    fn brute_force_at_i9() {
        let s = scan(&z25_code(9), 1000).unwrap();
        assert_eq!((s.d_rt, s.d_h, s.codewords), (17, 5, 625));
        assert_eq!(&s.rt_histogram[17..], &[4, 20, 100, 500]);
        let zero = scan(&z25_code(10), 10).unwrap();
        assert_eq!((zero.d_rt, zero.d_h, zero.codewords), (0, 0, 1));
    }

    #[test]
    fn distribution_formula_sums() {
        for i in 0..=10 {
            let code = z25_code(i);
            let d = rt_distribution_formula(&code);
            assert_eq!(d.total(), code.cardinality().to_biguint(), "i = {i}");
            assert_eq!(d, rt_distribution_structural(&code), "i = {i}");
        }
        let d = rt_distribution_formula(&z25_code(9));
        let tail: Vec<String> = d.rows()[17..].iter().map(|(_, c)| c.clone()).collect();
        assert_eq!(tail, vec!["4", "4*5^1", "4*5^2", "4*5^3"]);
        let d5 = rt_distribution_formula(&z25_code(5));
        assert_eq!(d5.counts[3], BigUint::from(100u32));
    }

    #[test]
    fn printed_table_sums_differ_in_cases_two_and_three() {
        let printed_sum = |i: usize| -> BigUint { rt_distribution_printed(&z25_code(i)).values().sum() };
        assert_eq!(printed_sum(9), z25_code(9).cardinality().to_biguint());
        assert_ne!(printed_sum(5), z25_code(5).cardinality().to_biguint());
        assert_ne!(printed_sum(3), z25_code(3).cardinality().to_biguint());
    }

    #[test]
    fn count_formatting() {
        assert_eq!(format_count(&BigUint::from(1u32), 5), "1");
        assert_eq!(format_count(&BigUint::from(625u32), 5), "5^4");
        assert_eq!(format_count(&BigUint::from(500u32), 5), "4*5^3");
        assert_eq!(format_count(&BigUint::zero(), 5), "0");
    }
}
