//! Echelon spanning sets of submodules of `GR(p^a, m)^n`.
//!
//! Elimination runs from the highest column down. The pivot of a column is the entry of least
//! `p`-valuation, normalised to exactly `p^v`; the annihilated multiple `p^{a-v}` of the pivot row
//! is returned to the pool so that every codeword has a unique expansion with coefficient of row
//! `k` drawn from a transversal of `GR / p^{a - v_k} GR`.

use std::sync::Arc;

use serde::Serialize;

use super::PrimePower;
use crate::error::{Error, Result};
use crate::galois_ring::{GaloisRing, GrElement, TeichDigits};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Pivot {
    pub column: usize,
    pub valuation: u32,
}

#[derive(Clone, Debug)]
pub struct EchelonBasis {
    ring: Arc<GaloisRing>,
    n: usize,
    rows: Vec<Vec<GrElement>>,
    pivots: Vec<Pivot>,
}

impl EchelonBasis {
    pub fn from_rows<I>(ring: Arc<GaloisRing>, n: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = Vec<GrElement>>,
    {
        let a = ring.a();
        let mut pool: Vec<Vec<GrElement>> = rows.into_iter().filter(|r| r.iter().any(|c| !c.is_zero())).collect();
        let mut out_rows = Vec::new();
        let mut pivots = Vec::new();

        for col in (0..n).rev() {
            let best = pool
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by_key(|(_, r)| ring.p_valuation(&r[col]))
                .map(|(k, _)| k);
            let Some(best) = best else { continue };
            let mut row = pool.swap_remove(best);
            let v = ring.p_valuation(&row[col]);
            let unit = ring.div_p_pow(&row[col], v).expect("valuation divides");
            let unit_inv = ring.inv(&unit).expect("unit part of a pivot");
            for c in row.iter_mut() {
                *c = ring.mul(c, &unit_inv);
            }

            for other in pool.iter_mut() {
                if other[col].is_zero() {
                    continue;
                }
                let factor = ring.div_p_pow(&other[col], v).expect("pivot has least valuation");
                for (o, r) in other.iter_mut().zip(&row) {
                    *o = ring.sub(o, &ring.mul(&factor, r));
                }
            }
            if v > 0 {
                let annihilated: Vec<GrElement> = row.iter().map(|c| ring.mul_p_pow(c, a - v)).collect();
                pool.push(annihilated);
            }
            pool.retain(|r| r.iter().any(|c| !c.is_zero()));
            out_rows.push(row);
            pivots.push(Pivot { column: col, valuation: v });
        }
        EchelonBasis { ring, n, rows: out_rows, pivots }
    }

    pub fn ring(&self) -> &Arc<GaloisRing> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<GrElement>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }

    fn row_exponent(&self, pivot: &Pivot) -> u64 {
        self.ring.m() as u64 * (self.ring.a() - pivot.valuation) as u64
    }

    /// `prod_k p^{m (a - v_k)}`.
    pub fn cardinality(&self) -> PrimePower {
        let exp = self.pivots.iter().map(|pv| self.row_exponent(pv)).sum();
        PrimePower::new(self.ring.p(), exp)
    }

    /// Number of codewords supported on coordinates `0..j`.
    pub fn truncated_cardinality(&self, j: usize) -> PrimePower {
        let exp = self
            .pivots
            .iter()
            .filter(|pv| pv.column < j)
            .map(|pv| self.row_exponent(pv))
            .sum();
        PrimePower::new(self.ring.p(), exp)
    }

    pub fn contains(&self, v: &[GrElement]) -> bool {
        if v.len() != self.n {
            return false;
        }
        let ring = &*self.ring;
        let mut rest = v.to_vec();
        for (row, pivot) in self.rows.iter().zip(&self.pivots) {
            if rest[pivot.column + 1..].iter().any(|c| !c.is_zero()) {
                return false;
            }
            let entry = &rest[pivot.column];
            if entry.is_zero() {
                continue;
            }
            let Some(factor) = ring.div_p_pow(entry, pivot.valuation) else {
                return false;
            };
            for (o, r) in rest.iter_mut().zip(row) {
                *o = ring.sub(o, &ring.mul(&factor, r));
            }
        }
        rest.iter().all(|c| c.is_zero())
    }

    /// Coefficients `sum_{k < a - v} p^k t_k` with Teichmüller `t_k`.
    pub fn transversal(&self, valuation: u32) -> Vec<GrElement> {
        let ring = &*self.ring;
        let free = (ring.a() - valuation) as usize;
        let t = ring.teich();
        let mut out = Vec::new();
        let mut idx = vec![0usize; free];
        loop {
            let mut digits: Vec<GrElement> = idx.iter().map(|&k| t[k].clone()).collect();
            digits.resize(ring.a() as usize, ring.zero());
            out.push(ring.from_digits(&TeichDigits { digits }));
            let mut pos = 0;
            loop {
                if pos == free {
                    return out;
                }
                idx[pos] += 1;
                if idx[pos] < t.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Visits every codeword exactly once, refusing codes larger than `budget`.
    pub fn for_each_codeword<F>(&self, budget: u64, mut visit: F) -> Result<()>
    where
        F: FnMut(&[GrElement]),
    {
        let size = self.cardinality();
        if !size.fits_within(budget) {
            return Err(Error::BudgetExceeded { size: size.to_string(), budget });
        }
        let ring = &*self.ring;
        let scaled: Vec<Vec<Vec<GrElement>>> = self
            .rows
            .iter()
            .zip(&self.pivots)
            .map(|(row, pv)| {
                self.transversal(pv.valuation)
                    .iter()
                    .map(|c| row.iter().map(|r| ring.mul(c, r)).collect())
                    .collect()
            })
            .collect();
        let mut partial = vec![vec![ring.zero(); self.n]; scaled.len() + 1];
        walk(ring, &scaled, 0, &mut partial, &mut visit);
        Ok(())
    }

    pub fn codewords(&self, budget: u64) -> Result<Vec<Vec<GrElement>>> {
        let mut out = Vec::new();
        self.for_each_codeword(budget, |c| out.push(c.to_vec()))?;
        Ok(out)
    }
}

fn walk<F: FnMut(&[GrElement])>(
    ring: &GaloisRing,
    scaled: &[Vec<Vec<GrElement>>],
    level: usize,
    partial: &mut [Vec<GrElement>],
    visit: &mut F,
) {
    if level == scaled.len() {
        visit(&partial[level]);
        return;
    }
    for choice in &scaled[level] {
        let (head, tail) = partial.split_at_mut(level + 1);
        for ((dst, src), c) in tail[0].iter_mut().zip(&head[level]).zip(choice) {
            *dst = ring.add(src, c);
        }
        walk(ring, scaled, level + 1, partial, visit);
    }
}

/// Packs a vector of canonical coefficients into machine words for hashing.
pub fn pack(ring: &GaloisRing, v: &[GrElement]) -> Box<[u64]> {
    let bits = 64 - (ring.characteristic() - 1).leading_zeros().min(63);
    let mut words = Vec::new();
    let mut cur = 0u64;
    let mut used = 0u32;
    for c in v.iter().flat_map(|e| e.coeffs()) {
        if used + bits > 64 {
            words.push(cur);
            cur = 0;
            used = 0;
        }
        cur |= c << used;
        used += bits;
    }
    words.push(cur);
    words.into_boxed_slice()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn z(p: u64, a: u32) -> Arc<GaloisRing> {
        Arc::new(GaloisRing::new(p, a, 1, None).unwrap())
    }

    fn ints(r: &GaloisRing, v: &[i64]) -> Vec<GrElement> {
        v.iter().map(|&c| r.from_int(c)).collect()
    }

    #[test]
    fn howell_rows_count_correctly() {
        // span of (2, 1) over Z_4 has 4 elements; span of (2, 2) has 2
        let r = z(2, 2);
        let e = EchelonBasis::from_rows(r.clone(), 2, vec![ints(&r, &[2, 1])]);
        assert_eq!(e.cardinality().exponent(), 2);
        let e = EchelonBasis::from_rows(r.clone(), 2, vec![ints(&r, &[2, 2])]);
        assert_eq!(e.cardinality().exponent(), 1);
        let words = e.codewords(100).unwrap();
        assert_eq!(words.len(), 2);
        // annihilator row: (1, 2) in Z_4^2 spans 4 elements, (2, 0) is inside
        let e = EchelonBasis::from_rows(r.clone(), 2, vec![ints(&r, &[1, 2])]);
        assert!(e.contains(&ints(&r, &[2, 0])));
        assert!(!e.contains(&ints(&r, &[1, 0])));
    }

    #[test]
    fn enumeration_matches_brute_force_span() {
        let r = z(3, 2);
        let gens = vec![ints(&r, &[3, 1, 0]), ints(&r, &[0, 3, 6]), ints(&r, &[1, 1, 3])];
        let e = EchelonBasis::from_rows(r.clone(), 3, gens.clone());
        let mut span = HashSet::new();
        for a in 0..9 {
            for b in 0..9 {
                for c in 0..9 {
                    let v: Vec<GrElement> = (0..3)
                        .map(|k| {
                            r.add(
                                &r.add(&r.scale_int(&gens[0][k], a), &r.scale_int(&gens[1][k], b)),
                                &r.scale_int(&gens[2][k], c),
                            )
                        })
                        .collect();
                    span.insert(pack(&r, &v));
                }
            }
        }
        let words = e.codewords(1 << 20).unwrap();
        let enumerated: HashSet<_> = words.iter().map(|w| pack(&r, w)).collect();
        assert_eq!(enumerated.len(), words.len());
        assert_eq!(enumerated, span);
        assert_eq!(e.cardinality().to_biguint(), (span.len() as u64).into());
        for w in &words {
            assert!(e.contains(w));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let r = z(5, 2);
        let rows: Vec<Vec<GrElement>> = (0..4).map(|k| {
            let mut v = vec![r.zero(); 4];
            v[k] = r.one();
            v
        }).collect();
        let e = EchelonBasis::from_rows(r, 4, rows);
        assert!(matches!(e.for_each_codeword(1000, |_| {}), Err(Error::BudgetExceeded { .. })));
    }
}
