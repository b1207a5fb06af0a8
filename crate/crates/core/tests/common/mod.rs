//! Plain-integer reference arithmetic, independent of the library's ring types.
#![allow(dead_code)]

use consta::GrElement;

/// `Z_q[x] / (x^n - lam)` over machine integers.
#[derive(Clone, Copy, Debug)]
pub struct IntQuotient {
    pub q: i64,
    pub n: usize,
    pub lam: i64,
}

impl IntQuotient {
    pub fn new(q: i64, n: usize, lam: i64) -> Self {
        IntQuotient { q, n, lam: lam.rem_euclid(q) }
    }

    pub fn poly(&self, terms: &[(usize, i64)]) -> Vec<i64> {
        let mut v = vec![0; self.n];
        for &(d, c) in terms {
            v[d] = (v[d] + c).rem_euclid(self.q);
        }
        v
    }

    pub fn one(&self) -> Vec<i64> {
        self.poly(&[(0, 1)])
    }

    pub fn mul(&self, f: &[i64], g: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.n];
        for (i, &a) in f.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in g.iter().enumerate() {
                let mut k = i + j;
                let mut c = a * b % self.q;
                if k >= self.n {
                    k -= self.n;
                    c = c * self.lam % self.q;
                }
                out[k] = (out[k] + c) % self.q;
            }
        }
        out
    }

    pub fn pow(&self, f: &[i64], e: u32) -> Vec<i64> {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, f))
    }

    pub fn shift(&self, f: &[i64], r: usize) -> Vec<i64> {
        self.mul(f, &self.poly(&[(r, 1)]))
    }

    pub fn inner(&self, u: &[i64], v: &[i64]) -> i64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum::<i64>().rem_euclid(self.q)
    }
}

pub fn ints(v: &[GrElement]) -> Vec<i64> {
    v.iter().map(|c| c.coeffs()[0] as i64).collect()
}

pub fn rt(v: &[i64]) -> usize {
    v.iter().rposition(|&c| c != 0).map_or(0, |k| k + 1)
}

pub fn hamming(v: &[i64]) -> usize {
    v.iter().filter(|&&c| c != 0).count()
}

/// Codewords of `<(x^4 - 7)^i>` in `Z_25[x] / (x^20 - lambda)` for `5 <= i <= 10`, built as
/// `5 * h(x) * (x^4 - 2)^{i-5}` over `F_5` with `deg h < 20 - 4(i-5)`; valid for every `lambda`
/// with leading digit 7, since the code is `5` times an ideal of `F_5[x] / ((x^4 - 2)^5)`.
pub fn field_code_z25(i: usize) -> Vec<Vec<i64>> {
    assert!((5..=10).contains(&i));
    let k = i - 5;
    let mut gen = vec![1i64];
    for _ in 0..k {
        let mut next = vec![0i64; gen.len() + 4];
        for (d, &c) in gen.iter().enumerate() {
            next[d + 4] += c;
            next[d] -= 2 * c;
        }
        gen = next;
    }
    let gen: Vec<i64> = gen.iter().map(|c| c.rem_euclid(5)).collect();
    let dim = 20 - 4 * k;
    let mut out = Vec::with_capacity(5usize.pow(dim as u32));
    let mut h = vec![0i64; dim];
    loop {
        let mut v = [0i64; 20];
        for (a, &hc) in h.iter().enumerate() {
            if hc != 0 {
                for (b, &gc) in gen.iter().enumerate() {
                    v[a + b] = (v[a + b] + hc * gc) % 5;
                }
            }
        }
        out.push(v.iter().map(|c| 5 * c % 25).collect());
        let mut pos = 0;
        loop {
            if pos == dim {
                return out;
            }
            h[pos] += 1;
            if h[pos] < 5 {
                break;
            }
            h[pos] = 0;
            pos += 1;
        }
    }
}
