//! Direct solver for narrow banded linear systems.
//!
//! Gaussian elimination with partial pivoting restricted to the band, as in
//! LAPACK's `gbsv`. Pivoting widens the upper band by `kl`, which the storage
//! reserves up front.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BandedSystem {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row stride: `kl` below, diagonal, `ku + kl` above.
    stride: usize,
    a: Vec<f64>,
    rhs: Vec<f64>,
}

impl BandedSystem {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let stride = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            stride,
            a: vec![0.0; n * stride],
            rhs: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c <= r + self.ku + self.kl);
        r * self.stride + (c + self.kl - r)
    }

    fn in_band(&self, r: usize, c: usize) -> bool {
        r < self.n && c < self.n && c + self.kl >= r && c <= r + self.ku
    }

    /// Accumulate `v` into entry `(r, c)`. Panics outside the declared band.
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        assert!(self.in_band(r, c), "entry ({r}, {c}) outside band");
        let s = self.slot(r, c);
        self.a[s] += v;
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if self.in_band(r, c) {
            self.a[self.slot(r, c)]
        } else {
            0.0
        }
    }

    pub fn set_rhs(&mut self, r: usize, v: f64) {
        self.rhs[r] = v;
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `A x` for the assembled (unfactored) matrix.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.kl);
                let hi = (r + self.ku).min(self.n - 1);
                (lo..=hi).map(|c| self.get(r, c) * x[c]).sum()
            })
            .collect()
    }

    /// Row-wise strict diagonal dominance.
    pub fn diagonally_dominant(&self) -> bool {
        (0..self.n).all(|r| {
            let lo = r.saturating_sub(self.kl);
            let hi = (r + self.ku).min(self.n - 1);
            let off: f64 = (lo..=hi).filter(|&c| c != r).map(|c| self.get(r, c).abs()).sum();
            self.get(r, r).abs() > off
        })
    }

    /// Solve in place and return the solution.
    pub fn solve(mut self) -> Result<Vec<f64>> {
        let n = self.n;
        let reach = self.ku + self.kl;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let mut piv = k;
            let mut best = self.a[self.slot(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.a[self.slot(r, k)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(Error::SingularBand { row: k });
            }
            if piv != k {
                for c in k..=last_col {
                    let (sk, sp) = (self.slot(k, c), self.slot(piv, c));
                    self.a.swap(sk, sp);
                }
                self.rhs.swap(k, piv);
            }
            let pivot = self.a[self.slot(k, k)];
            for r in k + 1..=last_row {
                let srk = self.slot(r, k);
                let f = self.a[srk] / pivot;
                if f == 0.0 {
                    continue;
                }
                self.a[srk] = 0.0;
                for c in k + 1..=last_col {
                    let (src, dst) = (self.slot(k, c), self.slot(r, c));
                    self.a[dst] -= f * self.a[src];
                }
                self.rhs[r] -= f * self.rhs[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let last_col = (k + reach).min(n - 1);
            let mut acc = self.rhs[k];
            for c in k + 1..=last_col {
                acc -= self.a[self.slot(k, c)] * x[c];
            }
            x[k] = acc / self.a[self.slot(k, k)];
        }
        Ok(x)
    }
}
