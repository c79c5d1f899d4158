//! Banded LU with partial pivoting, and Woodbury solves for banded plus
//! low-rank systems.

use crate::error::{LabError, Result};
use nalgebra::{DMatrix, DVector};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku`; the extra `kl` columns
/// hold fill-in from row interchanges during factorization.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let k = self.offset(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let k = self.offset(i, j);
        self.data[k] = v;
    }

    /// Zero row `i` inside the band.
    pub fn clear_row(&mut self, i: usize) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            self.set(i, j, 0.0);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.offset(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let reach = kl + self.ku;
        let mut piv = vec![0usize; n];
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.offset(k, k)].abs();
            for i in k + 1..=last {
                let v = self.data[self.offset(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > scale * 1e-300) || !best.is_finite() {
                return Err(LabError::Singular(format!("zero pivot in column {k}")));
            }
            piv[k] = p;
            let hi = (k + reach).min(n - 1);
            if p != k {
                for j in k..=hi {
                    let a = self.offset(k, j);
                    let b = self.offset(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.offset(k, k)];
            let urow_start = self.offset(k, k);
            let len = hi - k + 1;
            for i in k + 1..=last {
                let lik_at = self.offset(i, k);
                let l = self.data[lik_at] / pivot;
                self.data[lik_at] = l;
                if l == 0.0 {
                    continue;
                }
                let row_start = self.offset(i, k);
                // rows k and i are both contiguous over columns k..=hi
                let (head, tail) = self.data.split_at_mut(row_start);
                let urow = &head[urow_start..urow_start + len];
                let irow = &mut tail[..len];
                for (a, u) in irow[1..].iter_mut().zip(&urow[1..]) {
                    *a -= l * u;
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }
}

/// LU factors of a band matrix.
#[derive(Clone, Debug)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = &self.m;
        let n = m.n;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + m.kl).min(n - 1) {
                    x[i] -= m.data[m.offset(i, k)] * xk;
                }
            }
        }
        let reach = m.kl + m.ku;
        for i in (0..n).rev() {
            let hi = (i + reach).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= m.data[m.offset(i, j)] * x[j];
            }
            x[i] = s / m.data[m.offset(i, i)];
        }
        x
    }
}

/// `B + Σ u_k v_kᵀ` with `B` banded.
#[derive(Clone, Debug)]
pub struct BandedLowRank {
    pub band: BandMatrix,
    pub updates: Vec<(Vec<f64>, Vec<f64>)>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl BandedLowRank {
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.band.matvec(x);
        for (u, v) in &self.updates {
            let s = dot(v, x);
            for (yi, ui) in y.iter_mut().zip(u) {
                *yi += ui * s;
            }
        }
        y
    }

    /// Woodbury solve with a few rounds of iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let lu = self.band.clone().factor()?;
        let k = self.updates.len();
        let z: Vec<Vec<f64>> = self.updates.iter().map(|(u, _)| lu.solve(u)).collect();
        let mut cap = DMatrix::<f64>::identity(k, k);
        for (a, (_, v)) in self.updates.iter().enumerate() {
            for (c, zc) in z.iter().enumerate() {
                cap[(a, c)] += dot(v, zc);
            }
        }
        let cap_lu = cap.lu();
        let apply = |rhs: &[f64]| -> Result<Vec<f64>> {
            let mut y = lu.solve(rhs);
            if k > 0 {
                let t = DVector::from_iterator(k, self.updates.iter().map(|(_, v)| dot(v, &y)));
                let c = cap_lu
                    .solve(&t)
                    .ok_or_else(|| LabError::Singular("capacitance matrix".into()))?;
                for (zc, cc) in z.iter().zip(c.iter()) {
                    for (yi, zi) in y.iter_mut().zip(zc) {
                        *yi -= cc * zi;
                    }
                }
            }
            Ok(y)
        };
        let mut x = apply(b)?;
        let bnorm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for _ in 0..3 {
            let ax = self.matvec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let rnorm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(rnorm > 1e-14 * bnorm) {
                break;
            }
            let dx = apply(&r)?;
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Singular("non-finite solution".into()));
        }
        Ok(x)
    }
}
