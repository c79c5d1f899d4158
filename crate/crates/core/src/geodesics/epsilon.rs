//! ε-geodesics: `Φ_ss Φ_xx - Φ_sx² = ε ρ` on `[0,1] × [-R, R]` with the
//! endpoints fixed in time and the edge slopes pinned in space.
//!
//! The unknown is the remainder `Ψ = Φ - (1-s) h₀ - s h₁` over the closed-form
//! references `h₀`, `h₁` of the endpoints, whose derivatives enter
//! analytically; this keeps the tail curvature (and so `ερ`) resolved.
//!
//! Unknowns are ordered space-major (all interior times of one node are
//! adjacent), so the Jacobian is banded with half-width `3(m-2)+1` and a
//! banded LU does each Newton step.

use super::legendre::exact_geodesic;
use super::path::{time_grid, GeodesicPath};
use crate::einstein::SolverConfig;
use crate::error::{LabError, Result};
use crate::linalg::BandMatrix;
use crate::radial::diff::{d1_stencil, d2_stencil};
use crate::radial::{ma_density, RadialWeight};

const EDGE_LEFT: [f64; 3] = [-1.5, 2.0, -0.5];
const EDGE_RIGHT: [f64; 3] = [0.5, -2.0, 1.5];

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonGeodesic {
    pub path: GeodesicPath,
    pub eps: f64,
    /// Sup-norm of the discrete equations at the returned iterate.
    pub residual: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

/// Interior x-stencil, the same one weights use: first column, second- and
/// first-derivative weights.
fn x_stencil(i: usize, n: usize) -> (usize, &'static [f64], &'static [f64]) {
    let (d2, d1) = (d2_stencil(i, n), d1_stencil(i, n));
    debug_assert_eq!(d2.start, d1.start);
    (d2.start, d2.coeffs, d1.coeffs)
}

struct Grid2 {
    n: usize,
    m: usize,
    h: f64,
    ds: f64,
    eps: f64,
    rho: Vec<f64>,
    /// reference curvature per time and node
    ref_curv: Vec<Vec<f64>>,
    /// `h₁' - h₀'`, the reference part of `Φ_sx`
    ref_sx: Vec<f64>,
    /// pinned edge slopes of `Ψ` per time
    left: Vec<f64>,
    right: Vec<f64>,
}

impl Grid2 {
    fn mi(&self) -> usize {
        self.m - 2
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.mi() + (j - 1)
    }

    /// `(Φ_ss, Φ_xx, Φ_sx)` at an interior node.
    fn parts(&self, phi: &[Vec<f64>], i: usize, j: usize) -> (f64, f64, f64) {
        let (st, c2, c1) = x_stencil(i, self.n);
        let pss = (phi[j + 1][i] - 2.0 * phi[j][i] + phi[j - 1][i]) / (self.ds * self.ds);
        let pxx: f64 = self.ref_curv[j][i]
            + c2.iter().enumerate().map(|(k, c)| c * phi[j][st + k]).sum::<f64>() / (self.h * self.h);
        let psx: f64 = self.ref_sx[i]
            + c1.iter()
                .enumerate()
                .map(|(k, c)| c * (phi[j + 1][st + k] - phi[j - 1][st + k]))
                .sum::<f64>()
                / (2.0 * self.ds * self.h);
        (pss, pxx, psx)
    }

    fn residual(&self, phi: &[Vec<f64>]) -> Vec<f64> {
        let n = self.n;
        let mut r = vec![0.0; n * self.mi()];
        for j in 1..self.m - 1 {
            let row = &phi[j];
            r[self.idx(0, j)] = EDGE_LEFT.iter().zip(row).map(|(c, v)| c * v).sum::<f64>() / self.h - self.left[j];
            r[self.idx(n - 1, j)] =
                EDGE_RIGHT.iter().zip(&row[n - 3..]).map(|(c, v)| c * v).sum::<f64>() / self.h - self.right[j];
            for i in 1..n - 1 {
                let (pss, pxx, psx) = self.parts(phi, i, j);
                r[self.idx(i, j)] = pss * pxx - psx * psx - self.eps * self.rho[i];
            }
        }
        r
    }

    fn jacobian(&self, phi: &[Vec<f64>]) -> BandMatrix {
        let n = self.n;
        let m = self.m;
        let band = 3 * self.mi() + 1;
        let mut jac = BandMatrix::zeros(n * self.mi(), band, band);
        let interior = |j: usize| j >= 1 && j <= m - 2;
        for j in 1..m - 1 {
            for (k, c) in EDGE_LEFT.iter().enumerate() {
                jac.add(self.idx(0, j), self.idx(k, j), c / self.h);
            }
            for (k, c) in EDGE_RIGHT.iter().enumerate() {
                jac.add(self.idx(n - 1, j), self.idx(n - 3 + k, j), c / self.h);
            }
            for i in 1..n - 1 {
                let r = self.idx(i, j);
                let (pss, pxx, psx) = self.parts(phi, i, j);
                let ss = pxx / (self.ds * self.ds);
                jac.add(r, self.idx(i, j), -2.0 * ss);
                for jj in [j - 1, j + 1] {
                    if interior(jj) {
                        jac.add(r, self.idx(i, jj), ss);
                    }
                }
                let (st, c2, c1) = x_stencil(i, n);
                for (k, c) in c2.iter().enumerate() {
                    jac.add(r, self.idx(st + k, j), pss * c / (self.h * self.h));
                }
                let w = -2.0 * psx / (2.0 * self.ds * self.h);
                for (k, c) in c1.iter().enumerate() {
                    if *c == 0.0 {
                        continue;
                    }
                    if interior(j + 1) {
                        jac.add(r, self.idx(st + k, j + 1), w * c);
                    }
                    if interior(j - 1) {
                        jac.add(r, self.idx(st + k, j - 1), -w * c);
                    }
                }
            }
        }
        jac
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Solves the ε-geodesic equation with `m` time samples, `ρ = φ₀''`,
/// starting from the exact geodesic lowered by `ε s(1-s)/2`.
pub fn epsilon_geodesic(
    phi0: &RadialWeight,
    phi1: &RadialWeight,
    eps: f64,
    m: usize,
    cfg: &SolverConfig,
) -> Result<EpsilonGeodesic> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::OutOfRange(format!("eps = {eps} must be positive")));
    }
    cfg.validate()?;
    let exact = exact_geodesic(phi0, phi1, m)?;
    let g = *phi0.grid();
    let n = g.len();
    let h = g.spacing();
    let times = time_grid(m);
    let edge = |v: &[f64]| {
        (
            EDGE_LEFT.iter().zip(v).map(|(c, x)| c * x).sum::<f64>() / h,
            EDGE_RIGHT.iter().zip(&v[n - 3..]).map(|(c, x)| c * x).sum::<f64>() / h,
        )
    };
    let refs = [phi0.reference(), phi1.reference()];
    let ref_samples: Vec<Vec<f64>> = refs.iter().map(|r| g.sample(|x| r.value(x))).collect();
    let ref_curv: Vec<Vec<f64>> = refs.iter().map(|r| g.sample(|x| r.curvature(x))).collect();
    // pinned total slopes interpolate the endpoints'; Ψ carries what the
    // references do not
    let (l0, r0) = edge(&phi0.samples());
    let (l1, r1) = edge(&phi1.samples());
    let (hl0, hr0) = edge(&ref_samples[0]);
    let (hl1, hr1) = edge(&ref_samples[1]);
    let prob = Grid2 {
        n,
        m,
        h,
        ds: 1.0 / (m - 1) as f64,
        eps,
        rho: ma_density(phi0)?.samples,
        ref_curv: times
            .iter()
            .map(|s| (0..n).map(|i| (1.0 - s) * ref_curv[0][i] + s * ref_curv[1][i]).collect())
            .collect(),
        ref_sx: g.sample(|x| refs[1].slope(x) - refs[0].slope(x)),
        left: times.iter().map(|s| (1.0 - s) * (l0 - hl0) + s * (l1 - hl1)).collect(),
        right: times.iter().map(|s| (1.0 - s) * (r0 - hr0) + s * (r1 - hr1)).collect(),
    };
    // the exact path carries exactly these interpolated references
    let mut phi: Vec<Vec<f64>> = exact
        .weights()
        .iter()
        .zip(&times)
        .map(|(w, s)| {
            let drop = 0.5 * eps * s * (1.0 - s);
            w.remainder().iter().map(|v| v - drop).collect()
        })
        .collect();
    let mut res = prob.residual(&phi);
    let mut norm = sup(&res);
    let mut trace = vec![norm];
    let mut iterations = 0;
    while norm > cfg.tol {
        if iterations >= cfg.max_iter {
            return Err(LabError::Divergence {
                iterations,
                last_residual: norm,
                trace,
            });
        }
        iterations += 1;
        let lu = prob.jacobian(&phi).factor()?;
        let step = lu.solve(&res);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            let mut trial = phi.clone();
            for j in 1..m - 1 {
                for i in 0..n {
                    trial[j][i] -= lambda * step[prob.idx(i, j)];
                }
            }
            let r = prob.residual(&trial);
            let t = sup(&r);
            if t < norm {
                phi = trial;
                res = r;
                norm = t;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        trace.push(norm);
        if !accepted {
            return Err(LabError::Divergence {
                iterations,
                last_residual: norm,
                trace,
            });
        }
    }
    for j in 1..m - 1 {
        for i in 1..n - 1 {
            let (_, pxx, _) = prob.parts(&phi, i, j);
            if !(pxx > 0.0) {
                return Err(LabError::LostConvexity { time: j, node: i });
            }
        }
    }
    let (am, ap) = phi0.slopes();
    let mut weights = Vec::with_capacity(m);
    weights.push(phi0.clone());
    for (j, &s) in times.iter().enumerate().take(m - 1).skip(1) {
        let reference = phi0.reference().scaled(1.0 - s).plus(&phi1.reference().scaled(s));
        weights.push(RadialWeight::from_parts(g, reference, std::mem::take(&mut phi[j]), am, ap)?);
    }
    weights.push(phi1.clone());
    Ok(EpsilonGeodesic {
        path: GeodesicPath::new(weights)?,
        eps,
        residual: norm,
        iterations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Grid;

    #[test]
    fn rejects_zero_eps() {
        let g = Grid::new(10.0, 129).unwrap();
        let fs = RadialWeight::fubini_study(g);
        assert!(matches!(
            epsilon_geodesic(&fs, &fs, 0.0, 9, &SolverConfig::default()),
            Err(LabError::OutOfRange(_))
        ));
    }

    #[test]
    fn constant_shift_stays_near_linear_path() {
        let g = Grid::new(12.0, 241).unwrap();
        let fs = RadialWeight::fubini_study(g);
        let sol = epsilon_geodesic(&fs, &fs.add_constant(1.0), 1e-3, 9, &SolverConfig::default()).unwrap();
        for (j, w) in sol.path.weights().iter().enumerate() {
            let s = sol.path.times()[j];
            assert!((0..g.len()).all(|i| (w.value(i) - fs.value(i) - s).abs() < 2e-3));
        }
    }

    #[test]
    fn small_translation_converges() {
        let g = Grid::new(12.0, 241).unwrap();
        let fs = RadialWeight::fubini_study(g);
        let cfg = SolverConfig::default();
        let sol = epsilon_geodesic(&fs, &fs.translated(-1.0), 1e-2, 9, &cfg).unwrap();
        assert!(sol.residual <= cfg.tol);
        let exact = exact_geodesic(&fs, &fs.translated(-1.0), 9).unwrap();
        let gap = sol
            .path
            .weights()
            .iter()
            .zip(exact.weights())
            .map(|(a, b)| (0..g.len()).fold(0.0f64, |m, i| m.max((a.value(i) - b.value(i)).abs())))
            .fold(0.0, f64::max);
        assert!(gap > 1e-4 && gap < 1e-2, "{gap}");
    }
}
