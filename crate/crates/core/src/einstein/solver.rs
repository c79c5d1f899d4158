//! Damped Newton solver for `φ'' = M e^{-tφ} B / ∫ e^{-tφ} B` on the line.
//!
//! The unknown is the sampled remainder on top of the initial guess's
//! reference profile. Interior rows carry the equation; the first row is the
//! left slope condition (or the barycenter gauge when the equation is
//! translation invariant) and the last row fixes the additive constant. The
//! normalizer couples every node, so the Jacobian is banded plus low rank.

use super::twister::TwisterSpec;
use crate::error::{LabError, Result};
use crate::linalg::{BandMatrix, BandedLowRank};
use crate::radial::density::first_moment_weights;
use crate::radial::diff::{d1_stencil, d2_stencil, quadrature_weights};
use crate::radial::{Grid, RadialWeight};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gauge {
    CenterBarycenter,
    PinValue { x0: f64, value: f64 },
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub gauge: Gauge,
    /// How many times a continuation step may be halved.
    pub max_bisections: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 60,
            max_halvings: 40,
            gauge: Gauge::CenterBarycenter,
            max_bisections: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(LabError::OutOfRange(format!("tol = {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(LabError::OutOfRange("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Converged weight with its certificates.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub weight: RadialWeight,
    /// Sup-norm of all imposed rows at the returned iterate.
    pub residual: f64,
    /// Largest mismatch in the slope conditions that were not imposed.
    pub boundary_defect: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

/// Right-hand side `M e^{-t φ + log_base} / ∫(same)`; `decay` holds the
/// asymptotic decay rates of the integrand at the two ends.
#[derive(Clone, Debug)]
pub(crate) struct Source {
    pub t: f64,
    pub log_base: Vec<f64>,
    pub decay: (f64, f64),
    pub mass: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Anchor {
    Boundary,
    Barycenter(f64),
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Level {
    Offsets(f64),
    Pin(usize, f64),
}

pub(crate) struct Problem {
    grid: Grid,
    template: RadialWeight,
    ref_val: Vec<f64>,
    ref_curv: Vec<f64>,
    // slope deficits of the template's fixed part at the two edges
    ref_def_minus: f64,
    ref_def_plus: f64,
    source: Source,
    anchor: Anchor,
    level: Level,
}

struct State {
    phi: Vec<f64>,
    mu: Vec<f64>,
    w: Vec<f64>,
    decay: (f64, f64),
    f: Vec<f64>,
    norm: f64,
    boundary_defect: f64,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

impl Problem {
    pub fn new(template: &RadialWeight, source: Source, anchor: Anchor, level: Level) -> Self {
        let grid = *template.grid();
        let n = grid.len();
        let h = grid.spacing();
        let r0 = template.remainder();
        let ref_val = (0..n).map(|i| template.value(i) - r0[i]).collect();
        let ref_curv = (0..n)
            .map(|i| template.reference().curvature(grid.x(i)))
            .collect();
        let ref_def_minus = template.deficit_minus(0) - d1_stencil(0, n).apply(r0) / h;
        let ref_def_plus = template.deficit_plus(n - 1) + d1_stencil(n - 1, n).apply(r0) / h;
        Self {
            grid,
            template: template.clone(),
            ref_val,
            ref_curv,
            ref_def_minus,
            ref_def_plus,
            source,
            anchor,
            level,
        }
    }

    fn evaluate(&self, r: &[f64]) -> Result<State> {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let t = self.source.t;
        let m = self.source.mass;
        let phi: Vec<f64> = (0..n).map(|i| self.ref_val[i] + r[i]).collect();
        let curv: Vec<f64> = (0..n)
            .map(|i| self.ref_curv[i] + d2_stencil(i, n).apply(r) / (h * h))
            .collect();
        let ell: Vec<f64> = (0..n).map(|i| -t * phi[i] + self.source.log_base[i]).collect();
        let top = ell.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // average of asymptotic and local decay: second-order accurate tails
        let local_minus = d1_stencil(0, n).apply(&ell) / h;
        let local_plus = -d1_stencil(n - 1, n).apply(&ell) / h;
        let sm = 0.5 * (self.source.decay.0 + local_minus);
        let sp = 0.5 * (self.source.decay.1 + local_plus);
        if !(sm > 0.0 && sp > 0.0) {
            return Err(LabError::NonIntegrable { minus: -sm, plus: sp });
        }
        let q = quadrature_weights(n, h, Some(sm), Some(sp));
        let rho: Vec<f64> = ell.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = rho.iter().zip(&q).map(|(a, b)| a * b).sum();
        let mu: Vec<f64> = rho.iter().map(|p| m * p / z).collect();
        let w: Vec<f64> = rho.iter().zip(&q).map(|(p, qq)| p * qq / z).collect();

        let mut f = vec![0.0; n];
        for i in 1..n - 1 {
            f[i] = curv[i] - mu[i];
        }
        let def_minus = self.ref_def_minus + d1_stencil(0, n).apply(r) / h;
        let def_plus = self.ref_def_plus - d1_stencil(n - 1, n).apply(r) / h;
        let left_bc = def_minus - mu[0] / sm;
        let right_bc = def_plus - mu[n - 1] / sp;
        let boundary_defect = left_bc.abs().max(right_bc.abs());
        f[0] = match self.anchor {
            // the two slope conditions coincide in the continuum; imposing
            // their difference keeps the discrete problem mirror symmetric
            Anchor::Boundary => 0.5 * (left_bc - right_bc),
            Anchor::Barycenter(target) => {
                let c = first_moment_weights(&self.grid, Some(sm), Some(sp));
                c.iter().zip(&curv).map(|(a, b)| a * b).sum::<f64>() / m - target
            }
        };
        f[n - 1] = match self.level {
            Level::Offsets(target) => self.offsets(&phi, &mu, (sm, sp)) - target,
            Level::Pin(k, v) => phi[k] - v,
        };
        let norm = sup(&f);
        Ok(State {
            phi,
            mu,
            w,
            decay: (sm, sp),
            f,
            norm,
            boundary_defect,
        })
    }

    /// Mean of the asymptotic offsets `b-`, `b+`, with the curvature still
    /// to come beyond each edge accounted for.
    fn offsets(&self, phi: &[f64], mu: &[f64], (sm, sp): (f64, f64)) -> f64 {
        let n = phi.len();
        let r = self.grid.x_max();
        let (am, ap) = self.template.slopes();
        let bm = phi[0] + am * r - mu[0] / (sm * sm);
        let bp = phi[n - 1] - ap * r - mu[n - 1] / (sp * sp);
        0.5 * (bm + bp)
    }

    /// Value of the level functional at a given weight on this grid.
    pub fn level_of(&self, weight: &RadialWeight) -> Result<f64> {
        let r: Vec<f64> = (0..self.grid.len())
            .map(|i| weight.value(i) - self.ref_val[i])
            .collect();
        let st = self.evaluate(&r)?;
        Ok(self.offsets(&st.phi, &st.mu, st.decay))
    }

    fn jacobian(&self, st: &State) -> BandedLowRank {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let h2 = h * h;
        let t = self.source.t;
        let mut band = BandMatrix::zeros(n, 3, 3);
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let st2 = d2_stencil(i, n);
            for (k, c) in st2.coeffs.iter().enumerate() {
                band.add(i, st2.start + k, c / h2);
            }
            band.add(i, i, t * st.mu[i]);
            u[i] = -t * st.mu[i];
        }
        let mut updates = Vec::new();
        let (sm, sp) = st.decay;
        match self.anchor {
            Anchor::Boundary => {
                let s1 = d1_stencil(0, n);
                for (k, c) in s1.coeffs.iter().enumerate() {
                    band.add(0, s1.start + k, 0.5 * c / h);
                }
                let (lm, rm) = (t * st.mu[0] / sm, t * st.mu[n - 1] / sp);
                band.add(0, 0, 0.5 * lm);
                u[0] = 0.5 * (rm - lm);
                // right-edge part of the row lies outside the band
                let mut g = vec![0.0; n];
                let s1 = d1_stencil(n - 1, n);
                for (k, c) in s1.coeffs.iter().enumerate() {
                    g[s1.start + k] += 0.5 * c / h;
                }
                g[n - 1] -= 0.5 * rm;
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                updates.push((e, g));
            }
            Anchor::Barycenter(_) => {
                band.set(0, 0, 1.0);
                let c = first_moment_weights(&self.grid, Some(sm), Some(sp));
                let m = self.source.mass;
                let mut g = vec![0.0; n];
                for (i, ci) in c.iter().enumerate() {
                    let st2 = d2_stencil(i, n);
                    for (k, a) in st2.coeffs.iter().enumerate() {
                        g[st2.start + k] += ci * a / (h2 * m);
                    }
                }
                g[0] -= 1.0;
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                updates.push((e, g));
            }
        }
        if t != 0.0 {
            updates.push((u, st.w.clone()));
        }
        band.set(n - 1, n - 1, 1.0);
        let mut g = vec![0.0; n];
        match self.level {
            Level::Offsets(_) => {
                let cm = t * st.mu[0] / (2.0 * sm * sm);
                let cp = t * st.mu[n - 1] / (2.0 * sp * sp);
                for (gj, wj) in g.iter_mut().zip(&st.w) {
                    *gj = -(cm + cp) * wj;
                }
                g[0] += 0.5 + cm;
                g[n - 1] += 0.5 + cp;
            }
            Level::Pin(k, _) => g[k] += 1.0,
        }
        g[n - 1] -= 1.0;
        let mut e = vec![0.0; n];
        e[n - 1] = 1.0;
        updates.push((e, g));
        BandedLowRank { band, updates }
    }

    pub fn solve(&self, init: &[f64], cfg: &SolverConfig) -> Result<Solution> {
        cfg.validate()?;
        let mut r = init.to_vec();
        let mut st = self.evaluate(&r)?;
        let mut trace = vec![st.norm];
        let mut iterations = 0;
        while !(st.norm <= cfg.tol) {
            if iterations >= cfg.max_iter || !st.norm.is_finite() {
                return Err(LabError::Divergence {
                    iterations,
                    last_residual: st.norm,
                    trace,
                });
            }
            iterations += 1;
            let rhs: Vec<f64> = st.f.iter().map(|v| -v).collect();
            let step = self.jacobian(&st).solve(&rhs)?;
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=cfg.max_halvings {
                let trial: Vec<f64> = r.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
                if let Ok(ts) = self.evaluate(&trial) {
                    if ts.norm < st.norm {
                        accepted = Some((trial, ts));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((nr, ns)) => {
                    r = nr;
                    st = ns;
                    trace.push(st.norm);
                }
                None => {
                    return Err(LabError::Divergence {
                        iterations,
                        last_residual: st.norm,
                        trace,
                    })
                }
            }
        }
        // One polishing step: near the tolerance the error still dwarfs the
        // exponentially small tail curvature, which must stay nonnegative.
        if iterations > 0 && st.norm > 0.0 {
            let rhs: Vec<f64> = st.f.iter().map(|v| -v).collect();
            if let Ok(step) = self.jacobian(&st).solve(&rhs) {
                let trial: Vec<f64> = r.iter().zip(&step).map(|(a, d)| a + d).collect();
                if let Ok(ts) = self.evaluate(&trial) {
                    if ts.norm < st.norm {
                        r = trial;
                        st = ts;
                        trace.push(st.norm);
                    }
                }
            }
        }
        Ok(Solution {
            weight: self.template.with_new_remainder(r),
            residual: st.norm,
            boundary_defect: st.boundary_defect,
            iterations,
            trace,
        })
    }
}

/// Source of the twisted KE equation `φ'' = M e^{-φ-w}/∫e^{-φ-w}`.
pub(crate) fn ke_source(tw: &TwisterSpec, phi: &RadialWeight) -> Source {
    let (am, ap) = phi.slopes();
    let (wm, wp) = tw.weight.slopes();
    Source {
        t: 1.0,
        log_base: tw.weight.samples().iter().map(|v| -v).collect(),
        decay: (-(am + wm), ap + wp),
        mass: tw.mass_m,
    }
}

pub(crate) fn check_class(tw: &TwisterSpec, init: &RadialWeight) -> Result<()> {
    if tw.weight.grid() != init.grid() {
        return Err(LabError::GridMismatch);
    }
    let (am, ap) = init.slopes();
    let half = 0.5 * tw.mass_m;
    if (ap - half).abs() > 1e-9 || (am + half).abs() > 1e-9 {
        return Err(LabError::SlopeMismatch(am, ap, -half, half));
    }
    init.check_convex(false)
}

pub(crate) fn gauge_rows(grid: &Grid, degenerate: bool, cfg: &SolverConfig, center: f64, level: f64) -> Result<(Anchor, Level)> {
    let lvl = match cfg.gauge {
        Gauge::PinValue { x0, value } => {
            if x0.abs() > grid.x_max() {
                return Err(LabError::OutOfRange(format!("pin point {x0} lies outside the grid")));
            }
            Level::Pin(grid.nearest(x0), value)
        }
        _ => Level::Offsets(level),
    };
    let anchor = if degenerate {
        match cfg.gauge {
            Gauge::CenterBarycenter => Anchor::Barycenter(center),
            _ => return Err(LabError::GaugeRequired),
        }
    } else {
        Anchor::Boundary
    };
    Ok((anchor, lvl))
}

pub(crate) fn solve_ke_centered(tw: &TwisterSpec, init: &RadialWeight, cfg: &SolverConfig, center: f64) -> Result<Solution> {
    check_class(tw, init)?;
    let (anchor, level) = gauge_rows(init.grid(), tw.is_translation_degenerate(), cfg, center, 0.0)?;
    let problem = Problem::new(init, ke_source(tw, init), anchor, level);
    problem.solve(init.remainder(), cfg)
}

/// Twisted KE solve: `φ'' = M e^{-φ-w} / ∫ e^{-φ-w}` with slopes `±M/2`.
pub fn solve_twisted_ke(tw: &TwisterSpec, init: &RadialWeight, cfg: &SolverConfig) -> Result<Solution> {
    solve_ke_centered(tw, init, cfg, 0.0)
}

/// Sup-norm of the KE residual `φ'' - M e^{-τ}/∫e^{-τ}` of a given weight.
pub fn ke_residual(tw: &TwisterSpec, phi: &RadialWeight) -> Result<f64> {
    let dv = crate::functionals::ding_first_variation(phi, tw)?;
    Ok(dv.sup_norm() * phi.degree())
}
