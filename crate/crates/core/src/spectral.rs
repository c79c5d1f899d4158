//! Weighted Laplacian `□_τ` in divergence form,
//! `e^{-τ} □_τ u = -((e^{-τ}/τ'') u')'`, its low spectrum, the Futaki
//! quantities `δ_τ` and `k`, and holomorphic-field extraction.
//!
//! The stiffness form uses a sixth-order staggered derivative at half nodes,
//! so `a = Dᵀ P D` is symmetric, kills constants exactly, and has bandwidth 5.

use crate::einstein::TwisterSpec;
use crate::error::{LabError, Result};
use crate::linalg::BandMatrix;
use crate::radial::density::volume_decays;
use crate::radial::diff::{edge_weight, first_derivative, integrate, quadrature_weights};
use crate::radial::{Grid, RadialWeight};
use nalgebra::{DMatrix, SymmetricEigen};

// staggered first derivative at i + 1/2 from differences over 1, 3, 5 half steps
const STAG_6: [f64; 3] = [75.0 / 64.0, -25.0 / 384.0, 3.0 / 640.0];
const STAG_4: [f64; 2] = [9.0 / 8.0, -1.0 / 24.0];
// midpoint interpolation weights
const MID_6: [f64; 3] = [150.0 / 256.0, -25.0 / 256.0, 3.0 / 256.0];
const MID_4: [f64; 2] = [9.0 / 16.0, -1.0 / 16.0];

/// Staggered derivative row at half node `j + 1/2` (unscaled by `h`):
/// first column and coefficients.
fn stagger_row(j: usize, n: usize) -> (usize, Vec<f64>) {
    let c = stagger_coeffs(j, n);
    let m = c.len();
    let start = j + 1 - m;
    let mut row = vec![0.0; 2 * m];
    for (k, ck) in c.iter().enumerate() {
        row[m - 1 - k] -= ck;
        row[m + k] += ck;
    }
    (start, row)
}

fn stagger_coeffs(j: usize, n: usize) -> &'static [f64] {
    match j.min(n - 2 - j) {
        r if r >= 2 => &STAG_6,
        1 => &STAG_4,
        _ => &[1.0],
    }
}

/// `(Du)_{j+1/2} h`, built from differences so constants give exactly 0.
fn stagger_diff(u: &[f64], j: usize) -> f64 {
    stagger_coeffs(j, u.len())
        .iter()
        .enumerate()
        .map(|(k, c)| c * (u[j + 1 + k] - u[j - k]))
        .sum()
}

fn midpoint(f: &[f64], j: usize) -> f64 {
    let n = f.len();
    let reach = j.min(n - 2 - j);
    let w: &[f64] = match reach {
        r if r >= 2 => &MID_6,
        1 => &MID_4,
        _ => &[0.5],
    };
    w.iter()
        .enumerate()
        .map(|(k, wk)| wk * (f[j - k] + f[j + 1 + k]))
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Discrete forms `a(u, v) = ∫ u' v' e^{-τ}/τ''` and `b(u, v) = ∫ u v e^{-τ}`.
///
/// The forms live on the window of nodes where `τ''` is resolved above
/// rounding noise; beyond it `u` is taken constant and `e^{-τ}` exponential.
#[derive(Clone, Debug)]
pub struct WeightedForms {
    grid: Grid,
    lo: usize,
    hi: usize,
    /// `e^{-τ}/τ''` at the window's half nodes.
    half_p: Vec<f64>,
    /// Diagonal of `b` on the window, tail masses folded into the ends.
    mass: Vec<f64>,
    stiffness: BandMatrix,
}

fn stiffness_from(half_p: &[f64], n: usize, h: f64) -> BandMatrix {
    let mut a = BandMatrix::zeros(n, 5, 5);
    for (j, p) in half_p.iter().enumerate() {
        let (start, row) = stagger_row(j, n);
        let w = p / h;
        for (k, rk) in row.iter().enumerate() {
            for (l, rl) in row.iter().enumerate() {
                a.add(start + k, start + l, w * rk * rl);
            }
        }
    }
    a
}

fn staggered_form(half_p: &[f64], h: f64, u: &[f64], v: &[f64]) -> f64 {
    half_p
        .iter()
        .enumerate()
        .map(|(j, p)| p * stagger_diff(u, j) * stagger_diff(v, j) / h)
        .sum()
}

fn half_weights(log_p: &[f64]) -> Vec<f64> {
    (0..log_p.len() - 1).map(|j| midpoint(log_p, j).exp()).collect()
}

pub const MIN_WINDOW: usize = 129;

/// Largest run of resolved nodes containing the grid center.
fn resolved_window(resolved: &[bool], center: usize) -> Result<(usize, usize)> {
    if !resolved[center] {
        return Err(LabError::NotConvex { nodes: vec![center] });
    }
    let mut lo = center;
    while lo > 0 && resolved[lo - 1] {
        lo -= 1;
    }
    let mut hi = center;
    while hi + 1 < resolved.len() && resolved[hi + 1] {
        hi += 1;
    }
    if hi - lo + 1 < MIN_WINDOW {
        return Err(LabError::InvalidInput(format!(
            "curvature resolved on only {} nodes",
            hi - lo + 1
        )));
    }
    Ok((lo, hi))
}

/// Builds the discrete forms of `□_τ`.
pub fn weighted_laplacian_form(tau: &RadialWeight) -> Result<WeightedForms> {
    let grid = *tau.grid();
    let n = grid.len();
    let h = grid.spacing();
    let curv = tau.second_derivative();
    let interior_bad: Vec<usize> = (1..n - 1).filter(|&i| !(curv[i] > -tau.curvature_floor())).collect();
    if !interior_bad.is_empty() {
        return Err(LabError::NotConvex { nodes: interior_bad });
    }
    let (lo, hi) = resolved_window(&tau.resolved_nodes(), grid.center())?;
    let vals = tau.samples();
    let log_p: Vec<f64> = (lo..=hi).map(|i| -vals[i] - curv[i].ln()).collect();
    let half_p = half_weights(&log_p);
    let (full_minus, full_plus) = volume_decays(tau)?;
    let slope = tau.first_derivative();
    let decay_minus = if lo == 0 { full_minus } else { -slope[lo] };
    let decay_plus = if hi == n - 1 { full_plus } else { slope[hi] };
    let m = hi - lo + 1;
    let mut mass: Vec<f64> = (lo..=hi).map(|i| (-vals[i]).exp() * h).collect();
    mass[0] *= edge_weight(h, Some(decay_minus)) / h;
    mass[m - 1] *= edge_weight(h, Some(decay_plus)) / h;
    if mass.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(LabError::InvalidInput("non-positive mass entry in the weighted form".into()));
    }
    Ok(WeightedForms {
        grid,
        lo,
        hi,
        stiffness: stiffness_from(&half_p, m, h),
        half_p,
        mass,
    })
}

impl WeightedForms {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// First and last node of the resolved window.
    pub fn window(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    fn restrict<'a>(&self, u: &'a [f64]) -> &'a [f64] {
        &u[self.lo..=self.hi]
    }

    /// Sum over half nodes of `p (Du)(Dv) h`; exactly zero on constants.
    pub fn a(&self, u: &[f64], v: &[f64]) -> f64 {
        staggered_form(&self.half_p, self.grid.spacing(), self.restrict(u), self.restrict(v))
    }

    pub fn b(&self, u: &[f64], v: &[f64]) -> f64 {
        window_b(&self.mass, self.restrict(u), self.restrict(v))
    }

    /// `∫ e^{-τ}`
    pub fn volume(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `∫ u e^{-τ} / ∫ e^{-τ}`
    pub fn mean(&self, u: &[f64]) -> f64 {
        dot(self.restrict(u), &self.mass) / self.volume()
    }

    /// `π_⊥ u = u - mean(u)`
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        let m = self.mean(u);
        u.iter().map(|v| v - m).collect()
    }

    /// Window values continued as constants to the whole grid.
    fn extend(&self, w: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        (0..n).map(|i| w[i.clamp(self.lo, self.hi) - self.lo]).collect()
    }
}

fn window_b(mass: &[f64], u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).zip(mass).map(|((x, y), m)| x * y * m).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPair {
    pub eigenvalue: f64,
    /// `b`-normalized, `b`-orthogonal to constants.
    pub eigenfunction: Vec<f64>,
    /// `|a(u,u)/b(u,u) - λ|`
    pub rayleigh_residual: f64,
    /// `sup|a u - λ b u| / sup|b u|`
    pub equation_residual: f64,
}

const SHIFT: f64 = -0.5;

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Smallest `count` eigenvalues of `a u = λ b u` on functions with zero
/// `b`-mean, by shifted block inverse iteration with Rayleigh–Ritz.
pub fn lowest_spectrum(tau: &RadialWeight, count: usize) -> Result<Vec<SpectralPair>> {
    let forms = weighted_laplacian_form(tau)?;
    lowest_spectrum_of(&forms, count)
}

pub fn lowest_spectrum_of(forms: &WeightedForms, count: usize) -> Result<Vec<SpectralPair>> {
    if count == 0 {
        return Err(LabError::InvalidInput("count must be at least 1".into()));
    }
    let m = forms.mass.len();
    let vol = forms.volume();
    let deflate = |v: &mut [f64]| {
        let mean = dot(v, &forms.mass) / vol;
        for x in v.iter_mut() {
            *x -= mean;
        }
    };
    let times_b = |v: &[f64]| -> Vec<f64> { v.iter().zip(&forms.mass).map(|(a, w)| a * w).collect() };
    let block = count + 4;
    let mut shifted = forms.stiffness.clone();
    for (i, w) in forms.mass.iter().enumerate() {
        shifted.add(i, i, -SHIFT * w);
    }
    let lu = shifted.factor()?;
    let mut y: Vec<Vec<f64>> = (1..=block)
        .map(|k| {
            (0..m)
                .map(|i| (k as f64 * std::f64::consts::PI * i as f64 / (m - 1) as f64).cos())
                .collect()
        })
        .collect();
    let mut values = vec![0.0; block];
    let mut converged = false;
    for _ in 0..2000 {
        let x: Vec<Vec<f64>> = y
            .iter()
            .map(|v| {
                let mut s = lu.solve(&times_b(v));
                deflate(&mut s);
                s
            })
            .collect();
        // Rayleigh–Ritz on span(x)
        let ax: Vec<Vec<f64>> = x.iter().map(|v| forms.stiffness.matvec(v)).collect();
        let mut ak = DMatrix::<f64>::zeros(block, block);
        let mut bk = DMatrix::<f64>::zeros(block, block);
        for i in 0..block {
            for j in 0..=i {
                let a = 0.5 * (dot(&ax[i], &x[j]) + dot(&ax[j], &x[i]));
                let b = window_b(&forms.mass, &x[i], &x[j]);
                ak[(i, j)] = a;
                ak[(j, i)] = a;
                bk[(i, j)] = b;
                bk[(j, i)] = b;
            }
        }
        let chol = bk
            .cholesky()
            .ok_or_else(|| LabError::Singular("iteration block lost rank".into()))?;
        let linv = chol.l().try_inverse().ok_or_else(|| LabError::Singular("Ritz basis".into()))?;
        let c = &linv * ak * linv.transpose();
        let c = 0.5 * (&c + c.transpose());
        let eig = SymmetricEigen::new(c);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
        let coef = linv.transpose() * &eig.eigenvectors;
        y = order
            .iter()
            .map(|&k| {
                let mut v = vec![0.0; m];
                for (j, xj) in x.iter().enumerate() {
                    let cjk = coef[(j, k)];
                    for (vi, xi) in v.iter_mut().zip(xj) {
                        *vi += cjk * xi;
                    }
                }
                v
            })
            .collect();
        values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let done = (0..count).all(|k| {
            let bv = times_b(&y[k]);
            let av = forms.stiffness.matvec(&y[k]);
            let res: Vec<f64> = av.iter().zip(&bv).map(|(a, b)| a - values[k] * b).collect();
            sup(&res) <= 1e-9 * (1.0 + values[k].abs()) * sup(&bv)
        });
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LabError::Singular("inverse iteration did not converge".into()));
    }
    let h = forms.grid.spacing();
    Ok((0..count)
        .map(|k| {
            let mut u = y[k].clone();
            let norm = window_b(&forms.mass, &u, &u).sqrt();
            let moment: f64 = u.iter().zip(&forms.mass).enumerate().map(|(i, (a, w))| a * i as f64 * w).sum();
            let sign = if moment.abs() > 1e-8 {
                moment.signum()
            } else {
                u[m / 2].signum()
            };
            let sign = if sign == 0.0 { 1.0 } else { sign };
            for v in u.iter_mut() {
                *v *= sign / norm;
            }
            let lambda = values[k];
            let av = forms.stiffness.matvec(&u);
            let bv = times_b(&u);
            let res: Vec<f64> = av.iter().zip(&bv).map(|(a, b)| a - lambda * b).collect();
            let a = staggered_form(&forms.half_p, h, &u, &u);
            SpectralPair {
                eigenvalue: lambda,
                rayleigh_residual: (a / window_b(&forms.mass, &u, &u) - lambda).abs(),
                equation_residual: sup(&res) / sup(&bv),
                eigenfunction: forms.extend(&u),
            }
        })
        .collect())
}

/// `sup|u/c - t| / sup|t|` with `c` the least-squares scale of `u` onto `t`.
pub fn scaled_match_error(u: &[f64], t: &[f64]) -> f64 {
    let tt = dot(t, t);
    let top = sup(t);
    if tt == 0.0 || top == 0.0 {
        return f64::INFINITY;
    }
    let c = dot(u, t) / tt;
    if c == 0.0 {
        return f64::INFINITY;
    }
    u.iter().zip(t).fold(0.0f64, |m, (a, b)| m.max((a / c - b).abs())) / top
}

pub fn spectrum_csv(pairs: &[SpectralPair]) -> String {
    let mut out = String::from("index,lambda,rayleigh_residual\n");
    for (i, p) in pairs.iter().enumerate() {
        out.push_str(&format!("{},{:.12e},{:.3e}\n", i + 1, p.eigenvalue, p.rayleigh_residual));
    }
    out
}

fn check_len(grid: &Grid, u: &[f64]) -> Result<()> {
    if u.len() != grid.len() {
        return Err(LabError::InvalidInput(format!(
            "{} samples for a {}-node grid",
            u.len(),
            grid.len()
        )));
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(LabError::InvalidInput("non-finite samples".into()));
    }
    Ok(())
}

/// `δ_τ(u) = a(u, u) - b(π_⊥u, π_⊥u)`; nonnegative at KE weights.
pub fn delta_tau(tau: &RadialWeight, u: &[f64]) -> Result<f64> {
    check_len(tau.grid(), u)?;
    let forms = weighted_laplacian_form(tau)?;
    Ok(delta_tau_with(&forms, u))
}

pub fn delta_tau_with(forms: &WeightedForms, u: &[f64]) -> f64 {
    let p = forms.project(u);
    forms.a(u, u) - forms.b(&p, &p)
}

/// `δ_τ(u)` by direct nodal quadrature, with `u'` from centered differences
/// and `1/τ''` at the nodes; an independent check on the staggered forms
/// over the same window.
pub fn delta_tau_direct(tau: &RadialWeight, u: &[f64]) -> Result<f64> {
    check_len(tau.grid(), u)?;
    let forms = weighted_laplacian_form(tau)?;
    let (lo, hi) = forms.window();
    let h = tau.grid().spacing();
    let curv = tau.second_derivative();
    let vals = tau.samples();
    let du = first_derivative(u, h);
    let integrand: Vec<f64> = (lo..=hi).map(|i| du[i] * du[i] * (-vals[i]).exp() / curv[i]).collect();
    let a = integrate(&integrand, &quadrature_weights(integrand.len(), h, None, None));
    let p = forms.project(u);
    Ok(a - forms.b(&p, &p))
}

/// `k = ∫ (u'^2/φ'' - u'^2/τ'') e^{-τ}`, nonnegative when `τ'' >= φ''`.
pub fn k_gap(phi: &RadialWeight, tau: &RadialWeight, u: &[f64]) -> Result<f64> {
    if phi.grid() != tau.grid() {
        return Err(LabError::GridMismatch);
    }
    check_len(tau.grid(), u)?;
    let cphi = phi.second_derivative();
    let ctau = tau.second_derivative();
    let floor = phi.curvature_floor().max(tau.curvature_floor());
    let bad: Vec<usize> = (0..cphi.len()).filter(|&i| ctau[i] < cphi[i] - floor).collect();
    if !bad.is_empty() {
        return Err(LabError::NotConvex { nodes: bad });
    }
    if phi == tau {
        return Ok(0.0);
    }
    let forms = weighted_laplacian_form(tau)?;
    let (tlo, thi) = forms.window();
    // where φ'' is lost in rounding the weight e^{-τ} is negligible
    let mut resolved = phi.resolved_nodes();
    resolved.iter_mut().enumerate().for_each(|(i, r)| *r &= (tlo..=thi).contains(&i));
    let (lo, hi) = resolved_window(&resolved, tau.grid().center())?;
    let vals = tau.samples();
    let lp_phi: Vec<f64> = (lo..=hi).map(|i| -vals[i] - cphi[i].ln()).collect();
    let diff: Vec<f64> = half_weights(&lp_phi)
        .iter()
        .zip(&forms.half_p[lo - tlo..])
        .map(|(a, b)| a - b)
        .collect();
    Ok(staggered_form(&diff, tau.grid().spacing(), &u[lo..=hi], &u[lo..=hi]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldReport {
    /// Best constant `c` in `u'/τ'' ≈ c`, i.e. `V = c z ∂/∂z`.
    pub coefficient: f64,
    /// `sup |u'/τ'' - c| e^{-τ}/max e^{-τ}` over the resolved window.
    pub defect: f64,
}

pub fn extract_field(phi_dot: &[f64], tau: &RadialWeight) -> Result<FieldReport> {
    check_len(tau.grid(), phi_dot)?;
    let forms = weighted_laplacian_form(tau)?;
    let (lo, hi) = forms.window();
    let curv = tau.second_derivative();
    let du = first_derivative(phi_dot, tau.grid().spacing());
    let w: Vec<f64> = (lo..=hi).map(|i| du[i] / curv[i]).collect();
    let c = dot(&w, &forms.mass) / forms.volume();
    let vals = tau.samples();
    let rho: Vec<f64> = (lo..=hi).map(|i| (-vals[i]).exp()).collect();
    let rho_max = rho.iter().copied().fold(0.0, f64::max);
    let defect = w
        .iter()
        .zip(&rho)
        .map(|(wi, r)| (wi - c).abs() * r / rho_max)
        .fold(0.0, f64::max);
    Ok(FieldReport { coefficient: c, defect })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelVerdict {
    Annihilates,
    Contradiction,
    Inconclusive,
}

impl KernelVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelVerdict::Annihilates => "field annihilates twister",
            KernelVerdict::Contradiction => "contradiction: field must vanish",
            KernelVerdict::Inconclusive => "inconclusive",
        }
    }
}

pub const POSITIVITY_LEVEL: f64 = 1e-8;
pub const POSITIVITY_RUN: usize = 5;

/// Whether `chi` is strictly positive on a window of consecutive nodes.
pub fn positive_window(chi: &[f64]) -> bool {
    let mut run = 0;
    for &c in chi {
        run = if c > POSITIVITY_LEVEL { run + 1 } else { 0 };
        if run >= POSITIVITY_RUN {
            return true;
        }
    }
    false
}

/// Radial form of `X^α θ_{αβ̄} = 0`: `c · chi ≡ 0`.
pub fn twister_kernel_check(field: &FieldReport, tw: &TwisterSpec) -> KernelVerdict {
    let c = field.coefficient;
    let worst = tw.chi.samples.iter().fold(0.0f64, |m, x| m.max((c * x).abs()));
    if worst <= 1e-10 {
        KernelVerdict::Annihilates
    } else if c != 0.0 && positive_window(&tw.chi.samples) {
        KernelVerdict::Contradiction
    } else {
        KernelVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(40.0, 4097).unwrap()
    }

    #[test]
    fn staggered_rows_differentiate_exactly() {
        let n = 20;
        for j in 0..n - 1 {
            let (start, row) = stagger_row(j, n);
            // derivative of x at j + 1/2 with unit spacing
            let d: f64 = row.iter().enumerate().map(|(k, r)| r * (start + k) as f64).sum();
            assert!((d - 1.0).abs() < 1e-14, "{j}");
            let c: f64 = row.iter().sum();
            assert!(c.abs() < 1e-15);
        }
    }

    #[test]
    fn fubini_study_forms() {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let forms = weighted_laplacian_form(&fs).unwrap();
        let one = vec![1.0; g.len()];
        assert_eq!(forms.a(&one, &one), 0.0);
        assert!((forms.b(&one, &one) - 1.0).abs() < 1e-12);
        let u = g.sample(|x| (0.5 * x).tanh());
        assert!((forms.a(&u, &u) - 1.0 / 3.0).abs() < 1e-6);
        assert!((forms.b(&u, &u) - 1.0 / 3.0).abs() < 1e-6);
        assert!(delta_tau(&fs, &u).unwrap().abs() < 1e-7);
        assert_eq!(delta_tau(&fs, &one).unwrap(), 0.0);
    }

    #[test]
    fn fubini_study_spectrum() {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let pairs = lowest_spectrum(&fs, 3).unwrap();
        assert!((pairs[0].eigenvalue - 1.0).abs() < 1e-5, "{}", pairs[0].eigenvalue);
        assert!(pairs[1].eigenvalue - pairs[0].eigenvalue >= 0.1);
        let u = &pairs[0].eigenfunction;
        let err = scaled_match_error(u, &g.sample(|x| (0.5 * x).tanh()));
        assert!(err < 1e-3, "{err}");
        assert!(pairs.iter().all(|p| p.rayleigh_residual < 1e-8));
    }

    #[test]
    fn k_gap_background() {
        let g = grid();
        let phi = RadialWeight::scaled_background(0.5, g);
        let tau = RadialWeight::fubini_study(g);
        let u = g.sample(|x| (0.5 * x).tanh());
        let k = k_gap(&phi, &tau, &u).unwrap();
        let a = weighted_laplacian_form(&tau).unwrap().a(&u, &u);
        assert!((k - a).abs() < 1e-10, "{k} {a}");
        assert_eq!(k_gap(&tau, &tau, &u).unwrap(), 0.0);
        assert!(k_gap(&tau, &phi, &u).is_err());
    }

    #[test]
    fn field_extraction() {
        let g = grid();
        let fb = RadialWeight::football(0.5, g).unwrap();
        let tp = fb.first_derivative();
        let f = extract_field(&tp, &fb).unwrap();
        assert!((f.coefficient - 1.0).abs() < 1e-6 && f.defect < 1e-6);
        let c = extract_field(&vec![3.0; g.len()], &fb).unwrap();
        assert!(c.coefficient.abs() < 1e-10 && c.defect <= 1e-10);
        let t = extract_field(&g.sample(|x| (0.5 * x).tanh()), &fb).unwrap();
        assert!(t.defect > 0.1);
    }

    #[test]
    fn kernel_verdicts() {
        let g = grid();
        let smooth = TwisterSpec::smooth_background(0.5, g).unwrap();
        let cone = TwisterSpec::conical(0.5, g).unwrap();
        let zero = FieldReport { coefficient: 0.0, defect: 0.0 };
        let one = FieldReport { coefficient: 1.0, defect: 0.0 };
        assert_eq!(twister_kernel_check(&zero, &smooth), KernelVerdict::Annihilates);
        assert_eq!(twister_kernel_check(&one, &smooth), KernelVerdict::Contradiction);
        assert_eq!(twister_kernel_check(&one, &cone), KernelVerdict::Annihilates);
    }
}
