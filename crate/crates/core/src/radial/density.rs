use super::diff::{self, quadrature_weights};
use super::grid::Grid;
use super::weight::RadialWeight;
use crate::error::{LabError, Result};

/// Sampled density with its total mass (grid quadrature plus tails).
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub grid: Grid,
    pub samples: Vec<f64>,
    pub mass: f64,
}

impl Density {
    /// Mass from trapezoid plus exponential tails measured off the samples.
    pub fn from_decaying(grid: Grid, samples: Vec<f64>) -> Self {
        let mass = diff::integrate_decaying(&samples, grid.spacing());
        Self { grid, samples, mass }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Curvature (Monge–Ampère) density `w''`.
pub fn ma_density(w: &RadialWeight) -> Result<Density> {
    w.check_convex(false)?;
    Ok(Density::from_decaying(*w.grid(), w.second_derivative()))
}

/// Exponential decay rates of `e^{-tau}` at the two edges, positive when
/// integrable. The average of the asymptotic slope and the local slope at
/// the edge: exact to second order for tails of the form `a x + b + c e^{-a x}`.
pub fn volume_decays(tau: &RadialWeight) -> Result<(f64, f64)> {
    let (am, ap) = tau.slopes();
    if !(am < 0.0 && ap > 0.0) {
        return Err(LabError::NonIntegrable { minus: am, plus: ap });
    }
    let n = tau.grid().len();
    let dm = tau.deficit_minus(0);
    let dp = tau.deficit_plus(n - 1);
    let sm = -am - 0.5 * dm;
    let sp = ap - 0.5 * dp;
    if !(sm > 0.0 && sp > 0.0) {
        return Err(LabError::NonIntegrable { minus: am, plus: ap });
    }
    Ok((sm, sp))
}

/// Quadrature weights for integrands decaying like `e^{-tau}`.
pub fn volume_quadrature(tau: &RadialWeight) -> Result<Vec<f64>> {
    let (sm, sp) = volume_decays(tau)?;
    Ok(quadrature_weights(tau.grid().len(), tau.grid().spacing(), Some(sm), Some(sp)))
}

/// Volume density `e^{-tau}`.
pub fn volume_density(tau: &RadialWeight) -> Result<Density> {
    let q = volume_quadrature(tau)?;
    let samples: Vec<f64> = tau.samples().iter().map(|t| (-t).exp()).collect();
    let mass = diff::integrate(&samples, &q);
    Ok(Density {
        grid: *tau.grid(),
        samples,
        mass,
    })
}

/// Ricci density `-(log w'')''`.
pub fn ricci_density(w: &RadialWeight) -> Result<Density> {
    w.check_convex(true)?;
    let log_c: Vec<f64> = w.second_derivative().iter().map(|c| c.ln()).collect();
    let h = w.grid().spacing();
    let samples = diff::second_derivative(&log_c, h).iter().map(|v| -v).collect();
    Ok(Density::from_decaying(*w.grid(), samples))
}

/// Quadrature weights `c` with `∫ x f dx ≈ Σ c_i f_i` for `f` decaying at the
/// given rates beyond the grid.
pub fn first_moment_weights(grid: &Grid, decay_minus: Option<f64>, decay_plus: Option<f64>) -> Vec<f64> {
    let n = grid.len();
    let h = grid.spacing();
    let r = grid.x_max();
    let mut c: Vec<f64> = (0..n).map(|i| h * grid.x(i)).collect();
    c[0] = -0.5 * h * r;
    c[n - 1] = 0.5 * h * r;
    if let Some(s) = decay_minus.filter(|s| *s > 0.0) {
        c[0] -= r / s + 1.0 / (s * s);
    }
    if let Some(s) = decay_plus.filter(|s| *s > 0.0) {
        c[n - 1] += r / s + 1.0 / (s * s);
    }
    c
}

/// Monge–Ampère barycenter `∫ x w'' dx / M`.
pub fn barycenter(w: &RadialWeight) -> Result<f64> {
    let m = w.degree();
    if !(m > 0.0) {
        return Err(LabError::InvalidInput(format!("barycenter needs positive mass, got {m}")));
    }
    let c = w.second_derivative();
    let (dm, dp) = diff::measured_decays(&c, w.grid().spacing());
    let k = first_moment_weights(w.grid(), dm, dp);
    Ok(diff::integrate(&c, &k) / m)
}
