use crate::error::{LabError, Result};
use crate::radial::{Density, Grid, Profile, RadialWeight, Term};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TwisterKind {
    None,
    /// `c * psi_0`
    SmoothBackground { c: f64 },
    /// `(1 - beta) log q_eps`
    SmoothedCone { beta: f64, eps: f64 },
    /// zero weight; the cone lives in the slopes `±beta`
    Conical { beta: f64 },
}

/// Twister `θ` in the canonical frame: its weight, its curvature density
/// `chi`, and the mass `M` left for the metric.
#[derive(Clone, Debug, PartialEq)]
pub struct TwisterSpec {
    pub kind: TwisterKind,
    pub weight: RadialWeight,
    pub chi: Density,
    pub mass_m: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(LabError::OutOfRange(format!("cone angle beta = {beta} must lie in (0, 1)")))
    }
}

fn zero_weight(grid: Grid) -> RadialWeight {
    RadialWeight::from_profile(grid, Profile::zero())
}

fn chi_of(weight: &RadialWeight) -> Density {
    Density::from_decaying(*weight.grid(), weight.second_derivative())
}

impl TwisterSpec {
    pub fn none(grid: Grid) -> Self {
        let weight = zero_weight(grid);
        Self {
            kind: TwisterKind::None,
            chi: chi_of(&weight),
            weight,
            mass_m: 2.0,
        }
    }

    /// Strictly positive smooth twister `c * psi_0`, `0 < c < 1`.
    pub fn smooth_background(c: f64, grid: Grid) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(LabError::OutOfRange(format!("twister scale c = {c} must lie in (0, 1)")));
        }
        let weight = RadialWeight::scaled_background(c, grid);
        Ok(Self {
            kind: TwisterKind::SmoothBackground { c },
            chi: chi_of(&weight),
            weight,
            mass_m: 2.0 - 2.0 * c,
        })
    }

    pub fn conical(beta: f64, grid: Grid) -> Result<Self> {
        check_beta(beta)?;
        let weight = zero_weight(grid);
        Ok(Self {
            kind: TwisterKind::Conical { beta },
            chi: chi_of(&weight),
            weight,
            mass_m: 2.0 * beta,
        })
    }

    /// Mass carried by the twister itself (the divisor, for cone kinds).
    pub fn twister_mass(&self) -> f64 {
        2.0 - self.mass_m
    }

    /// The equation is invariant under `z -> λz`, so solutions need a gauge.
    pub fn is_translation_degenerate(&self) -> bool {
        matches!(self.kind, TwisterKind::None | TwisterKind::Conical { .. })
    }

    pub fn tag(&self) -> String {
        match self.kind {
            TwisterKind::None => "none".into(),
            TwisterKind::SmoothBackground { c } => format!("smooth_background({c})"),
            TwisterKind::SmoothedCone { eps, .. } => format!("smooth({eps})"),
            TwisterKind::Conical { beta } => format!("conical({beta})"),
        }
    }
}

/// Smoothed divisor twister `(1 - beta) log q_eps`, `q_eps = 1 + 4 eps cosh²(x/2)`;
/// `eps = 0` is the conical limit.
pub fn smoothing_profile(beta: f64, eps: f64, grid: Grid) -> Result<TwisterSpec> {
    check_beta(beta)?;
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(LabError::OutOfRange(format!("smoothing eps = {eps} must be non-negative")));
    }
    if eps == 0.0 {
        return TwisterSpec::conical(beta, grid);
    }
    let log_q = Term::LogQ { coef: 1.0, eps, shift: 0.0 };
    let weight = RadialWeight::from_profile(grid, Profile::new(vec![log_q.scaled(1.0 - beta)]));
    let chi = Density::from_decaying(grid, grid.sample(|x| log_q.curvature(x)));
    if let Some(i) = chi.samples.iter().position(|&c| c < -1e-12) {
        return Err(LabError::NotConvex { nodes: vec![i] });
    }
    Ok(TwisterSpec {
        kind: TwisterKind::SmoothedCone { beta, eps },
        weight,
        chi,
        mass_m: 2.0 * beta,
    })
}
