//! Cone-limit and uniqueness experiments built on the KE solver.

use super::solver::{solve_ke_centered, Gauge, Solution, SolverConfig};
use super::twister::{smoothing_profile, TwisterSpec};
use crate::error::{LabError, Result};
use crate::functionals::{ding_value, functional_f};
use crate::radial::{barycenter, ma_density, Grid, RadialWeight};
use serde::Serialize;

/// `x -> φ(x - a)` with `a` chosen to put the Monge–Ampère barycenter at 0.
pub fn normalize_automorphism(phi: &RadialWeight) -> Result<RadialWeight> {
    phi.check_convex(false)?;
    let b = barycenter(phi)?;
    if b == 0.0 {
        return Ok(phi.clone());
    }
    Ok(phi.translated(-b))
}

pub fn sup_distance(a: &RadialWeight, b: &RadialWeight) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(LabError::GridMismatch);
    }
    Ok((0..a.grid().len()).fold(0.0f64, |m, i| m.max((a.value(i) - b.value(i)).abs())))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeLimitRow {
    pub eps: f64,
    /// `sup_{|x| <= window} |φ_ε - φ_β|`
    pub dist: f64,
    pub mass: f64,
    pub f: f64,
    pub d: f64,
    pub residual: f64,
    /// `sup |φ_ε(x) - φ_ε(-x)|`
    pub asymmetry: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeLimitTable {
    pub beta: f64,
    pub window: f64,
    pub rows: Vec<ConeLimitRow>,
    /// `dist` strictly decreasing along the ε list.
    pub decreasing: bool,
}

impl ConeLimitTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,dist,mass,F,D,residual,asymmetry\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.6e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e},{:.3e}\n",
                r.eps, r.dist, r.mass, r.f, r.d, r.residual, r.asymmetry
            ));
        }
        out
    }
}

/// Solves the smoothed-cone equation for each ε and measures the distance to
/// the football of the same angle on `|x| <= window`.
pub fn cone_limit_study(beta: f64, eps_list: &[f64], window: f64, grid: Grid, cfg: &SolverConfig) -> Result<ConeLimitTable> {
    if eps_list.is_empty() {
        return Err(LabError::InvalidInput("empty eps list".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::InvalidInput("eps list must be positive and strictly decreasing".into()));
    }
    if !(window > 0.0 && window <= grid.x_max()) {
        return Err(LabError::OutOfRange(format!(
            "window {window} must lie in (0, x_max = {}]",
            grid.x_max()
        )));
    }
    let football = RadialWeight::football(beta, grid)?;
    let n = grid.len();
    let inside: Vec<usize> = (0..n).filter(|&i| grid.x(i).abs() <= window).collect();
    let mut seed = football.clone();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let tw = smoothing_profile(beta, eps, grid)?;
        let sol = solve_ke_centered(&tw, &seed, cfg, 0.0)?;
        let phi = &sol.weight;
        let align = match cfg.gauge {
            Gauge::PinValue { x0, value } => value - football.value(grid.nearest(x0)),
            _ => 0.0,
        };
        let dist = inside
            .iter()
            .fold(0.0f64, |m, &i| m.max((phi.value(i) - football.value(i) - align).abs()));
        let asymmetry = (0..n).fold(0.0f64, |m, i| m.max((phi.value(i) - phi.value(n - 1 - i)).abs()));
        rows.push(ConeLimitRow {
            eps,
            dist,
            mass: ma_density(phi)?.mass,
            f: functional_f(phi, &tw)?,
            d: ding_value(phi, &football, &tw)?.d,
            residual: sol.residual,
            asymmetry,
        });
        seed = sol.weight;
    }
    let decreasing = rows.windows(2).all(|w| w[1].dist < w[0].dist);
    Ok(ConeLimitTable {
        beta,
        window,
        rows,
        decreasing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub seeds: usize,
    pub twister: String,
    /// Whether uniqueness is judged modulo translations.
    pub modulo_automorphisms: bool,
    /// Pairwise sup-distances `(i, j, d)` with `i < j`.
    pub raw_distances: Vec<(usize, usize, f64)>,
    pub normalized_distances: Vec<(usize, usize, f64)>,
    pub residuals: Vec<f64>,
    pub verdict: String,
    #[serde(skip)]
    pub solutions: Vec<Solution>,
}

pub const UNIQUENESS_TOL: f64 = 1e-6;

impl UniquenessReport {
    pub fn max_raw(&self) -> f64 {
        self.raw_distances.iter().map(|d| d.2).fold(0.0, f64::max)
    }

    pub fn max_normalized(&self) -> f64 {
        self.normalized_distances.iter().map(|d| d.2).fold(0.0, f64::max)
    }

    pub fn is_unique(&self) -> bool {
        self.verdict == "unique"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn pairwise(ws: &[RadialWeight]) -> Result<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for i in 0..ws.len() {
        for j in i + 1..ws.len() {
            out.push((i, j, sup_distance(&ws[i], &ws[j])?));
        }
    }
    Ok(out)
}

/// Solves from every seed and compares the solutions: raw when the twister
/// rules out automorphisms, modulo translations otherwise. With a
/// translation-invariant equation each seed keeps its own barycenter.
pub fn uniqueness_experiment(tw: &TwisterSpec, seeds: &[RadialWeight], cfg: &SolverConfig) -> Result<UniquenessReport> {
    if seeds.len() < 2 {
        return Err(LabError::InvalidInput(format!("need at least 2 seeds, got {}", seeds.len())));
    }
    let modulo = tw.is_translation_degenerate();
    let mut solutions = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let center = if modulo { barycenter(seed)? } else { 0.0 };
        solutions.push(solve_ke_centered(tw, seed, cfg, center)?);
    }
    let weights: Vec<RadialWeight> = solutions.iter().map(|s| s.weight.clone()).collect();
    let raw = pairwise(&weights)?;
    let normalized = pairwise(&weights.iter().map(normalize_automorphism).collect::<Result<Vec<_>>>()?)?;
    let judged = if modulo { &normalized } else { &raw };
    let unique = judged.iter().all(|d| d.2 <= UNIQUENESS_TOL);
    Ok(UniquenessReport {
        seeds: seeds.len(),
        twister: tw.tag(),
        modulo_automorphisms: modulo,
        raw_distances: raw,
        normalized_distances: normalized,
        residuals: solutions.iter().map(|s| s.residual).collect(),
        verdict: if unique { "unique" } else { "not unique" }.into(),
        solutions,
    })
}
