//! Continuity paths: warm-started Newton solves along a parameter.

use super::solver::{check_class, gauge_rows, Anchor, Level, Problem, Solution, SolverConfig, Source};
use super::twister::TwisterSpec;
use crate::error::{LabError, Result};
use crate::radial::diff::d1_stencil;
use crate::radial::{barycenter, RadialWeight};

/// One converged member of a path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPoint {
    pub param: f64,
    pub solution: Solution,
}

/// Members of a constant-path run and their largest distance to the base.
#[derive(Clone, Debug, PartialEq)]
pub struct CdsReport {
    pub members: Vec<PathPoint>,
    pub max_deviation: f64,
}

fn check_schedule(schedule: &[f64], pinned_ends: bool) -> Result<()> {
    if schedule.is_empty() {
        return Err(LabError::InvalidInput("empty schedule".into()));
    }
    if schedule.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(LabError::OutOfRange("schedule values must lie in [0, 1]".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::InvalidInput("schedule must be strictly increasing".into()));
    }
    if pinned_ends && (schedule[0] != 0.0 || *schedule.last().unwrap() != 1.0) {
        return Err(LabError::InvalidInput("schedule must start at 0 and end at 1".into()));
    }
    Ok(())
}

/// Equation with no translation freedom unless `t = 1` and the base is flat.
fn is_degenerate(t: f64, log_base: &[f64]) -> bool {
    let (lo, hi) = log_base
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    t == 1.0 && hi - lo <= 1e-6
}

/// Walks the parameter through `schedule`, halving any step whose Newton
/// solve fails, at most `cfg.max_bisections` levels deep.
fn march<F>(schedule: &[f64], start: &[f64], cfg: &SolverConfig, problem_at: F) -> Result<Vec<PathPoint>>
where
    F: Fn(f64) -> Result<Problem>,
{
    fn advance<F: Fn(f64) -> Result<Problem>>(
        from: &[f64],
        t0: f64,
        t1: f64,
        depth: usize,
        cfg: &SolverConfig,
        problem_at: &F,
    ) -> Result<Solution> {
        match problem_at(t1)?.solve(from, cfg) {
            Ok(sol) => Ok(sol),
            Err(err @ (LabError::Divergence { .. } | LabError::NonIntegrable { .. } | LabError::Singular(_))) => {
                if depth >= cfg.max_bisections || t1 == t0 {
                    return Err(err);
                }
                let mid = 0.5 * (t0 + t1);
                let half = advance(from, t0, mid, depth + 1, cfg, problem_at)?;
                advance(half.weight.remainder(), mid, t1, depth + 1, cfg, problem_at)
            }
            Err(err) => Err(err),
        }
    }
    let mut out: Vec<PathPoint> = Vec::with_capacity(schedule.len());
    let mut current = start.to_vec();
    let mut t_prev = schedule[0];
    for &t in schedule {
        let sol = advance(&current, t_prev, t, 0, cfg, &problem_at)?;
        current = sol.weight.remainder().to_vec();
        t_prev = t;
        out.push(PathPoint { param: t, solution: sol });
    }
    Ok(out)
}

/// `φ'' = M e^{-tφ - (1-t)φ₀ - w} / ∫(same)` for each `t` of the schedule,
/// warm-started from the previous member.
pub fn continuity_path(tw: &TwisterSpec, phi0: &RadialWeight, schedule: &[f64], cfg: &SolverConfig) -> Result<Vec<PathPoint>> {
    check_schedule(schedule, true)?;
    cfg.validate()?;
    check_class(tw, phi0)?;
    let base = phi0.samples();
    let w = tw.weight.samples();
    let (am, ap) = phi0.slopes();
    let (wm, wp) = tw.weight.slopes();
    let grid = *phi0.grid();
    march(schedule, phi0.remainder(), cfg, |t| {
        let log_base: Vec<f64> = base.iter().zip(&w).map(|(b, wi)| -(1.0 - t) * b - wi).collect();
        let degenerate = is_degenerate(t, &log_base);
        let (anchor, level) = gauge_rows(&grid, degenerate, cfg, 0.0, 0.0)?;
        let source = Source {
            t,
            log_base,
            decay: (-(am + wm), ap + wp),
            mass: tw.mass_m,
        };
        Ok(Problem::new(phi0, source, anchor, level))
    })
}

/// `φ'' = C e^{-s(φ - φ_b)} φ_b''` for each `s`, seeded at `φ_b`; `φ_b`
/// solves every member, so the path should stay put.
pub fn cds_path(base: &RadialWeight, schedule: &[f64], cfg: &SolverConfig) -> Result<CdsReport> {
    check_schedule(schedule, false)?;
    cfg.validate()?;
    base.check_convex(true)?;
    let grid = *base.grid();
    let n = grid.len();
    let h = grid.spacing();
    let phib = base.samples();
    let log_curv: Vec<f64> = base.second_derivative().iter().map(|c| c.ln()).collect();
    let decay = (
        d1_stencil(0, n).apply(&log_curv) / h,
        -d1_stencil(n - 1, n).apply(&log_curv) / h,
    );
    let mass = base.degree();
    let center = barycenter(base)?;
    let build = |s: f64, anchor: Anchor, level: Level| {
        let log_base: Vec<f64> = phib.iter().zip(&log_curv).map(|(p, l)| s * p + l).collect();
        Problem::new(base, Source { t: s, log_base, decay, mass }, anchor, level)
    };
    let members = march(schedule, base.remainder(), cfg, |s| {
        let log_base: Vec<f64> = phib.iter().zip(&log_curv).map(|(p, l)| s * p + l).collect();
        let degenerate = is_degenerate(s, &log_base);
        let (anchor, level) = gauge_rows(&grid, degenerate, cfg, center, 0.0)?;
        let level = match level {
            Level::Offsets(_) => Level::Offsets(build(s, anchor, level).level_of(base)?),
            pinned => pinned,
        };
        Ok(build(s, anchor, level))
    })?;
    let max_deviation = members
        .iter()
        .map(|m| (0..n).fold(0.0f64, |d, i| d.max((m.solution.weight.value(i) - phib[i]).abs())))
        .fold(0.0, f64::max);
    Ok(CdsReport { members, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::einstein::{smoothing_profile, solve_twisted_ke};
    use crate::radial::Grid;

    fn grid() -> Grid {
        Grid::new(40.0, 4097).unwrap()
    }

    fn sup_diff(a: &RadialWeight, b: &RadialWeight) -> f64 {
        (0..a.grid().len()).fold(0.0f64, |m, i| m.max((a.value(i) - b.value(i)).abs()))
    }

    #[test]
    fn continuity_endpoint_matches_direct_solve() {
        let g = grid();
        let tw = smoothing_profile(0.5, 1e-2, g).unwrap();
        let phi0 = RadialWeight::football(0.5, g).unwrap();
        let cfg = SolverConfig::default();
        let path = continuity_path(&tw, &phi0, &[0.0, 0.25, 0.5, 0.75, 1.0], &cfg).unwrap();
        let direct = solve_twisted_ke(&tw, &phi0, &cfg).unwrap();
        let end = &path.last().unwrap().solution.weight;
        assert!(sup_diff(end, &direct.weight) < 1e-8);
        assert!(path.iter().all(|p| p.solution.residual <= cfg.tol));
    }

    #[test]
    fn continuity_reaches_degenerate_endpoint() {
        let g = grid();
        let tw = TwisterSpec::none(g);
        let phi0 = RadialWeight::fubini_study(g).translated(1.5);
        let path = continuity_path(&tw, &phi0, &[0.0, 0.5, 1.0], &SolverConfig::default()).unwrap();
        let fs = RadialWeight::fubini_study(g);
        assert!(sup_diff(&path[2].solution.weight, &fs) < 1e-7);
    }

    #[test]
    fn schedule_validation() {
        let g = grid();
        let tw = TwisterSpec::none(g);
        let fs = RadialWeight::fubini_study(g);
        let cfg = SolverConfig::default();
        assert!(continuity_path(&tw, &fs, &[], &cfg).is_err());
        assert!(continuity_path(&tw, &fs, &[0.0, 0.5], &cfg).is_err());
        assert!(continuity_path(&tw, &fs, &[0.0, 0.7, 0.5, 1.0], &cfg).is_err());
    }

    #[test]
    fn football_is_a_fixed_path() {
        let g = grid();
        let fb = RadialWeight::football(0.5, g).unwrap();
        let schedule: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let rep = cds_path(&fb, &schedule, &SolverConfig::default()).unwrap();
        assert_eq!(rep.members.len(), 11);
        assert!(rep.max_deviation <= 1e-7, "{}", rep.max_deviation);
    }
}
