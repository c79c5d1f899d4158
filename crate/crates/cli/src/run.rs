//! Experiment orchestration and report emission.

use crate::config::{ConfigError, Experiment, ExperimentConfig, Family, TwisterChoice, WeightChoice};
use crate::families;
use radial_kahler::einstein::{
    cone_limit_study, normalize_automorphism, smoothing_profile, solve_twisted_ke, sup_distance,
    uniqueness_experiment, Gauge, SolverConfig, TwisterKind, TwisterSpec,
};
use radial_kahler::functionals::{properness_scan, Verdict};
use radial_kahler::geodesics::{convexity_audit, epsilon_geodesic, exact_geodesic, geodesic_defect, AuditRow, GeodesicPath};
use radial_kahler::einstein::ke_residual;
use radial_kahler::spectral::{lowest_spectrum, scaled_match_error, spectrum_csv};
use radial_kahler::{Grid, LabError, RadialWeight};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// Closed-form solutions are recovered to this sup error.
pub const CLOSED_FORM_TOL: f64 = 1e-7;
/// Independent KE residual certificate.
pub const KE_RESIDUAL_TOL: f64 = 1e-9;
/// `|D'' - (-E'' + (δ_τ + k + ∫ f e^{-τ}) / ∫ e^{-τ})|` at interior times.
pub const DECOMPOSITION_TOL: f64 = 1e-4;
/// Discrete `D''` along exact geodesics.
pub const CONVEXITY_SLACK: f64 = 1e-6;
/// Geodesic defect `sup |f|` of exact geodesics at the default schedule.
pub const DEFECT_TOL: f64 = 5e-4;
pub const EIGENVALUE_TOL: f64 = 1e-5;
pub const EIGENFUNCTION_TOL: f64 = 1e-3;
/// Default smoothing of the smoothed-cone twister.
pub const DEFAULT_CONE_EPS: f64 = 1e-3;

pub const MANIFEST: &str = "manifest.txt";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("invariant `{name}` failed: {detail}")]
    Invariant { name: String, detail: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 2 for bad configuration or inputs, 1 for numerical or invariant failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Lab(e) if is_input_error(e) => 2,
            _ => 1,
        }
    }
}

pub fn is_input_error(e: &LabError) -> bool {
    matches!(
        e,
        LabError::InvalidGrid(_)
            | LabError::OutOfRange(_)
            | LabError::DegreeMismatch(..)
            | LabError::SlopeMismatch(..)
            | LabError::GridMismatch
            | LabError::GaugeRequired
            | LabError::InvalidInput(_)
            | LabError::Parse(_)
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Report bodies, certificates and invariant checks of one experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    /// `(file name, body)` in emission order.
    pub files: Vec<(String, String)>,
    pub certificates: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

impl Report {
    fn certify(&mut self, name: impl Into<String>, value: f64) {
        self.certificates.push((name.into(), value));
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// `value <= bound`, with NaN failing.
    fn check_le(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.check(name, value <= bound, format!("{value:.3e} (limit {bound:.1e})"));
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_str())
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub output_dir: PathBuf,
    pub wall_time: f64,
}

impl Outcome {
    /// `Err` naming the first failed invariant.
    pub fn status(&self) -> Result<(), RunError> {
        match self.report.first_failure() {
            None => Ok(()),
            Some(c) => Err(RunError::Invariant {
                name: c.name.clone(),
                detail: c.detail.clone(),
            }),
        }
    }
}

pub fn solver_config(cfg: &ExperimentConfig) -> SolverConfig {
    SolverConfig {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        max_halvings: cfg.max_halvings,
        gauge: Gauge::CenterBarycenter,
        max_bisections: cfg.max_bisections,
    }
}

pub fn twister(cfg: &ExperimentConfig, g: Grid) -> radial_kahler::Result<TwisterSpec> {
    match cfg.twister {
        TwisterChoice::None => Ok(TwisterSpec::none(g)),
        TwisterChoice::Background => TwisterSpec::smooth_background(cfg.c, g),
        TwisterChoice::SmoothedCone => smoothing_profile(cfg.beta, cfg.eps.unwrap_or(DEFAULT_CONE_EPS), g),
        TwisterChoice::Conical => TwisterSpec::conical(cfg.beta, g),
    }
}

/// The closed-form twisted KE weight, when the twister has one.
pub fn closed_form_ke(tw: &TwisterSpec) -> radial_kahler::Result<Option<RadialWeight>> {
    let g = *tw.weight.grid();
    Ok(match tw.kind {
        TwisterKind::None => Some(RadialWeight::fubini_study(g)),
        TwisterKind::SmoothBackground { c } => Some(RadialWeight::scaled_background(1.0 - c, g)),
        TwisterKind::Conical { beta } => Some(RadialWeight::football(beta, g)?),
        TwisterKind::SmoothedCone { .. } => None,
    })
}

/// A closed-form weight by name; `background` is `(1 - c) ψ₀`.
pub fn named_weight(choice: WeightChoice, cfg: &ExperimentConfig, g: Grid) -> radial_kahler::Result<RadialWeight> {
    match choice {
        WeightChoice::FubiniStudy => Ok(RadialWeight::fubini_study(g)),
        WeightChoice::Football => RadialWeight::football(cfg.beta, g),
        WeightChoice::Background => Ok(RadialWeight::scaled_background(1.0 - cfg.c, g)),
        WeightChoice::Perturbed | WeightChoice::Translated => Err(LabError::InvalidInput(format!(
            "`{choice}` is only defined relative to a start weight"
        ))),
    }
}

/// Runs the experiment and writes its reports plus the manifest under
/// `output_dir`. Failed invariants are reported through [`Outcome::status`].
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let result = execute(cfg);
    let wall_time = start.elapsed().as_secs_f64();
    match result {
        Ok(report) => {
            for (name, body) in &report.files {
                write(&dir.join(name), body)?;
            }
            write(&dir.join(MANIFEST), &manifest(cfg, Some(&report), None, wall_time))?;
            Ok(Outcome {
                report,
                output_dir: dir,
                wall_time,
            })
        }
        Err(e) => {
            write(&dir.join(MANIFEST), &manifest(cfg, None, Some(&e), wall_time))?;
            Err(e)
        }
    }
}

fn write(path: &Path, body: &str) -> Result<(), RunError> {
    std::fs::write(path, body).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn manifest(cfg: &ExperimentConfig, report: Option<&Report>, error: Option<&RunError>, wall_time: f64) -> String {
    let mut out = String::new();
    let status = match (report, error) {
        (_, Some(_)) => "error",
        (Some(r), None) if r.first_failure().is_some() => "failed",
        _ => "ok",
    };
    let _ = writeln!(out, "status = {status}");
    if let Some(e) = error {
        let _ = writeln!(out, "error = {e}");
    }
    if let Some(c) = report.and_then(Report::first_failure) {
        let _ = writeln!(out, "first_failure = {}", c.name);
    }
    let _ = writeln!(out, "lab_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "core_version = {}", radial_kahler::VERSION);
    let _ = writeln!(out, "wall_time_s = {wall_time:.3}");
    out.push_str("\n[config]\n");
    out.push_str(&cfg.echo());
    if let Some(r) = report {
        out.push_str("\n[files]\n");
        for (name, body) in &r.files {
            let _ = writeln!(out, "{name} = {} bytes", body.len());
        }
        out.push_str("\n[certificates]\n");
        for (name, v) in &r.certificates {
            let _ = writeln!(out, "{name} = {v:.6e}");
        }
        out.push_str("\n[invariants]\n");
        for c in &r.checks {
            let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    out
}

/// Computes every report body in memory.
pub fn execute(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let g = Grid::new(cfg.x_max, cfg.n)?;
    let scfg = solver_config(cfg);
    scfg.validate()?;
    let tw = twister(cfg, g)?;
    let mut report = Report::default();
    match cfg.experiment {
        Experiment::KeSolve => ke_solve(cfg, &tw, &scfg, &mut report)?,
        Experiment::GeodesicAudit => geodesic_audit(cfg, &tw, &scfg, &mut report)?,
        Experiment::ConeLimit => cone_limit(cfg, g, &scfg, &mut report)?,
        Experiment::Uniqueness => uniqueness(cfg, &tw, &scfg, &mut report)?,
        Experiment::PropernessScan => properness(cfg, &tw, &mut report)?,
        Experiment::Spectrum => spectrum(cfg, &tw, &scfg, &mut report)?,
    }
    Ok(report)
}

fn ke_solve(cfg: &ExperimentConfig, tw: &TwisterSpec, scfg: &SolverConfig, report: &mut Report) -> Result<(), RunError> {
    let g = *tw.weight.grid();
    let start = named_weight(cfg.start, cfg, g)?;
    let seed = families::perturbation(&start, cfg.bumps, cfg.amplitude, &mut families::rng(cfg.seed))?;
    let sol = solve_twisted_ke(tw, &seed, scfg)?;
    let independent = ke_residual(tw, &sol.weight)?;
    let exact = closed_form_ke(tw)?;
    let error = match &exact {
        Some(e) if tw.is_translation_degenerate() => {
            Some(sup_distance(&normalize_automorphism(&sol.weight)?, &normalize_automorphism(e)?)?)
        }
        Some(e) => Some(sup_distance(&sol.weight, e)?),
        None => None,
    };
    let mut csv = String::from("twister,iterations,residual,ke_residual,boundary_defect,closed_form_error\n");
    let _ = writeln!(
        csv,
        "{},{},{:.6e},{:.6e},{:.6e},{}",
        tw.tag(),
        sol.iterations,
        sol.residual,
        independent,
        sol.boundary_defect,
        error.map_or("none".into(), |e| format!("{e:.6e}"))
    );
    report.files.push(("ke_solve.csv".into(), csv));
    report.files.push(("weight.tsv".into(), sol.weight.to_table()));
    report.certify("newton_residual", sol.residual);
    report.certify("ke_residual", independent);
    report.certify("boundary_defect", sol.boundary_defect);
    report.check_le("ke_residual", independent, KE_RESIDUAL_TOL);
    if let Some(e) = error {
        report.certify("closed_form_error", e);
        report.check_le("closed_form_recovery", e, CLOSED_FORM_TOL);
    }
    Ok(())
}

struct AuditedPath {
    rows: Vec<AuditRow>,
    sup_f: f64,
    residual: Option<f64>,
}

fn audit_one(
    start: &RadialWeight,
    end: &RadialWeight,
    cfg: &ExperimentConfig,
    tw: &TwisterSpec,
    scfg: &SolverConfig,
) -> radial_kahler::Result<AuditedPath> {
    let (path, residual): (GeodesicPath, Option<f64>) = match cfg.eps {
        None => (exact_geodesic(start, end, cfg.m)?, None),
        Some(eps) => {
            let sol = epsilon_geodesic(start, end, eps, cfg.m, scfg)?;
            (sol.path, Some(sol.residual))
        }
    };
    let sup_f = geodesic_defect(&path, tw)?.sup_f();
    Ok(AuditedPath {
        rows: convexity_audit(&path, tw)?,
        sup_f,
        residual,
    })
}

fn geodesic_audit(cfg: &ExperimentConfig, tw: &TwisterSpec, scfg: &SolverConfig, report: &mut Report) -> Result<(), RunError> {
    let g = *tw.weight.grid();
    let start = named_weight(cfg.start, cfg, g)?;
    let mut rng = families::rng(cfg.seed);
    let ends: Vec<RadialWeight> = (0..cfg.paths)
        .map(|_| match cfg.end {
            WeightChoice::Perturbed => families::perturbation(&start, cfg.bumps, cfg.amplitude, &mut rng),
            WeightChoice::Translated => Ok(start.translated(cfg.shift)),
            other => named_weight(other, cfg, g),
        })
        .collect::<radial_kahler::Result<_>>()?;
    let audited: Vec<radial_kahler::Result<AuditedPath>> = if cfg.parallel {
        ends.par_iter().map(|e| audit_one(&start, e, cfg, tw, scfg)).collect()
    } else {
        ends.iter().map(|e| audit_one(&start, e, cfg, tw, scfg)).collect()
    };
    let mut csv = String::from("path,s,D,D2,delta_tau,k,f_weighted,E2,gap\n");
    for (p, a) in audited.into_iter().enumerate() {
        let a = a?;
        let interior = &a.rows[1..a.rows.len() - 1];
        for r in &a.rows {
            let _ = writeln!(
                csv,
                "{p},{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
                r.s,
                r.d,
                r.d_second,
                r.delta_tau,
                r.k_term,
                r.f_weighted,
                r.e_second,
                r.decomposition_gap()
            );
        }
        let gap = interior.iter().map(AuditRow::decomposition_gap).fold(0.0, f64::max);
        let d2_min = interior.iter().map(|r| r.d_second).fold(f64::INFINITY, f64::min);
        report.certify(format!("path{p}.decomposition_gap"), gap);
        report.certify(format!("path{p}.min_d2"), d2_min);
        report.certify(format!("path{p}.sup_f"), a.sup_f);
        report.check_le(format!("path{p}.decomposition"), gap, DECOMPOSITION_TOL);
        match a.residual {
            None => {
                report.check(
                    format!("path{p}.ding_convexity"),
                    d2_min >= -CONVEXITY_SLACK,
                    format!("min D'' = {d2_min:.3e} (limit -{CONVEXITY_SLACK:.1e})"),
                );
                report.check_le(format!("path{p}.geodesic_defect"), a.sup_f, DEFECT_TOL);
            }
            Some(res) => {
                report.certify(format!("path{p}.eps_residual"), res);
                report.check_le(format!("path{p}.eps_residual"), res, cfg.tol);
            }
        }
    }
    report.files.push(("audit.csv".into(), csv));
    Ok(())
}

fn cone_limit(cfg: &ExperimentConfig, g: Grid, scfg: &SolverConfig, report: &mut Report) -> Result<(), RunError> {
    let table = cone_limit_study(cfg.beta, &cfg.eps_list, cfg.window, g, scfg)?;
    for r in &table.rows {
        report.certify(format!("eps={:e}.residual", r.eps), r.residual);
        report.certify(format!("eps={:e}.dist", r.eps), r.dist);
    }
    let dists: Vec<String> = table.rows.iter().map(|r| format!("{:.3e}", r.dist)).collect();
    report.check("cone_limit_decreasing", table.decreasing, format!("d(eps) = [{}]", dists.join(", ")));
    report.files.push(("cone_limit.csv".into(), table.to_csv()));
    Ok(())
}

/// Translates of the start weight for translation-invariant twisters
/// (the solutions differ by automorphisms), seeded perturbations otherwise.
pub fn uniqueness_seeds(cfg: &ExperimentConfig, tw: &TwisterSpec) -> radial_kahler::Result<Vec<RadialWeight>> {
    let start = named_weight(cfg.start, cfg, *tw.weight.grid())?;
    if tw.is_translation_degenerate() {
        Ok((0..cfg.seeds).map(|k| start.translated(cfg.shift * k as f64)).collect())
    } else {
        families::perturbations(&start, cfg.seeds, cfg.bumps, cfg.amplitude, &mut families::rng(cfg.seed))
    }
}

fn uniqueness(cfg: &ExperimentConfig, tw: &TwisterSpec, scfg: &SolverConfig, report: &mut Report) -> Result<(), RunError> {
    let seeds = uniqueness_seeds(cfg, tw)?;
    let rep = uniqueness_experiment(tw, &seeds, scfg)?;
    for (k, r) in rep.residuals.iter().enumerate() {
        report.certify(format!("seed{k}.residual"), *r);
    }
    report.certify("max_raw_distance", rep.max_raw());
    report.certify("max_normalized_distance", rep.max_normalized());
    report.check(
        "unique",
        rep.is_unique(),
        format!(
            "verdict {} (raw {:.3e}, normalized {:.3e})",
            rep.verdict,
            rep.max_raw(),
            rep.max_normalized()
        ),
    );
    report.files.push(("uniqueness.json".into(), rep.to_json()));
    Ok(())
}

/// Members of the properness family: translates by `0, shift, 2 shift, 4 shift, …`
/// or `base + t v` for one seeded convex perturbation `base + v`, `t ∈ [0, 1]`.
pub fn properness_family(cfg: &ExperimentConfig, base: &RadialWeight) -> radial_kahler::Result<Vec<RadialWeight>> {
    match cfg.family {
        Family::Translations => Ok((0..cfg.members)
            .map(|k| {
                let a = if k == 0 { 0.0 } else { cfg.shift * 2f64.powi(k as i32 - 1) };
                base.translated(a)
            })
            .collect()),
        Family::Perturbations => {
            let top = families::perturbation(base, cfg.bumps, cfg.amplitude, &mut families::rng(cfg.seed))?;
            let v: Vec<f64> = top.remainder().iter().zip(base.remainder()).map(|(a, b)| a - b).collect();
            (0..cfg.members)
                .map(|k| {
                    let t = k as f64 / (cfg.members - 1) as f64;
                    base.perturbed(&v.iter().map(|x| t * x).collect::<Vec<_>>())
                })
                .collect()
        }
    }
}

fn properness(cfg: &ExperimentConfig, tw: &TwisterSpec, report: &mut Report) -> Result<(), RunError> {
    let base = named_weight(cfg.start, cfg, *tw.weight.grid())?;
    let family = properness_family(cfg, &base)?;
    let rep = properness_scan(&family, &base, tw)?;
    report.certify("envelope_a", rep.a);
    report.certify("envelope_b", rep.b);
    // translations are automorphisms exactly when the twister is invariant
    let expected = match (tw.is_translation_degenerate(), cfg.family) {
        (true, Family::Translations) => Some(Verdict::ProperViolated),
        (false, _) => Some(Verdict::CoerciveConsistent),
        (true, Family::Perturbations) => None,
    };
    match expected {
        Some(v) => report.check(
            "properness_verdict",
            rep.verdict == v,
            format!("verdict {} (expected {})", rep.verdict.as_str(), v.as_str()),
        ),
        None => report.check("properness_verdict", true, format!("verdict {} (not asserted)", rep.verdict.as_str())),
    }
    let mut csv = rep.to_csv();
    if let Some(body) = csv.strip_prefix("member,J,D\n") {
        csv = format!("# family={} twister={}\nmember,J,D\n{body}", cfg.family, tw.tag());
    }
    report.files.push(("properness.csv".into(), csv));
    Ok(())
}

fn spectrum(cfg: &ExperimentConfig, tw: &TwisterSpec, scfg: &SolverConfig, report: &mut Report) -> Result<(), RunError> {
    let start = named_weight(cfg.start, cfg, *tw.weight.grid())?;
    let sol = solve_twisted_ke(tw, &start, scfg)?;
    report.certify("ke_residual", sol.residual);
    let tau = sol.weight.plus(&tw.weight)?;
    let pairs = lowest_spectrum(&tau, cfg.count)?;
    for (k, p) in pairs.iter().enumerate() {
        report.certify(format!("lambda{}.rayleigh_residual", k + 1), p.rayleigh_residual);
    }
    let first = &pairs[0];
    let mismatch = scaled_match_error(&first.eigenfunction, &tau.first_derivative());
    report.certify("lambda1", first.eigenvalue);
    report.certify("eigenfunction_mismatch", mismatch);
    report.check_le("lambda1", (first.eigenvalue - 1.0).abs(), EIGENVALUE_TOL);
    report.check_le("holomorphy_potential", mismatch, EIGENFUNCTION_TOL);
    report.files.push(("spectrum.csv".into(), spectrum_csv(&pairs)));
    Ok(())
}
