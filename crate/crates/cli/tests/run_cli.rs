use radial_lab::config::parse_with_overrides;
use radial_lab::run::MANIFEST;
use radial_lab::{run, ExperimentConfig};
use std::path::Path;
use std::process::Command;

fn config(dir: &Path, text: &str) -> ExperimentConfig {
    let out = dir.display().to_string();
    parse_with_overrides(text, &[("output_dir".into(), out)]).unwrap()
}

fn lab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lab")).args(args).output().unwrap()
}

#[test]
fn ke_solve_writes_reports_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config(dir.path(), "experiment = ke-solve\ntwister = background")).unwrap();
    assert!(out.status().is_ok());
    for f in ["ke_solve.csv", "weight.tsv", MANIFEST] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let manifest = std::fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
    assert!(manifest.starts_with("status = ok\n"));
    assert!(manifest.contains("twister = background\n"));
    assert!(manifest.contains("ke_residual = "));
    assert!(manifest.contains("PASS closed_form_recovery"));
    let w = radial_kahler::RadialWeight::from_table(&std::fs::read_to_string(dir.path().join("weight.tsv")).unwrap()).unwrap();
    assert_eq!(w.slopes(), (-0.5, 0.5));
}

#[test]
fn spectrum_first_row_is_one() {
    let dir = tempfile::tempdir().unwrap();
    run(&config(dir.path(), "experiment = spectrum")).unwrap().status().unwrap();
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let lambda: f64 = first[1].parse().unwrap();
    assert!((lambda - 1.0).abs() < 1e-5, "{lambda}");
}

#[test]
fn uniqueness_smooth_twister_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("u.cfg");
    std::fs::write(&cfg, "# smooth twister\nexperiment = uniqueness\ntwister = background  # c psi_0\n").unwrap();
    let out_dir = format!("output_dir={}", dir.path().display());
    let o = lab(&["run", cfg.to_str().unwrap(), "--set", &out_dir]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = std::fs::read_to_string(dir.path().join("uniqueness.json")).unwrap();
    assert!(json.contains("\"verdict\": \"unique\""));
}

#[test]
fn mismatched_slopes_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = format!("output_dir={}", dir.path().display());
    let o = lab(&["run", "--set", "experiment=geodesic-audit", "--set", "end=football", "--set", &out_dir]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("slope mismatch"));
    let manifest = std::fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
    assert!(manifest.starts_with("status = error\n"));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(lab(&["run", "--set", "beta=1.5", "--set", "experiment=spectrum"]).status.code(), Some(2));
    assert_eq!(lab(&["run", "--set", "beta=0.5"]).status.code(), Some(2));
    assert_eq!(lab(&["run", "/no/such/config"]).status.code(), Some(2));
    let o = lab(&["run", "--set", "experiment=spectrum", "--set", "colour=red"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key `colour`"));
}

#[test]
fn failed_invariant_exits_one_and_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = format!("output_dir={}", dir.path().display());
    // five time samples are far too coarse for the defect bound
    let o = lab(&["run", "--set", "experiment=geodesic-audit", "--set", "m=5", "--set", &out_dir]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invariant `path0.geodesic_defect` failed"));
    let manifest = std::fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
    assert!(manifest.starts_with("status = failed\nfirst_failure = path0.geodesic_defect\n"));
    assert!(manifest.contains("PASS path0.ding_convexity"));
    assert!(dir.path().join("audit.csv").exists());
}

#[test]
fn reports_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let text = "experiment = properness-scan\ntwister = background\nfamily = perturbations\nseed = 11";
    let ra = run(&config(a.path(), text)).unwrap();
    let rb = run(&config(b.path(), text)).unwrap();
    assert_eq!(ra.report.files, rb.report.files);
    let body = std::fs::read(a.path().join("properness.csv")).unwrap();
    assert_eq!(body, std::fs::read(b.path().join("properness.csv")).unwrap());
    let other = run(&config(b.path(), &text.replace("seed = 11", "seed = 12"))).unwrap();
    assert_ne!(ra.report.files, other.report.files);
}

#[test]
fn parallel_audit_matches_sequential() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let text = "experiment = geodesic-audit\npaths = 2\nm = 17\nseed = 3";
    let seq = run(&config(a.path(), text)).unwrap();
    let par = run(&config(b.path(), &format!("{text}\nparallel = true"))).unwrap();
    seq.status().unwrap();
    assert_eq!(seq.report.files, par.report.files);
    let csv = seq.report.file("audit.csv").unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 17);
    assert!(csv.lines().last().unwrap().starts_with("1,1.000000,"));
}
