use radial_kahler::einstein::{
    cds_path, continuity_path, ke_residual, normalize_automorphism, solve_twisted_ke, sup_distance, uniqueness_experiment,
    SolverConfig, TwisterSpec,
};
use radial_kahler::{Grid, LabError, RadialWeight};

fn grid() -> Grid {
    Grid::new(40.0, 4097).unwrap()
}

fn bump(g: Grid, c: f64, x0: f64) -> Vec<f64> {
    g.sample(|x| c / (x - x0).cosh())
}

#[test]
fn closed_forms_are_solutions() {
    let g = grid();
    assert!(ke_residual(&TwisterSpec::none(g), &RadialWeight::fubini_study(g)).unwrap() <= 1e-9);
    for beta in [0.25, 0.5, 0.75] {
        let bg = TwisterSpec::smooth_background(1.0 - beta, g).unwrap();
        assert!(ke_residual(&bg, &RadialWeight::scaled_background(beta, g)).unwrap() <= 1e-9);
        let cone = TwisterSpec::conical(beta, g).unwrap();
        assert!(ke_residual(&cone, &RadialWeight::football(beta, g).unwrap()).unwrap() <= 1e-9);
    }
}

#[test]
fn perturbed_seeds_recover_closed_forms() {
    let g = grid();
    let cfg = SolverConfig::default();
    let beta = 0.5;
    let bg = TwisterSpec::smooth_background(1.0 - beta, g).unwrap();
    let exact = RadialWeight::scaled_background(beta, g);
    let seed = exact.perturbed(&bump(g, 0.05, 1.0)).unwrap();
    let sol = solve_twisted_ke(&bg, &seed, &cfg).unwrap();
    assert!(sup_distance(&sol.weight, &exact).unwrap() <= 1e-7);

    let cone = TwisterSpec::conical(beta, g).unwrap();
    let fb = RadialWeight::football(beta, g).unwrap();
    let seed = fb.perturbed(&bump(g, 0.05, -1.5)).unwrap();
    let sol = solve_twisted_ke(&cone, &seed, &cfg).unwrap();
    let d = sup_distance(&normalize_automorphism(&sol.weight).unwrap(), &normalize_automorphism(&fb).unwrap()).unwrap();
    assert!(d <= 1e-7, "{d}");
}

#[test]
fn wrong_class_seed_is_rejected() {
    let g = grid();
    let bg = TwisterSpec::smooth_background(0.5, g).unwrap();
    assert!(matches!(
        solve_twisted_ke(&bg, &RadialWeight::fubini_study(g), &SolverConfig::default()),
        Err(LabError::SlopeMismatch(..))
    ));
}

#[test]
fn continuity_path_reaches_the_solution() {
    let g = grid();
    let bg = TwisterSpec::smooth_background(0.5, g).unwrap();
    let start = RadialWeight::scaled_background(0.5, g).perturbed(&bump(g, 0.05, 0.5)).unwrap();
    let schedule: Vec<f64> = (0..=4).map(|k| k as f64 / 4.0).collect();
    let path = continuity_path(&bg, &start, &schedule, &SolverConfig::default()).unwrap();
    let last = &path.last().unwrap().solution;
    assert!(sup_distance(&last.weight, &RadialWeight::scaled_background(0.5, g)).unwrap() < 1e-7);
}

#[test]
fn cds_path_fixes_the_football() {
    let g = grid();
    let schedule: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    for beta in [0.25, 0.5, 0.75] {
        let fb = RadialWeight::football(beta, g).unwrap();
        let rep = cds_path(&fb, &schedule, &SolverConfig::default()).unwrap();
        assert_eq!(rep.members.len(), schedule.len());
        assert!(rep.max_deviation <= 1e-7, "{beta}: {}", rep.max_deviation);
    }
}

#[test]
fn conical_uniqueness_is_modulo_translations() {
    let g = grid();
    let cone = TwisterSpec::conical(0.5, g).unwrap();
    let fb = RadialWeight::football(0.5, g).unwrap();
    let rep = uniqueness_experiment(&cone, &[fb.clone(), fb.translated(3.0)], &SolverConfig::default()).unwrap();
    assert!(rep.modulo_automorphisms && rep.is_unique());
    assert!(rep.max_raw() > 0.1);
    assert!(rep.max_normalized() <= 1e-6);
}
