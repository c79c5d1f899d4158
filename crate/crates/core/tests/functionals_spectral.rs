use proptest::prelude::*;
use radial_kahler::einstein::{smoothing_profile, TwisterSpec};
use radial_kahler::functionals::{aubin_j, ding_value, energy_e, properness_scan, Verdict};
use radial_kahler::spectral::{delta_tau, lowest_spectrum, scaled_match_error, weighted_laplacian_form};
use radial_kahler::{Grid, RadialWeight};

fn grid() -> Grid {
    Grid::new(40.0, 4097).unwrap()
}

#[test]
fn futaki_bound_at_closed_forms() {
    let g = grid();
    for tau in [RadialWeight::fubini_study(g), RadialWeight::football(0.5, g).unwrap()] {
        let pairs = lowest_spectrum(&tau, 2).unwrap();
        assert!((pairs[0].eigenvalue - 1.0).abs() <= 1e-5, "{}", pairs[0].eigenvalue);
        assert!(scaled_match_error(&pairs[0].eigenfunction, &tau.first_derivative()) <= 1e-3);
        assert!(pairs[1].eigenvalue > pairs[0].eigenvalue);
    }
}

#[test]
fn tanh_sits_on_the_bound() {
    let g = grid();
    let fs = RadialWeight::fubini_study(g);
    let u = g.sample(|x| (0.5 * x).tanh());
    let forms = weighted_laplacian_form(&fs).unwrap();
    assert!((forms.a(&u, &u) - 1.0 / 3.0).abs() <= 1e-6);
    assert!((forms.b(&u, &u) - 1.0 / 3.0).abs() <= 1e-6);
    assert!(delta_tau(&fs, &u).unwrap().abs() <= 1e-7);
}

#[test]
fn properness_dichotomy() {
    let g = grid();
    let fb = RadialWeight::football(0.5, g).unwrap();
    let cone = TwisterSpec::conical(0.5, g).unwrap();
    let family: Vec<RadialWeight> = [0.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&a| fb.translated(a)).collect();
    assert_eq!(properness_scan(&family, &fb, &cone).unwrap().verdict, Verdict::ProperViolated);

    let bg = TwisterSpec::smooth_background(0.5, g).unwrap();
    let base = RadialWeight::scaled_background(0.5, g);
    let family: Vec<RadialWeight> = [0.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&a| base.translated(a)).collect();
    assert_eq!(properness_scan(&family, &base, &bg).unwrap().verdict, Verdict::CoerciveConsistent);
}

#[test]
fn ding_decreases_with_smoothing() {
    let g = grid();
    let fb = RadialWeight::football(0.5, g).unwrap();
    let cone = TwisterSpec::conical(0.5, g).unwrap();
    for phi in [fb.clone(), fb.translated(1.5)] {
        let d_beta = ding_value(&phi, &fb, &cone).unwrap().d;
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
            let d = ding_value(&phi, &fb, &smoothing_profile(0.5, eps, g).unwrap()).unwrap().d;
            assert!(d <= prev + 1e-10, "{eps}: {d} > {prev}");
            assert!(d_beta <= d + 1e-10, "{eps}: {d_beta} > {d}");
            prev = d;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn aubin_j_is_nonnegative(c in -0.3f64..0.3, x0 in -4.0f64..4.0, k in -5.0f64..5.0) {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let phi = fs.perturbed(&g.sample(|x| c * fs.reference().curvature(x0) / (x - x0).cosh())).unwrap();
        prop_assume!(phi.check_convex(false).is_ok());
        let j = aubin_j(&phi.add_constant(k), &fs).unwrap();
        prop_assert!(j >= -1e-10, "{}", j);
    }

    #[test]
    fn energy_is_affine_in_constants(k in -5.0f64..5.0, a in -3.0f64..3.0) {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let phi = fs.translated(a);
        let e0 = energy_e(&phi, &fs).unwrap();
        let e1 = energy_e(&phi.add_constant(k), &fs).unwrap();
        prop_assert!((e1 - e0 - 2.0 * k).abs() < 1e-9, "{} {}", e1 - e0, 2.0 * k);
    }

    #[test]
    fn ding_is_invariant_under_constants(k in -5.0f64..5.0, eps in 1e-4f64..1e-1) {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let tw = smoothing_profile(0.5, eps, g).unwrap();
        let fb = RadialWeight::football(0.5, g).unwrap();
        let d0 = ding_value(&fb, &fb, &tw).unwrap().d;
        let d1 = ding_value(&fb.add_constant(k), &fb, &tw).unwrap().d;
        prop_assert!((d0 - d1).abs() < 1e-9, "{} {}", d0, d1);
        let _ = fs;
    }
}
