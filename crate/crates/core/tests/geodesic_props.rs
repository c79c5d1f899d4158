use proptest::prelude::*;
use radial_kahler::einstein::TwisterSpec;
use radial_kahler::geodesics::{convexity_audit, exact_geodesic, geodesic_defect, legendre_dual};
use radial_kahler::{Grid, LabError, RadialWeight};

fn grid() -> Grid {
    Grid::new(20.0, 801).unwrap()
}

#[test]
fn endpoints_are_kept_exactly() {
    let g = grid();
    let fs = RadialWeight::fubini_study(g);
    let end = fs.perturbed(&g.sample(|x| 0.2 / (x - 1.0).cosh())).unwrap();
    let path = exact_geodesic(&fs, &end, 9).unwrap();
    assert_eq!(path.weights()[0], fs);
    assert_eq!(path.weights()[8], end);
    assert_eq!(path.times().len(), 9);
}

#[test]
fn mismatched_endpoints_are_rejected() {
    let g = grid();
    let fs = RadialWeight::fubini_study(g);
    let fb = RadialWeight::football(0.5, g).unwrap();
    assert!(matches!(exact_geodesic(&fs, &fb, 9), Err(LabError::SlopeMismatch(..))));
    let other = RadialWeight::fubini_study(Grid::new(20.0, 401).unwrap());
    assert!(matches!(exact_geodesic(&fs, &other, 9), Err(LabError::GridMismatch)));
}

#[test]
fn orbit_geodesic_has_flat_ding() {
    let g = Grid::new(40.0, 4097).unwrap();
    let fs = RadialWeight::fubini_study(g);
    let path = exact_geodesic(&fs, &fs.translated(2.0), 65).unwrap();
    let rows = convexity_audit(&path, &TwisterSpec::none(g)).unwrap();
    for r in &rows[1..64] {
        assert!(r.d_second.abs() <= 1e-6, "{r:?}");
        assert!(r.delta_tau <= 1e-7, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dual_of_translate_is_tilted(a in -3.0f64..3.0, k in 1usize..800) {
        let fs = RadialWeight::fubini_study(grid());
        let d0 = legendre_dual(&fs).unwrap();
        let d1 = legendre_dual(&fs.translated(a)).unwrap();
        prop_assert_eq!(&d0.p, &d1.p);
        let want = d0.values[k] + a * d0.p[k];
        prop_assert!((d1.values[k] - want).abs() < 1e-9, "{} {}", d1.values[k], want);
    }

    #[test]
    fn back_transform_recovers_the_weight(x in -5.0f64..5.0) {
        let fs = RadialWeight::fubini_study(grid());
        let d = legendre_dual(&fs).unwrap();
        let exact = fs.eval(x);
        let back = d.conjugate_at(x);
        prop_assert!(back <= exact + 1e-12 && exact - back < 1e-4, "{} {}", back, exact);
    }

    #[test]
    fn geodesics_between_perturbations_stay_convex(c in -0.2f64..0.2, x0 in -3.0f64..3.0) {
        let g = grid();
        let fs = RadialWeight::fubini_study(g);
        let end = fs.perturbed(&g.sample(|x| c * fs.reference().curvature(x0) / (x - x0).cosh())).unwrap();
        prop_assume!(end.check_convex(false).is_ok());
        let path = exact_geodesic(&fs, &end, 17).unwrap();
        let defect = geodesic_defect(&path, &TwisterSpec::none(g)).unwrap();
        prop_assert!(defect.sup_f() < 5e-3, "{}", defect.sup_f());
        for w in path.weights() {
            prop_assert!(w.check_convex(false).is_ok());
            prop_assert_eq!(w.slopes(), fs.slopes());
        }
    }
}
