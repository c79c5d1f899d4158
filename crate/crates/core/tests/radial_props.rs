use proptest::prelude::*;
use radial_kahler::radial::diff::{integrate, quadrature_weights};
use radial_kahler::radial::{barycenter, ma_density, volume_density};
use radial_kahler::{Grid, RadialWeight};

fn grid() -> Grid {
    Grid::new(40.0, 4097).unwrap()
}

#[test]
fn closed_forms_carry_their_mass() {
    let g = grid();
    assert!((ma_density(&RadialWeight::fubini_study(g)).unwrap().mass - 2.0).abs() < 1e-12);
    for beta in [0.25, 0.5, 0.75] {
        let fb = RadialWeight::football(beta, g).unwrap();
        let mass = ma_density(&fb).unwrap().mass;
        // slow tails at small beta lean on the exponential tail correction
        assert!((mass - 2.0 * beta).abs() < 1e-8, "{beta}: {mass}");
        assert!(volume_density(&fb).unwrap().mass > 0.0);
    }
}

#[test]
fn quadrature_is_exact_on_constants() {
    let g = Grid::new(10.0, 129).unwrap();
    let q = quadrature_weights(g.len(), g.spacing(), None, None);
    assert!((integrate(&vec![1.0; g.len()], &q) - 20.0).abs() < 1e-12);
}

#[test]
fn table_round_trip() {
    let g = Grid::new(12.0, 257).unwrap();
    let fb = RadialWeight::football(0.3, g).unwrap();
    let back = RadialWeight::from_table(&fb.to_table()).unwrap();
    assert_eq!(back.slopes(), fb.slopes());
    assert!((0..g.len()).all(|i| (back.value(i) - fb.value(i)).abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn volume_is_translation_invariant(a in -5.0f64..5.0, beta in 0.1f64..0.9) {
        let g = grid();
        let fb = RadialWeight::football(beta, g).unwrap();
        let v0 = volume_density(&fb).unwrap().mass;
        let v1 = volume_density(&fb.translated(a)).unwrap().mass;
        prop_assert!((v0 - v1).abs() < 1e-9 * v0, "{} {}", v0, v1);
    }

    #[test]
    fn barycenter_moves_with_translation(a in -5.0f64..5.0) {
        let fs = RadialWeight::fubini_study(grid());
        let b = barycenter(&fs.translated(a)).unwrap();
        prop_assert!((b - a).abs() < 1e-9, "{} {}", b, a);
    }

    #[test]
    fn constants_shift_values_not_curvature(c in -10.0f64..10.0) {
        let g = Grid::new(20.0, 401).unwrap();
        let fs = RadialWeight::fubini_study(g);
        let s = fs.add_constant(c);
        prop_assert_eq!(s.second_derivative(), fs.second_derivative());
        prop_assert!((0..g.len()).all(|i| (s.value(i) - fs.value(i) - c).abs() < 1e-12));
    }

    #[test]
    fn scaling_scales_slopes(c in 0.05f64..2.0, beta in 0.1f64..0.9) {
        let fb = RadialWeight::football(beta, Grid::new(20.0, 401).unwrap()).unwrap();
        let s = fb.scaled(c);
        prop_assert_eq!(s.slopes(), (-c * beta, c * beta));
        prop_assert!((s.degree() - c * fb.degree()).abs() < 1e-14);
    }
}
