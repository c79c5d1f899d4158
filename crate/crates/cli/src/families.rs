//! Seeded, convexity-preserving perturbation families.

use radial_kahler::{LabError, RadialWeight, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bump centers are drawn from `[-BUMP_RANGE, BUMP_RANGE]`.
pub const BUMP_RANGE: f64 = 4.0;
const MAX_DRAWS: usize = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ c_k sech(x - x_k)` sampled on the base grid, with `|c_k|` at most
/// `amplitude` times the base curvature at `x_k`, so that a single bump
/// cannot overturn the curvature where it peaks.
pub fn sech_bumps(base: &RadialWeight, bumps: usize, amplitude: f64, rng: &mut impl Rng) -> Vec<f64> {
    let g = base.grid();
    let nodes = g.nodes();
    let curv = base.second_derivative();
    let mut v = vec![0.0; g.len()];
    for _ in 0..bumps {
        let x0 = rng.gen_range(-BUMP_RANGE..=BUMP_RANGE);
        let c = rng.gen_range(-amplitude..=amplitude) * curv[g.nearest(x0)];
        for (vi, x) in v.iter_mut().zip(&nodes) {
            *vi += c / (x - x0).cosh();
        }
    }
    v
}

/// `base + Σ c_k sech(x - x_k)`, redrawn until the result is convex.
pub fn perturbation(base: &RadialWeight, bumps: usize, amplitude: f64, rng: &mut impl Rng) -> Result<RadialWeight> {
    for _ in 0..MAX_DRAWS {
        let v = sech_bumps(base, bumps, amplitude, rng);
        let w = base.perturbed(&v)?;
        if w.check_convex(false).is_ok() {
            return Ok(w);
        }
    }
    Err(LabError::InvalidInput(format!(
        "no convex perturbation found in {MAX_DRAWS} draws; lower the amplitude"
    )))
}

/// `count` independent perturbations of `base`.
pub fn perturbations(
    base: &RadialWeight,
    count: usize,
    bumps: usize,
    amplitude: f64,
    rng: &mut impl Rng,
) -> Result<Vec<RadialWeight>> {
    (0..count).map(|_| perturbation(base, bumps, amplitude, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use radial_kahler::Grid;

    #[test]
    fn seeded_and_convex() {
        let g = Grid::new(20.0, 401).unwrap();
        let fs = RadialWeight::fubini_study(g);
        let a = perturbations(&fs, 4, 2, 0.5, &mut rng(7)).unwrap();
        let b = perturbations(&fs, 4, 2, 0.5, &mut rng(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, perturbations(&fs, 4, 2, 0.5, &mut rng(8)).unwrap());
        for w in &a {
            assert!(w.check_convex(false).is_ok());
            assert_eq!(w.slopes(), fs.slopes());
            assert_ne!(w.remainder(), fs.remainder());
        }
    }
}
