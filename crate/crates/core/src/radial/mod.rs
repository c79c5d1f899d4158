//! Radial reduction: S¹-invariant weights on ℙ¹ as convex functions of
//! `x = log|z|²`, with their curvature, volume and Ricci densities.

pub mod density;
pub mod diff;
pub mod grid;
pub mod profile;
pub mod weight;

pub use density::{barycenter, ma_density, ricci_density, volume_density, Density};
pub use grid::Grid;
pub use profile::{Profile, Term};
pub use weight::{Canonical, RadialWeight};

use crate::error::Result;

pub fn build_grid(x_max: f64, n: usize) -> Result<Grid> {
    Grid::new(x_max, n)
}

pub fn canonical_weight(kind: Canonical, grid: Grid) -> Result<RadialWeight> {
    RadialWeight::canonical(kind, grid)
}
