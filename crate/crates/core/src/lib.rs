//! Radial laboratory for twisted and conical Kähler–Einstein metrics on the
//! Riemann sphere: S¹-invariant metrics reduce to convex functions of
//! `x = log|z|²`, where every equation has a closed-form ground truth.

pub mod einstein;
pub mod error;
pub mod functionals;
pub mod geodesics;
pub mod linalg;
pub mod radial;
pub mod spectral;

pub use error::{LabError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use radial::{Canonical, Density, Grid, RadialWeight};
