//! Geodesics in the space of weights: exact ones through the Legendre
//! transform, ε-regularized ones by a space-time Newton solve, and the
//! second-variation audit of the Ding functional along them.

mod audit;
mod epsilon;
mod legendre;
mod path;

pub use audit::{audit_csv, convexity_audit, AuditRow};
pub use epsilon::{epsilon_geodesic, EpsilonGeodesic};
pub use legendre::{exact_geodesic, legendre_dual, LegendreDual};
pub use path::{geodesic_defect, time_grid, DefectField, GeodesicPath};
