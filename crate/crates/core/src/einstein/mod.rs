//! Twisted Kähler–Einstein equations on the line and their continuity paths.

mod paths;
mod solver;
mod studies;
mod twister;

pub use paths::{cds_path, continuity_path, CdsReport, PathPoint};
pub use solver::{ke_residual, solve_twisted_ke, Gauge, Solution, SolverConfig};
pub use studies::{
    cone_limit_study, normalize_automorphism, sup_distance, uniqueness_experiment, ConeLimitRow, ConeLimitTable,
    UniquenessReport, UNIQUENESS_TOL,
};
pub use twister::{smoothing_profile, TwisterKind, TwisterSpec};
