use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("weight is not convex at nodes {nodes:?}")]
    NotConvex { nodes: Vec<usize> },

    #[error("e^(-tau) is not integrable: slopes ({minus}, {plus})")]
    NonIntegrable { minus: f64, plus: f64 },

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(f64, f64),

    #[error("slope mismatch: ({0}, {1}) vs ({2}, {3})")]
    SlopeMismatch(f64, f64, f64, f64),

    #[error("weights live on different grids")]
    GridMismatch,

    #[error("singular Jacobian, supply gauge")]
    GaugeRequired,

    #[error("newton iteration diverged after {iterations} iterations (last residual {last_residual:e})")]
    Divergence {
        iterations: usize,
        last_residual: f64,
        trace: Vec<f64>,
    },

    #[error("loss of convexity at node {node} (time index {time})")]
    LostConvexity { time: usize, node: usize },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
