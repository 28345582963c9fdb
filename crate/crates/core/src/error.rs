use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("edge ({i}, {j}) references a node outside 0..{num_nodes}")]
    NodeOutOfRange { i: usize, j: usize, num_nodes: usize },

    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },

    #[error("edge ({i}, {j}) has nonpositive weight {w}")]
    NonpositiveWeight { i: usize, j: usize, w: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{stage} did not converge (residual {residual:e})")]
    SolverFailure {
        stage: &'static str,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("numerical failure in {stage}: objective became {value} after {iterations} iterations")]
    NumericalFailure {
        stage: &'static str,
        value: f64,
        iterations: usize,
        trace: Vec<f64>,
    },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("fold {fold}: {reason}")]
    DegenerateFold { fold: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SolverFailure { .. } | Error::NumericalFailure { .. } | Error::UndefinedMetric(_)
        )
    }
}
