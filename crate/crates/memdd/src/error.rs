//! Error taxonomy shared by all modules.

/// Errors produced by mesh construction, parameter validation, solvers, and
/// diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Inconsistent or unusable problem setup (bad mesh/boundary combination,
    /// missing gauge for an all-Neumann potential, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Field data of the wrong shape or with invalid entries.
    #[error("data error: {0}")]
    Data(String),

    /// Scalar parameter outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Function argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A linear or nonlinear solve failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A time step was rejected: Newton did not converge.
    #[error("step failure: Newton stalled at residual {residual:.3e} after {iterations} iterations")]
    StepFailure { residual: f64, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
