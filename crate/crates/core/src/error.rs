use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("step size must be positive and finite, got {0}")]
    InvalidStepSize(f64),

    #[error("{0} requires strong convexity (mu > 0); use the adaptive step size 1/(3L) instead")]
    NeedsStrongConvexity(&'static str),

    #[error("no curvature in the problem: Lipschitz constant is zero, no valid step size")]
    ZeroLipschitz,

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("iterate diverged at step {step}")]
    Diverged { step: u64 },

    #[error("scalar prox solve did not converge: residual {residual:e} after {iterations} iterations")]
    ProxNotConverged { residual: f64, iterations: usize },

    #[error("reference optimum not reached: residual {residual:e} after {iterations} iterations")]
    OptimumNotConverged { residual: f64, iterations: usize },

    #[error("lag gap {gap} exceeds lag-scaling table of length {len}")]
    LagTableExhausted { gap: u64, len: usize },
}

impl Error {
    /// True for failures of the numerics (divergence, non-convergence) as
    /// opposed to bad inputs or configurations.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Diverged { .. }
                | Error::ProxNotConverged { .. }
                | Error::OptimumNotConverged { .. }
                | Error::LagTableExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
