//! SAGA and related incremental gradient methods.
//!
//! Every method keeps a [`GradientTable`] of stored component gradients
//! `f_i'(φ_i)` (SVRG keeps a single snapshot instead). State types own their
//! tables; steps take the sampled index `j` explicitly so that runs can be
//! replayed against each other.

mod finito;
mod run;
mod saga;
mod saga_u;
mod sdca;
mod step_size;
mod svrg;
mod table;

pub use finito::FinitoState;
pub use run::{
    epoch_indices, resolve_step_size, run, run_with_rng, Method, RunConfig, RunResult, Sampling, TableInit, TraceRecord,
};
pub use saga::SagaState;
pub use saga_u::SagaUState;
pub use sdca::SdcaState;
pub use step_size::{step_size, StepSizePolicy};
pub use svrg::{svrg_run, SvrgState};
pub use table::{GradientTable, StoredGradient, TableMode};

use crate::error::{Error, Result};
use crate::linalg;

/// Iterates whose norm exceeds this are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

pub(crate) fn check_iterate(x: &[f64], step: u64) -> Result<()> {
    if !linalg::all_finite(x) || linalg::norm_sq(x) > DIVERGENCE_NORM * DIVERGENCE_NORM {
        return Err(Error::Diverged { step });
    }
    Ok(())
}

pub(crate) fn check_index(j: usize, n: usize) -> Result<()> {
    if j < n {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: j, len: n })
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStepSize(gamma))
    }
}
