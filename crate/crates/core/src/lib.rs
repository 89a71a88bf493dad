//! Variance-reduced incremental gradient methods for composite finite sums.
//!
//! The crate is organised around a [`FiniteSumObjective`]
//! `F(x) = (1/n) Σ f_i(x) + h(x)` where every `f_i(x) = ψ_i(a_iᵀx) + (μ/2)‖x‖²`
//! is a linear-predictor loss with an optional share of an L2 term, and `h`
//! is handled through its proximal operator.
//!
//! - [`solvers`] holds SAGA and its relatives (SAG, SVRG, Finito, primal SDCA,
//!   the SDCA/Finito midpoint) built on a shared [`solvers::GradientTable`].
//! - [`sparse`] is the just-in-time (lagged) sparse least-squares engine.
//! - [`analysis`] evaluates the Lyapunov function, the supporting
//!   inequalities and the convergence bounds, and certifies them on random
//!   instances.

pub mod analysis;
pub mod data;
mod error;
pub mod linalg;
pub mod loss;
pub mod objective;
pub mod optimum;
pub mod regularizer;
pub mod solvers;
pub mod sparse;

pub use data::{CscMatrix, Dataset, SparseColumn};
pub use error::{Error, Result};
pub use loss::LossKind;
pub use objective::{FiniteSumObjective, LossProx, ProblemConstants};
pub use optimum::{compute_reference_optimum, ReferenceOptimum};
pub use regularizer::Regularizer;
