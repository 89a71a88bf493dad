//! Numerical certification of the convergence theory: the Lyapunov function
//! and its contraction, the supporting inequalities, the rate bounds and the
//! variance-reduction estimator.

mod bounds;
mod certify;
mod estimator;
mod instances;
mod lemmas;
mod lyapunov;

pub use bounds::{bound_value, contraction_factor, BoundInputs, BoundKind};
pub use certify::{certify, CertificationReport, CertifyOptions, PropertyResult};
pub use estimator::{theta_estimator_stats, theta_moments_by_enumeration, EstimatorSpec, EstimatorStats, Outcome};
pub use instances::{random_instance, random_snapshot, Instance, InstanceKind};
pub use lemmas::{lemma_gap, Lemma, LemmaInputs};
pub use lyapunov::{expected_lyapunov_next, lyapunov_value, LyapunovParams, ProblemSnapshot};
