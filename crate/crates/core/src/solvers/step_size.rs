use crate::error::{Error, Result};
use crate::objective::ProblemConstants;

/// Rule for the constant step size `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSizePolicy {
    /// `1/(2(μn + L))`, the strongly convex choice.
    StronglyConvex,
    /// `1/(3(μn + L))`, for strong convexity that holds only on average.
    AverageStronglyConvex,
    /// `1/(3L)`, needs no knowledge of `μ`.
    Adaptive,
    Manual(f64),
}

pub fn step_size(policy: StepSizePolicy, consts: &ProblemConstants) -> Result<f64> {
    let (n, l, mu) = (consts.n as f64, consts.lipschitz, consts.strong_convexity);
    if !(l > 0.0) {
        return Err(Error::ZeroLipschitz);
    }
    let gamma = match policy {
        StepSizePolicy::StronglyConvex | StepSizePolicy::AverageStronglyConvex if mu <= 0.0 => {
            return Err(Error::NeedsStrongConvexity("this step-size rule"));
        }
        StepSizePolicy::StronglyConvex => 1.0 / (2.0 * (mu * n + l)),
        StepSizePolicy::AverageStronglyConvex => 1.0 / (3.0 * (mu * n + l)),
        StepSizePolicy::Adaptive => 1.0 / (3.0 * l),
        StepSizePolicy::Manual(g) => g,
    };
    super::check_gamma(gamma)?;
    Ok(gamma)
}
