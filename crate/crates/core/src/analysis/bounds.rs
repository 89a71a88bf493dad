use crate::error::{Error, Result};
use crate::linalg::{dist_sq, dot, sub};
use crate::objective::{FiniteSumObjective, ProblemConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `E‖x^k − x*‖²` under `γ = 1/(2(μn+L))`.
    CorollarySc,
    /// `E‖x^k − x*‖²` under `γ = 1/(3L)`.
    Adaptive,
    /// `E[F(x̄^k)] − F(x*)` for merely convex components under `γ = 1/(3L)`.
    NonSc,
    /// Rate `1 − μ/(6(μn+L))` for strong convexity holding only on average,
    /// with the strongly convex bracket. Stated without proof; do not rely
    /// on it for certification.
    AverageScUnverified,
}

/// The starting-point quantities every bound depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub consts: ProblemConstants,
    /// `‖x⁰ − x*‖²`
    pub dist0_sq: f64,
    /// `f(x⁰) − ⟨f'(x*), x⁰ − x*⟩ − f(x*)`
    pub bregman0: f64,
}

impl BoundInputs {
    pub fn new(obj: &FiniteSumObjective, consts: ProblemConstants, x0: &[f64], x_star: &[f64]) -> Result<Self> {
        let g = obj.full_gradient(x_star)?;
        let bregman0 = obj.objective_value(x0, false)? - dot(&g, &sub(x0, x_star)) - obj.objective_value(x_star, false)?;
        Ok(Self { consts, dist0_sq: dist_sq(x0, x_star), bregman0 })
    }
}

/// Per-step contraction factor of the geometric bounds.
pub fn contraction_factor(kind: BoundKind, consts: &ProblemConstants) -> Result<f64> {
    let (n, l, mu) = (consts.n as f64, consts.lipschitz, consts.strong_convexity);
    match kind {
        BoundKind::CorollarySc | BoundKind::AverageScUnverified if mu <= 0.0 => {
            Err(Error::NeedsStrongConvexity("this bound"))
        }
        BoundKind::CorollarySc => Ok(1.0 - mu / (2.0 * (mu * n + l))),
        BoundKind::AverageScUnverified => Ok(1.0 - mu / (6.0 * (mu * n + l))),
        BoundKind::Adaptive => Ok(1.0 - (1.0 / (4.0 * n)).min(mu / (3.0 * l))),
        BoundKind::NonSc => Err(Error::Unsupported("the non-strongly-convex bound is not geometric".into())),
    }
}

pub fn bound_value(kind: BoundKind, inputs: &BoundInputs, k: u64) -> Result<f64> {
    let c = &inputs.consts;
    let (n, l, mu) = (c.n as f64, c.lipschitz, c.strong_convexity);
    let (d0, b0) = (inputs.dist0_sq, inputs.bregman0);
    match kind {
        BoundKind::NonSc => {
            if k == 0 {
                return Err(Error::InvalidInput("the averaged-iterate bound needs k >= 1".into()));
            }
            Ok(4.0 * n / k as f64 * (2.0 * l / n * d0 + b0))
        }
        BoundKind::CorollarySc | BoundKind::AverageScUnverified => {
            let rate = contraction_factor(kind, c)?;
            Ok(rate.powf(k as f64) * (d0 + n / (mu * n + l) * b0))
        }
        BoundKind::Adaptive => {
            let rate = contraction_factor(kind, c)?;
            Ok(rate.powf(k as f64) * (d0 + 2.0 * n / (3.0 * l) * b0))
        }
    }
}
