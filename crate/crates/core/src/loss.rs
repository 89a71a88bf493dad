//! Scalar losses `ψ_i(t)` of a linear predictor `t = a_iᵀx`.

use crate::error::{Error, Result};

const PROX_TOL: f64 = 1e-12;
const PROX_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    /// `ψ(t) = ½(t − b)²`
    Squared,
    /// `ψ(t) = log(1 + exp(−b t))` with `b ∈ {−1, +1}`
    Logistic,
}

/// `log(1 + exp(u))` without overflow.
fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Squared => "squared",
            LossKind::Logistic => "logistic",
        }
    }

    #[inline]
    pub fn value(self, t: f64, b: f64) -> f64 {
        match self {
            LossKind::Squared => 0.5 * (t - b) * (t - b),
            LossKind::Logistic => softplus(-b * t),
        }
    }

    #[inline]
    pub fn derivative(self, t: f64, b: f64) -> f64 {
        match self {
            LossKind::Squared => t - b,
            LossKind::Logistic => -b * sigmoid(-b * t),
        }
    }

    #[inline]
    pub fn second_derivative(self, t: f64, b: f64) -> f64 {
        match self {
            LossKind::Squared => 1.0,
            LossKind::Logistic => {
                let s = sigmoid(b * t);
                b * b * s * (1.0 - s)
            }
        }
    }

    /// Upper bound on `ψ''` over all `t` (labels of unit magnitude).
    pub fn curvature_bound(self) -> f64 {
        match self {
            LossKind::Squared => 1.0,
            LossKind::Logistic => 0.25,
        }
    }

    /// Solves `t + kappa·ψ'(t) = t0` for `t`, i.e. the margin of the prox
    /// point of `x ↦ ψ(aᵀx)` when `kappa = γ‖a‖²` and `t0 = aᵀz`.
    pub fn prox_margin(self, t0: f64, kappa: f64, b: f64) -> Result<f64> {
        if kappa == 0.0 {
            return Ok(t0);
        }
        match self {
            LossKind::Squared => Ok((t0 + kappa * b) / (1.0 + kappa)),
            LossKind::Logistic => {
                // |ψ'| < |b| brackets the root; residual is strictly increasing.
                let mut lo = t0 - kappa * b.abs();
                let mut hi = t0 + kappa * b.abs();
                let tol = PROX_TOL * (1.0 + t0.abs());
                let mut t = t0;
                let mut residual = f64::INFINITY;
                for _ in 0..PROX_MAX_ITER {
                    residual = t - t0 + kappa * self.derivative(t, b);
                    if residual.abs() <= tol {
                        return Ok(t);
                    }
                    if residual > 0.0 {
                        hi = t;
                    } else {
                        lo = t;
                    }
                    if hi - lo <= f64::EPSILON * (1.0 + t.abs()) {
                        return Ok(t);
                    }
                    let slope = 1.0 + kappa * self.second_derivative(t, b);
                    let newton = t - residual / slope;
                    t = if newton > lo && newton < hi {
                        newton
                    } else {
                        0.5 * (lo + hi)
                    };
                }
                Err(Error::ProxNotConverged {
                    residual: residual.abs(),
                    iterations: PROX_MAX_ITER,
                })
            }
        }
    }
}
