use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::{FiniteSumObjective, ProblemConstants};

/// Fixed-point residual allowed for a snapshot's `x*`.
pub const SNAPSHOT_OPTIMUM_TOLERANCE: f64 = 1e-10;

/// Constants of the Lyapunov argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovParams {
    pub gamma: f64,
    pub c: f64,
    pub kappa: f64,
    pub beta: f64,
}

impl LyapunovParams {
    /// `γ = 1/(2(μn+L))`, `c = 1/(2γ(1−γμ)n)`, `κ = 1/(γμ)`, `β = (2μn+L)/L`.
    pub fn strongly_convex(consts: &ProblemConstants) -> Result<Self> {
        let (n, l, mu) = (consts.n as f64, consts.lipschitz, consts.strong_convexity);
        if mu <= 0.0 {
            return Err(Error::NeedsStrongConvexity("the strongly convex Lyapunov constants"));
        }
        let gamma = 1.0 / (2.0 * (mu * n + l));
        Ok(Self { gamma, c: c_for(gamma, mu, n), kappa: 1.0 / (gamma * mu), beta: (2.0 * mu * n + l) / l })
    }

    /// `γ = 1/(3L)`, the same `c`, `β = 2` and `1/κ = min(1/(4n), μ/(3L))`.
    pub fn adaptive(consts: &ProblemConstants) -> Result<Self> {
        let (n, l, mu) = (consts.n as f64, consts.lipschitz, consts.strong_convexity);
        if !(l > 0.0) {
            return Err(Error::ZeroLipschitz);
        }
        let gamma = 1.0 / (3.0 * l);
        let inv_kappa = (1.0 / (4.0 * n)).min(mu / (3.0 * l));
        Ok(Self { gamma, c: c_for(gamma, mu, n), kappa: 1.0 / inv_kappa, beta: 2.0 })
    }

    /// `1 − 1/κ`
    pub fn rate(&self) -> f64 {
        1.0 - 1.0 / self.kappa
    }
}

fn c_for(gamma: f64, mu: f64, n: f64) -> f64 {
    1.0 / (2.0 * gamma * (1.0 - gamma * mu) * n)
}

/// Iterate, stored points and reference optimum at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSnapshot {
    pub x: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    pub x_star: Vec<f64>,
    pub consts: ProblemConstants,
}

impl ProblemSnapshot {
    /// Validates shapes and that `x*` is a fixed point of the prox-gradient map.
    pub fn new(obj: &FiniteSumObjective, x: Vec<f64>, phi: Vec<Vec<f64>>, x_star: Vec<f64>) -> Result<Self> {
        let consts = obj.estimate_constants()?;
        let d = obj.dim();
        if x.len() != d || x_star.len() != d || phi.len() != obj.n() || phi.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidInput("snapshot shapes do not match the objective".into()));
        }
        let step = 1.0 / consts.lipschitz;
        let mut next = x_star.clone();
        linalg::axpy(-step, &obj.full_gradient(&x_star)?, &mut next);
        obj.composite().prox_in_place(step, &mut next)?;
        let residual = linalg::dist_sq(&next, &x_star).sqrt();
        if residual > SNAPSHOT_OPTIMUM_TOLERANCE {
            return Err(Error::InvalidInput(format!("x_star is not optimal: residual {residual:e}")));
        }
        Ok(Self { x, phi, x_star, consts })
    }
}

/// `T = (1/n)Σ f_i(φ_i) − f(x*) − (1/n)Σ⟨f_i'(x*), φ_i − x*⟩ + c‖x − x*‖²`
pub fn lyapunov_value(snap: &ProblemSnapshot, obj: &FiniteSumObjective, c: f64) -> Result<f64> {
    Ok(lyapunov_parts(obj, &snap.phi, &snap.x_star) + c * linalg::dist_sq(&snap.x, &snap.x_star))
}

/// The function-value part of `T` (everything except `c‖x − x*‖²`).
fn lyapunov_parts(obj: &FiniteSumObjective, phi: &[Vec<f64>], x_star: &[f64]) -> f64 {
    let n = obj.n();
    let f_star = obj.smooth_value(x_star);
    let mut sum = 0.0;
    for (i, p) in phi.iter().enumerate() {
        let g = obj.gradient_at(i, x_star);
        sum += obj.value_at(i, p) - linalg::dot(&g, &linalg::sub(p, x_star));
    }
    sum / n as f64 - f_star
}

/// `E[T^{k+1}]` after one SAGA step with step size `params.gamma`, averaged
/// exactly over the `n` choices of the sampled index.
pub fn expected_lyapunov_next(snap: &ProblemSnapshot, obj: &FiniteSumObjective, params: &LyapunovParams) -> Result<f64> {
    let n = obj.n();
    let gamma = params.gamma;
    let grads: Vec<Vec<f64>> = snap.phi.iter().enumerate().map(|(i, p)| obj.gradient_at(i, p)).collect();
    let mut avg = vec![0.0; obj.dim()];
    for g in &grads {
        linalg::axpy(1.0 / n as f64, g, &mut avg);
    }
    let mut total = 0.0;
    for j in 0..n {
        let fresh = obj.gradient_at(j, &snap.x);
        let mut w = snap.x.clone();
        for t in 0..w.len() {
            w[t] -= gamma * (fresh[t] - grads[j][t] + avg[t]);
        }
        let x_next = obj.composite().prox(gamma, &w)?;
        let mut phi_next = snap.phi.clone();
        phi_next[j] = snap.x.clone();
        total += lyapunov_parts(obj, &phi_next, &snap.x_star)
            + params.c * linalg::dist_sq(&x_next, &snap.x_star);
    }
    Ok(total / n as f64)
}
