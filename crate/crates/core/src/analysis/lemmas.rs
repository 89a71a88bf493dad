use crate::error::{Error, Result};
use crate::linalg::{dist_sq, dot, norm_sq, sub};
use crate::objective::{FiniteSumObjective, ProblemConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// Strong-convexity lower bound for a single `μ`-convex, `L`-smooth `f_i`.
    StrongLb,
    /// Inner-product bound on `⟨f'(x), x* − x⟩`.
    IpBound,
    /// Stored-gradient deviations bounded by the Bregman terms of `T`.
    GradDiff,
    /// Second moment of the SAGA step `w − x + γ f'(x*)`.
    WChange,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [Lemma::StrongLb, Lemma::IpBound, Lemma::GradDiff, Lemma::WChange];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::StrongLb => "strong_lb",
            Lemma::IpBound => "ip_bound",
            Lemma::GradDiff => "grad_diff",
            Lemma::WChange => "wchange",
        }
    }
}

/// Quantities each inequality is stated over.
#[derive(Debug, Clone, Copy)]
pub enum LemmaInputs<'a> {
    StrongLb { component: usize, x: &'a [f64], y: &'a [f64] },
    IpBound { x: &'a [f64], x_star: &'a [f64] },
    GradDiff { phi: &'a [Vec<f64>], x_star: &'a [f64] },
    WChange { x: &'a [f64], phi: &'a [Vec<f64>], x_star: &'a [f64], gamma: f64, beta: f64 },
}

impl LemmaInputs<'_> {
    pub fn lemma(&self) -> Lemma {
        match self {
            LemmaInputs::StrongLb { .. } => Lemma::StrongLb,
            LemmaInputs::IpBound { .. } => Lemma::IpBound,
            LemmaInputs::GradDiff { .. } => Lemma::GradDiff,
            LemmaInputs::WChange { .. } => Lemma::WChange,
        }
    }
}

/// Right-hand side minus left-hand side; each inequality asserts `≥ 0`.
/// `μ` and `L` are taken from `consts` and apply to every component.
pub fn lemma_gap(obj: &FiniteSumObjective, consts: &ProblemConstants, inputs: &LemmaInputs) -> Result<f64> {
    let (l, mu) = (consts.lipschitz, consts.strong_convexity);
    match *inputs {
        LemmaInputs::StrongLb { component: i, x, y } => {
            if !(l > mu) {
                return Err(Error::InvalidInput("strong_lb needs L > mu".into()));
            }
            let gx = obj.component_gradient(i, x)?;
            let gy = obj.component_gradient(i, y)?;
            let dg = sub(&gx, &gy);
            let yx = sub(y, x);
            let lower = obj.component_value(i, y)?
                + dot(&gy, &sub(x, y))
                + norm_sq(&dg) / (2.0 * (l - mu))
                + mu * l / (2.0 * (l - mu)) * norm_sq(&yx)
                + mu / (l - mu) * dot(&dg, &yx);
            Ok(obj.component_value(i, x)? - lower)
        }
        LemmaInputs::IpBound { x, x_star } => {
            let n = obj.n();
            let gx = obj.full_gradient(x)?;
            let gs = obj.full_gradient(x_star)?;
            let lhs = dot(&gx, &sub(x_star, x));
            let spread: f64 = (0..n)
                .map(|i| dist_sq(&obj.gradient_at(i, x_star), &obj.gradient_at(i, x)))
                .sum();
            let rhs = (l - mu) / l * (obj.smooth_value(x_star) - obj.smooth_value(x))
                - mu / 2.0 * dist_sq(x_star, x)
                - spread / (2.0 * l * n as f64)
                - mu / l * dot(&gs, &sub(x, x_star));
            Ok(rhs - lhs)
        }
        LemmaInputs::GradDiff { phi, x_star } => {
            check_phi(obj, phi)?;
            let n = obj.n() as f64;
            let mut lhs = 0.0;
            let mut bregman = 0.0;
            for (i, p) in phi.iter().enumerate() {
                let gs = obj.gradient_at(i, x_star);
                lhs += dist_sq(&obj.gradient_at(i, p), &gs) / n;
                bregman += (obj.value_at(i, p) - dot(&gs, &sub(p, x_star))) / n;
            }
            bregman -= obj.smooth_value(x_star);
            Ok(2.0 * l * bregman - lhs)
        }
        LemmaInputs::WChange { x, phi, x_star, gamma, beta } => {
            if !(beta > 0.0) {
                return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
            }
            check_phi(obj, phi)?;
            let n = obj.n();
            let d = obj.dim();
            let stored: Vec<Vec<f64>> = phi.iter().enumerate().map(|(i, p)| obj.gradient_at(i, p)).collect();
            let mut avg = vec![0.0; d];
            for g in &stored {
                crate::linalg::axpy(1.0 / n as f64, g, &mut avg);
            }
            let gs_full = obj.full_gradient(x_star)?;
            let gx_full = obj.full_gradient(x)?;
            let (mut lhs, mut phi_dev, mut x_dev) = (0.0, 0.0, 0.0);
            for j in 0..n {
                let gx = obj.gradient_at(j, x);
                let gs = obj.gradient_at(j, x_star);
                // w − x + γ f'(x*) = −γ(f_j'(x) − f_j'(φ_j) + avg − f'(x*))
                let v: f64 = (0..d)
                    .map(|t| (gamma * (gx[t] - stored[j][t] + avg[t] - gs_full[t])).powi(2))
                    .sum();
                lhs += v / n as f64;
                phi_dev += dist_sq(&stored[j], &gs) / n as f64;
                x_dev += dist_sq(&gx, &gs) / n as f64;
            }
            let g2 = gamma * gamma;
            let rhs = g2 * (1.0 + 1.0 / beta) * phi_dev + g2 * (1.0 + beta) * x_dev
                - g2 * beta * dist_sq(&gx_full, &gs_full);
            Ok(rhs - lhs)
        }
    }
}

fn check_phi(obj: &FiniteSumObjective, phi: &[Vec<f64>]) -> Result<()> {
    if phi.len() != obj.n() || phi.iter().any(|p| p.len() != obj.dim()) {
        return Err(Error::InvalidInput("stored points do not match the objective".into()));
    }
    Ok(())
}
