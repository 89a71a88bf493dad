//! Finite-sum composite objectives over linear-predictor losses.
//!
//! `F(x) = f(x) + h(x)` with `f(x) = (1/n) Σ_i f_i(x)` and
//! `f_i(x) = ψ_i(a_iᵀx) + (split_l2/2)‖x‖²`. The split L2 share makes every
//! component `split_l2`-strongly convex; `h` is only touched through its prox.

use std::sync::Arc;

use crate::data::{Dataset, SparseColumn};
use crate::error::{Error, Result};
use crate::linalg;
use crate::loss::LossKind;
use crate::regularizer::Regularizer;

/// Problem size and the per-component smoothness / strong convexity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConstants {
    pub n: usize,
    pub dim: usize,
    /// Gradient Lipschitz constant shared by every component.
    pub lipschitz: f64,
    /// Strong convexity constant shared by every component.
    pub strong_convexity: f64,
}

impl ProblemConstants {
    pub fn new(n: usize, dim: usize, lipschitz: f64, strong_convexity: f64) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::InvalidInput("n and dim must be at least 1".into()));
        }
        if !(lipschitz.is_finite() && strong_convexity.is_finite()) {
            return Err(Error::NonFinite("problem constants"));
        }
        if lipschitz <= 0.0 {
            return Err(Error::ZeroLipschitz);
        }
        if strong_convexity < 0.0 || strong_convexity > lipschitz {
            return Err(Error::InvalidInput(format!(
                "need L >= mu >= 0, got L = {lipschitz}, mu = {strong_convexity}"
            )));
        }
        Ok(Self { n, dim, lipschitz, strong_convexity })
    }
}

/// Result of the prox of one component `f_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossProx {
    /// `argmin_x { f_i(x) + ‖x − z‖²/(2γ) }`
    pub point: Vec<f64>,
    /// `f_i'(point)`, recovered as `(z − point)/γ`.
    pub gradient: Vec<f64>,
    /// `ψ_i'(a_iᵀ point)`, the scalar weight of the loss part of the gradient.
    pub derivative: f64,
}

#[derive(Debug, Clone)]
pub struct FiniteSumObjective {
    dataset: Arc<Dataset>,
    loss: LossKind,
    split_l2: f64,
    composite: Regularizer,
}

impl FiniteSumObjective {
    pub fn new(dataset: Dataset, loss: LossKind, split_l2: f64, composite: Regularizer) -> Result<Self> {
        Self::with_shared(Arc::new(dataset), loss, split_l2, composite)
    }

    pub fn with_shared(
        dataset: Arc<Dataset>,
        loss: LossKind,
        split_l2: f64,
        composite: Regularizer,
    ) -> Result<Self> {
        if !(split_l2 >= 0.0 && split_l2.is_finite()) {
            return Err(Error::InvalidInput(format!("split_l2 must be finite and >= 0, got {split_l2}")));
        }
        composite.validate()?;
        if loss == LossKind::Logistic {
            if let Some(b) = dataset.labels().iter().find(|b| **b != 1.0 && **b != -1.0) {
                return Err(Error::InvalidInput(format!("logistic labels must be +1 or -1, found {b}")));
            }
        }
        Ok(Self { dataset, loss, split_l2, composite })
    }

    pub fn n(&self) -> usize {
        self.dataset.n()
    }

    pub fn dim(&self) -> usize {
        self.dataset.dim()
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn shared_dataset(&self) -> Arc<Dataset> {
        Arc::clone(&self.dataset)
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn split_l2(&self) -> f64 {
        self.split_l2
    }

    pub fn composite(&self) -> &Regularizer {
        &self.composite
    }

    /// Same data and loss with the split L2 share removed, for methods that
    /// take the regularizer explicitly.
    pub fn without_split_l2(&self) -> Self {
        Self { split_l2: 0.0, ..self.clone() }
    }

    /// Same smooth part with a different composite term.
    pub fn with_composite(&self, composite: Regularizer) -> Result<Self> {
        composite.validate()?;
        Ok(Self { composite, ..self.clone() })
    }

    #[inline]
    pub fn point(&self, i: usize) -> SparseColumn<'_> {
        self.dataset.point(i)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.n() })
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "point has dimension {}, expected {}",
                x.len(),
                self.dim()
            )));
        }
        if !linalg::all_finite(x) {
            return Err(Error::NonFinite("point"));
        }
        Ok(())
    }

    /// `ψ_i'(a_iᵀx)`
    #[inline]
    pub(crate) fn loss_derivative_at(&self, i: usize, x: &[f64]) -> f64 {
        let t = self.point(i).dot(x);
        self.loss.derivative(t, self.dataset.label(i))
    }

    /// `out += alpha · f_i'(x)`
    #[inline]
    pub(crate) fn add_gradient_to(&self, i: usize, x: &[f64], alpha: f64, out: &mut [f64]) {
        let d = self.loss_derivative_at(i, x);
        self.point(i).add_scaled_to(alpha * d, out);
        if self.split_l2 != 0.0 {
            linalg::axpy(alpha * self.split_l2, x, out);
        }
    }

    #[inline]
    pub(crate) fn gradient_at(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.add_gradient_to(i, x, 1.0, &mut g);
        g
    }

    #[inline]
    pub(crate) fn value_at(&self, i: usize, x: &[f64]) -> f64 {
        let t = self.point(i).dot(x);
        let mut v = self.loss.value(t, self.dataset.label(i));
        if self.split_l2 != 0.0 {
            v += 0.5 * self.split_l2 * linalg::norm_sq(x);
        }
        v
    }

    pub(crate) fn smooth_value(&self, x: &[f64]) -> f64 {
        let n = self.n();
        let loss: f64 = (0..n)
            .map(|i| self.loss.value(self.point(i).dot(x), self.dataset.label(i)))
            .sum::<f64>()
            / n as f64;
        loss + 0.5 * self.split_l2 * linalg::norm_sq(x)
    }

    pub(crate) fn full_gradient_at(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut g = vec![0.0; self.dim()];
        for i in 0..n {
            let d = self.loss_derivative_at(i, x);
            self.point(i).add_scaled_to(d / n as f64, &mut g);
        }
        if self.split_l2 != 0.0 {
            linalg::axpy(self.split_l2, x, &mut g);
        }
        g
    }

    /// `f_i(x)`
    pub fn component_value(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_index(i)?;
        self.check_point(x)?;
        Ok(self.value_at(i, x))
    }

    /// `f_i'(x) = ψ_i'(a_iᵀx)·a_i + split_l2·x`
    pub fn component_gradient(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check_index(i)?;
        self.check_point(x)?;
        Ok(self.gradient_at(i, x))
    }

    /// `f'(x) = (1/n) Σ_i f_i'(x)`
    pub fn full_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(self.full_gradient_at(x))
    }

    /// `f(x)`, or `F(x) = f(x) + h(x)` when `composite` is set.
    pub fn objective_value(&self, x: &[f64], composite: bool) -> Result<f64> {
        self.check_point(x)?;
        let mut v = self.smooth_value(x);
        if composite {
            v += self.composite.value(x);
        }
        Ok(v)
    }

    /// `L = max_i ψ''_max·‖a_i‖² + split_l2`, `μ = split_l2`.
    pub fn estimate_constants(&self) -> Result<ProblemConstants> {
        let curvature = self.loss.curvature_bound();
        let max_sq = self
            .dataset
            .matrix()
            .columns()
            .map(|c| c.norm_sq())
            .fold(0.0, f64::max);
        let lipschitz = curvature * max_sq + self.split_l2;
        ProblemConstants::new(self.n(), self.dim(), lipschitz, self.split_l2)
    }

    /// Prox of the whole component `f_i` (including its split L2 share).
    ///
    /// The minimizer differs from `z` only along `a_i`, so the problem reduces
    /// to a scalar equation in the margin `t = a_iᵀx`.
    pub fn scalar_loss_prox(&self, i: usize, gamma: f64, z: &[f64]) -> Result<LossProx> {
        self.check_index(i)?;
        self.check_point(z)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidStepSize(gamma));
        }
        // Fold the split quadratic into the proximity term.
        let denom = 1.0 + gamma * self.split_l2;
        let gamma_eff = gamma / denom;
        let a = self.point(i);
        let b = self.dataset.label(i);
        let mut point: Vec<f64> = z.iter().map(|v| v / denom).collect();
        let t0 = a.dot(&point);
        let t = self.loss.prox_margin(t0, gamma_eff * a.norm_sq(), b)?;
        let derivative = self.loss.derivative(t, b);
        a.add_scaled_to(-gamma_eff * derivative, &mut point);
        let gradient = z
            .iter()
            .zip(&point)
            .map(|(zv, pv)| (zv - pv) / gamma)
            .collect();
        Ok(LossProx { point, gradient, derivative })
    }
}
