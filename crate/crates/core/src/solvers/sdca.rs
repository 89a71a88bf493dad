use super::saga::{check_start, reject_composite};
use super::table::{GradientTable, StoredGradient, TableMode};
use super::{check_index, check_iterate};
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::FiniteSumObjective;

/// Primal view of SDCA for `(1/n)Σ ψ_i(a_iᵀx) + (μ/2)‖x‖²`, where the
/// objective passed in carries only the losses. Dual variables are implicit:
/// `α_i = −f_i'(φ_i)`, and `x = −(1/(μn)) Σ_i f_i'(φ_i)`.
#[derive(Debug, Clone)]
pub struct SdcaState {
    x: Vec<f64>,
    table: GradientTable,
    mu: f64,
    k: u64,
}

impl SdcaState {
    /// Stored gradients start at `x0`.
    pub fn new(obj: &FiniteSumObjective, x0: &[f64], mu: f64, mode: TableMode) -> Result<Self> {
        check_start(obj, x0)?;
        check_loss_only(obj, mu)?;
        let table = GradientTable::at_point(obj, x0, mode)?;
        let mut s = Self { x: Vec::new(), table, mu, k: 0 };
        s.x = s.primal_point();
        Ok(s)
    }

    pub fn from_table(obj: &FiniteSumObjective, table: GradientTable, mu: f64) -> Result<Self> {
        check_loss_only(obj, mu)?;
        let mut s = Self { x: Vec::new(), table, mu, k: 0 };
        s.x = s.primal_point();
        Ok(s)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn table(&self) -> &GradientTable {
        &self.table
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn resync(&mut self, obj: &FiniteSumObjective) -> f64 {
        let drift = self.table.resync(obj);
        self.x = self.primal_point();
        drift
    }

    fn primal_point(&self) -> Vec<f64> {
        self.table.average().iter().map(|g| -g / self.mu).collect()
    }

    /// `φ_j ← prox_γ^{f_j}(z)` with `γ = 1/(μn)` and
    /// `z = −γ Σ_{i≠j} f_i'(φ_i)`; the new stored gradient is `(z − φ_j)/γ`.
    pub fn primal_step(&mut self, obj: &FiniteSumObjective, j: usize) -> Result<()> {
        check_index(j, obj.n())?;
        let n = obj.n() as f64;
        let gamma = 1.0 / (self.mu * n);
        let mut z = vec![0.0; obj.dim()];
        linalg::axpy(-gamma * n, self.table.average(), &mut z);
        self.table.add_entry_to(obj, j, gamma, &mut z);
        let prox = obj.scalar_loss_prox(j, gamma, &z)?;
        let g = match self.table.mode() {
            TableMode::Scalar => StoredGradient::Scalar(prox.derivative),
            TableMode::Dense => StoredGradient::Dense(prox.gradient),
        };
        self.finish(obj, j, g)
    }

    /// Conjugate-free variant: `f_j'(φ_j) ← (1 − β) f_j'(φ_j) + β f_j'(x)`
    /// with `β = μn/(L + μn)`.
    pub fn variant5_step(&mut self, obj: &FiniteSumObjective, j: usize, lipschitz: f64) -> Result<()> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::ZeroLipschitz);
        }
        self.interpolation_step(obj, j, variant5_beta(self.mu, obj.n(), lipschitz))
    }

    /// Moves stored gradient `j` a fraction `beta` toward `f_j'(x)`.
    pub fn interpolation_step(&mut self, obj: &FiniteSumObjective, j: usize, beta: f64) -> Result<()> {
        check_index(j, obj.n())?;
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidInput(format!("interpolation weight {beta} outside [0, 1]")));
        }
        let fresh = self.table.evaluate(obj, j, &self.x);
        let g = match fresh {
            StoredGradient::Scalar(c) => {
                let old = self.table.scalar(j).unwrap_or(0.0);
                StoredGradient::Scalar((1.0 - beta) * old + beta * c)
            }
            StoredGradient::Dense(mut v) => {
                linalg::scale(beta, &mut v);
                self.table.add_entry_to(obj, j, 1.0 - beta, &mut v);
                StoredGradient::Dense(v)
            }
        };
        self.finish(obj, j, g)
    }

    fn finish(&mut self, obj: &FiniteSumObjective, j: usize, g: StoredGradient) -> Result<()> {
        self.table.replace(obj, j, g)?;
        self.x = self.primal_point();
        self.k += 1;
        check_iterate(&self.x, self.k)
    }
}

/// `β = μn/(L + μn)`
pub(crate) fn variant5_beta(mu: f64, n: usize, lipschitz: f64) -> f64 {
    let mn = mu * n as f64;
    mn / (lipschitz + mn)
}

fn check_loss_only(obj: &FiniteSumObjective, mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::NeedsStrongConvexity("SDCA"));
    }
    if obj.split_l2() != 0.0 {
        return Err(Error::Unsupported(
            "SDCA takes the L2 term explicitly; pass loss-only components".into(),
        ));
    }
    reject_composite(obj, "SDCA")
}
