use super::table::{GradientTable, StoredGradient, TableMode};
use super::{check_gamma, check_index, check_iterate};
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::FiniteSumObjective;

/// Iterate plus gradient table shared by SAGA, SAG and explicit-L2 SAGA.
#[derive(Debug, Clone)]
pub struct SagaState {
    x: Vec<f64>,
    table: GradientTable,
    k: u64,
}

impl SagaState {
    /// Starts at `x0` with every stored gradient evaluated at `x0`.
    pub fn new(obj: &FiniteSumObjective, x0: &[f64], mode: TableMode) -> Result<Self> {
        check_start(obj, x0)?;
        Ok(Self { x: x0.to_vec(), table: GradientTable::at_point(obj, x0, mode)?, k: 0 })
    }

    pub fn from_parts(x: Vec<f64>, table: GradientTable) -> Self {
        Self { x, table, k: 0 }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn table(&self) -> &GradientTable {
        &self.table
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn resync(&mut self, obj: &FiniteSumObjective) -> f64 {
        self.table.resync(obj)
    }

    /// `f_j'(x) − f_j'(φ_j) + g_avg`
    pub fn saga_direction(&self, obj: &FiniteSumObjective, j: usize) -> Vec<f64> {
        let new = self.table.evaluate(obj, j, &self.x);
        self.direction(obj, j, &new, 1.0)
    }

    /// `(f_j'(x) − f_j'(φ_j))/n + g_avg`
    pub fn sag_direction(&self, obj: &FiniteSumObjective, j: usize) -> Vec<f64> {
        let new = self.table.evaluate(obj, j, &self.x);
        self.direction(obj, j, &new, 1.0 / self.table.len() as f64)
    }

    fn direction(&self, obj: &FiniteSumObjective, j: usize, new: &StoredGradient, weight: f64) -> Vec<f64> {
        let mut dir = self.table.average().to_vec();
        match new {
            StoredGradient::Scalar(c) => {
                let old = self.table.scalar(j).unwrap_or(0.0);
                obj.point(j).add_scaled_to(weight * (c - old), &mut dir);
            }
            StoredGradient::Dense(v) => {
                linalg::axpy(weight, v, &mut dir);
                self.table.add_entry_to(obj, j, -weight, &mut dir);
            }
        }
        dir
    }

    /// One SAGA step: `x ← prox_γ(x − γ(f_j'(x) − f_j'(φ_j) + g_avg))`, then
    /// `φ_j ← x` in the table.
    pub fn saga_step(&mut self, obj: &FiniteSumObjective, j: usize, gamma: f64) -> Result<()> {
        check_index(j, obj.n())?;
        check_gamma(gamma)?;
        let new = self.table.evaluate(obj, j, &self.x);
        let dir = self.direction(obj, j, &new, 1.0);
        linalg::axpy(-gamma, &dir, &mut self.x);
        obj.composite().prox_in_place(gamma, &mut self.x)?;
        self.finish(obj, j, new)
    }

    /// One SAG step: `x ← x − γ((f_j'(x) − f_j'(φ_j))/n + g_avg)`.
    pub fn sag_step(&mut self, obj: &FiniteSumObjective, j: usize, gamma: f64) -> Result<()> {
        check_index(j, obj.n())?;
        check_gamma(gamma)?;
        reject_composite(obj, "SAG")?;
        let new = self.table.evaluate(obj, j, &self.x);
        let dir = self.direction(obj, j, &new, 1.0 / obj.n() as f64);
        linalg::axpy(-gamma, &dir, &mut self.x);
        self.finish(obj, j, new)
    }

    /// SAGA with the regularizer `μ/2‖x‖²` kept out of the components:
    /// `x ← (1 − γμ)x − γ(f_j'(x) − f_j'(φ_j) + g_avg)`.
    pub fn saga_step_explicit_l2(
        &mut self,
        obj: &FiniteSumObjective,
        j: usize,
        gamma: f64,
        mu: f64,
    ) -> Result<()> {
        check_index(j, obj.n())?;
        check_gamma(gamma)?;
        check_explicit_l2(obj, gamma, mu)?;
        let new = self.table.evaluate(obj, j, &self.x);
        let dir = self.direction(obj, j, &new, 1.0);
        linalg::scale(1.0 - gamma * mu, &mut self.x);
        linalg::axpy(-gamma, &dir, &mut self.x);
        self.finish(obj, j, new)
    }

    /// First-pass step for a table that started at zero: point `j` is the
    /// `seen`-th point introduced, and the direction averages only the
    /// gradients introduced so far.
    pub fn warm_start_step(
        &mut self,
        obj: &FiniteSumObjective,
        j: usize,
        gamma: f64,
        seen: usize,
    ) -> Result<()> {
        check_index(j, obj.n())?;
        check_gamma(gamma)?;
        if seen == 0 || seen > obj.n() {
            return Err(Error::InvalidInput(format!("seen = {seen} outside 1..={}", obj.n())));
        }
        let new = self.table.evaluate(obj, j, &self.x);
        self.table.replace(obj, j, new)?;
        let scale = obj.n() as f64 / seen as f64;
        linalg::axpy(-gamma * scale, self.table.average(), &mut self.x);
        obj.composite().prox_in_place(gamma, &mut self.x)?;
        self.k += 1;
        check_iterate(&self.x, self.k)
    }

    fn finish(&mut self, obj: &FiniteSumObjective, j: usize, new: StoredGradient) -> Result<()> {
        self.table.replace(obj, j, new)?;
        self.k += 1;
        check_iterate(&self.x, self.k)
    }
}

pub(crate) fn check_start(obj: &FiniteSumObjective, x0: &[f64]) -> Result<()> {
    if x0.len() != obj.dim() {
        return Err(Error::InvalidInput(format!(
            "starting point has dimension {}, expected {}",
            x0.len(),
            obj.dim()
        )));
    }
    if !linalg::all_finite(x0) {
        return Err(Error::NonFinite("starting point"));
    }
    Ok(())
}

pub(crate) fn reject_composite(obj: &FiniteSumObjective, method: &str) -> Result<()> {
    if obj.composite().is_none() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{method} has no proximal step; composite term not allowed")))
    }
}

pub(crate) fn check_explicit_l2(obj: &FiniteSumObjective, gamma: f64, mu: f64) -> Result<()> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidInput(format!("explicit L2 strength must be >= 0, got {mu}")));
    }
    if obj.split_l2() != 0.0 {
        return Err(Error::Unsupported(
            "explicit L2 needs loss-only components; the objective already splits an L2 term".into(),
        ));
    }
    reject_composite(obj, "explicit-L2 SAGA")?;
    if gamma * mu >= 1.0 {
        return Err(Error::InvalidStepSize(gamma));
    }
    Ok(())
}
