use super::saga::{check_start, reject_composite};
use super::table::{GradientTable, TableMode};
use super::{check_gamma, check_index, check_iterate};
use crate::error::Result;
use crate::linalg;
use crate::objective::FiniteSumObjective;

/// SAGA written in terms of `u = x + γ Σ_i f_i'(φ_i)`; valid without a
/// composite term only. The step size is fixed at construction since `u`
/// depends on it.
#[derive(Debug, Clone)]
pub struct SagaUState {
    u: Vec<f64>,
    table: GradientTable,
    gamma: f64,
    k: u64,
}

impl SagaUState {
    /// `u⁰ = x⁰ + γ Σ_i f_i'(x⁰)`
    pub fn new(obj: &FiniteSumObjective, x0: &[f64], gamma: f64, mode: TableMode) -> Result<Self> {
        check_start(obj, x0)?;
        check_gamma(gamma)?;
        reject_composite(obj, "the u-form of SAGA")?;
        let table = GradientTable::at_point(obj, x0, mode)?;
        let mut u = x0.to_vec();
        linalg::axpy(gamma * obj.n() as f64, table.average(), &mut u);
        Ok(Self { u, table, gamma, k: 0 })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn table(&self) -> &GradientTable {
        &self.table
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `x = u − γ Σ_i f_i'(φ_i)`
    pub fn x(&self) -> Vec<f64> {
        let mut x = self.u.clone();
        linalg::axpy(-self.gamma * self.table.len() as f64, self.table.average(), &mut x);
        x
    }

    pub fn resync(&mut self, obj: &FiniteSumObjective) -> f64 {
        self.table.resync(obj)
    }

    pub fn step(&mut self, obj: &FiniteSumObjective, j: usize) -> Result<()> {
        check_index(j, obj.n())?;
        reject_composite(obj, "the u-form of SAGA")?;
        let x = self.x();
        let inv_n = 1.0 / obj.n() as f64;
        for (u, xv) in self.u.iter_mut().zip(&x) {
            *u += (xv - *u) * inv_n;
        }
        let new = self.table.evaluate(obj, j, &x);
        self.table.replace(obj, j, new)?;
        self.k += 1;
        check_iterate(&self.u, self.k)
    }
}
