use super::saga::{check_start, reject_composite};
use super::table::{GradientTable, StoredGradient, TableMode};
use super::{check_gamma, check_index, check_iterate};
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::FiniteSumObjective;

/// Stored points `φ_i` with their mean, the gradient table, and the last
/// iterate. Shared by Finito and the SDCA/Finito midpoint method.
#[derive(Debug, Clone)]
pub struct FinitoState {
    phi: Vec<f64>,
    phi_mean: Vec<f64>,
    table: GradientTable,
    x: Vec<f64>,
    mu: f64,
    dim: usize,
    k: u64,
}

impl FinitoState {
    /// Every `φ_i = x0`. `mu` is the strong convexity the method relies on.
    pub fn new(obj: &FiniteSumObjective, x0: &[f64], mu: f64, mode: TableMode) -> Result<Self> {
        check_start(obj, x0)?;
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::NeedsStrongConvexity("Finito"));
        }
        reject_composite(obj, "Finito")?;
        let n = obj.n();
        Ok(Self {
            phi: x0.repeat(n),
            phi_mean: x0.to_vec(),
            table: GradientTable::at_point(obj, x0, mode)?,
            x: x0.to_vec(),
            mu,
            dim: obj.dim(),
            k: 0,
        })
    }

    /// Separate `φ_i` per point.
    pub fn from_points(obj: &FiniteSumObjective, points: &[Vec<f64>], mu: f64, mode: TableMode) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::InvalidInput("no points".into()))?;
        let mut s = Self::new(obj, first, mu, mode)?;
        s.table = GradientTable::at_points(obj, points, mode)?;
        s.phi = points.concat();
        s.phi_mean = mean_of(&s.phi, obj.n(), s.dim);
        Ok(s)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn phi(&self, i: usize) -> &[f64] {
        &self.phi[i * self.dim..(i + 1) * self.dim]
    }

    pub fn phi_mean(&self) -> &[f64] {
        &self.phi_mean
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

    /// Re-syncs both running averages; returns the larger drift.
    pub fn resync(&mut self, obj: &FiniteSumObjective) -> f64 {
        let exact = mean_of(&self.phi, obj.n(), self.dim);
        let drift = linalg::max_abs_diff(&exact, &self.phi_mean);
        self.phi_mean = exact;
        drift.max(self.table.resync(obj))
    }

    /// `φ̄ − γ Σ_i f_i'(φ_i)`, the point the next Finito step writes.
    pub fn next_point(&self, gamma: f64) -> Vec<f64> {
        let mut x = self.phi_mean.clone();
        linalg::axpy(-gamma * self.table.len() as f64, self.table.average(), &mut x);
        x
    }

    pub fn finito_step(&mut self, obj: &FiniteSumObjective, j: usize, gamma: f64) -> Result<()> {
        check_index(j, obj.n())?;
        check_gamma(gamma)?;
        let x = self.next_point(gamma);
        let g = self.table.evaluate(obj, j, &x);
        self.set_phi(obj, j, x, g)
    }

    /// Leave-one-out prox step: `φ_j ← prox_{1/(μ(n−1))}^{f_j}(z)` with
    /// `z = mean_{i≠j} φ_i − (1/(μ(n−1))) Σ_{i≠j} f_i'(φ_i)`.
    pub fn midpoint_step(&mut self, obj: &FiniteSumObjective, j: usize) -> Result<()> {
        check_index(j, obj.n())?;
        let n = obj.n();
        if n < 2 {
            return Err(Error::InvalidInput("midpoint method needs at least two components".into()));
        }
        let m = (n - 1) as f64;
        let gamma = 1.0 / (self.mu * m);
        let mut z = vec![0.0; self.dim];
        for ((zv, mean), pj) in z.iter_mut().zip(&self.phi_mean).zip(self.phi(j)) {
            *zv = (n as f64 * mean - pj) / m;
        }
        linalg::axpy(-gamma * n as f64, self.table.average(), &mut z);
        self.table.add_entry_to(obj, j, gamma, &mut z);
        let prox = obj.scalar_loss_prox(j, gamma, &z)?;
        let g = match self.table.mode() {
            TableMode::Scalar => StoredGradient::Scalar(prox.derivative),
            TableMode::Dense => StoredGradient::Dense(prox.gradient),
        };
        self.set_phi(obj, j, prox.point, g)
    }

    /// `(1/n)Σφ_i − (1/(μn))Σ f_i'(φ_i)`, which equals `φ_j` right after a
    /// midpoint step on `j`.
    pub fn midpoint_identity(&self) -> Vec<f64> {
        let mut v = self.phi_mean.clone();
        linalg::axpy(-1.0 / self.mu, self.table.average(), &mut v);
        v
    }

    fn set_phi(&mut self, obj: &FiniteSumObjective, j: usize, x: Vec<f64>, g: StoredGradient) -> Result<()> {
        let inv_n = 1.0 / obj.n() as f64;
        let slot = &mut self.phi[j * self.dim..(j + 1) * self.dim];
        for ((mean, old), new) in self.phi_mean.iter_mut().zip(slot.iter()).zip(&x) {
            *mean += (new - old) * inv_n;
        }
        slot.copy_from_slice(&x);
        self.table.replace(obj, j, g)?;
        self.x = x;
        self.k += 1;
        check_iterate(&self.x, self.k)
    }
}

fn mean_of(flat: &[f64], n: usize, dim: usize) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    for row in flat.chunks_exact(dim) {
        linalg::axpy(1.0 / n as f64, row, &mut mean);
    }
    mean
}
