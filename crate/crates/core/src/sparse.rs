//! Just-in-time sparse SAGA for least squares with an explicit L2 term.
//!
//! The iterate is kept as `β·x`, so the dense shrinkage `x ← (1 − γμ)x`
//! becomes a scalar update of `β`. The dense gradient-average term is applied
//! to a coordinate only when that coordinate is next read, using a table of
//! geometric partial sums to account for the steps it missed.

use std::sync::Arc;

use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::solvers::{epoch_indices, Sampling};

/// Default scale below which `β` is folded back into the stored iterate.
pub const RENORMALIZE_BELOW: f64 = 1e-280;

/// Partial sums `s[m] = Σ_{t<m} ρ^t` for `m = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagScalingTable {
    entries: Vec<f64>,
    rho: f64,
}

pub fn build_lag_scaling(rho: f64, length: usize) -> Result<LagScalingTable> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidInput(format!(
            "lag ratio {rho} outside [0, 1]; the step size times the L2 strength must be at most 1"
        )));
    }
    if length == 0 {
        return Err(Error::InvalidInput("lag-scaling table needs at least one entry".into()));
    }
    let mut entries = vec![0.0; length];
    let mut term = 1.0;
    for m in 1..length {
        entries[m] = entries[m - 1] + term;
        term *= rho;
    }
    Ok(LagScalingTable { entries, rho })
}

impl LagScalingTable {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, gap: u64) -> Result<f64> {
        self.entries
            .get(gap as usize)
            .copied()
            .ok_or(Error::LagTableExhausted { gap, len: self.entries.len() })
    }
}

/// Scaled iterate `β·x` whose coordinates may be stale.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedIterate {
    x: Vec<f64>,
    lag: Vec<u64>,
    beta: f64,
    k: u64,
    touches: u64,
}

impl LaggedIterate {
    pub fn new(dim: usize) -> Self {
        Self { x: vec![0.0; dim], lag: vec![0; dim], beta: 1.0, k: 0, touches: 0 }
    }

    pub fn from_parts(x: Vec<f64>, lag: Vec<u64>, beta: f64, k: u64) -> Result<Self> {
        if x.len() != lag.len() {
            return Err(Error::InvalidInput("x and lag lengths differ".into()));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {beta}")));
        }
        if lag.iter().any(|&l| l > k) {
            return Err(Error::InvalidInput("lag entry ahead of step counter".into()));
        }
        Ok(Self { x, lag, beta, k, touches: 0 })
    }

    /// Stored (unscaled, possibly stale) coordinates.
    pub fn raw(&self) -> &[f64] {
        &self.x
    }

    pub fn lag(&self) -> &[u64] {
        &self.lag
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Coordinate reads and writes performed by the step loop.
    pub fn touches(&self) -> u64 {
        self.touches
    }

    /// For each touched coordinate with gap `m = k − lag`:
    /// `x[i] += s[m]·a·g[i]`, then `lag[i] = k`.
    pub fn lagged_update(&mut self, g: &[f64], touched: &[usize], table: &LagScalingTable, a: f64) -> Result<()> {
        for &ind in touched {
            if ind >= self.x.len() {
                return Err(Error::IndexOutOfRange { index: ind, len: self.x.len() });
            }
            let s = table.get(self.k - self.lag[ind])?;
            self.lag[ind] = self.k;
            self.x[ind] += s * (a * g[ind]);
        }
        self.touches += touched.len() as u64;
        Ok(())
    }

    /// Brings every coordinate up to date and returns the true iterate `β·x`.
    pub fn flush_lags(&mut self, g: &[f64], table: &LagScalingTable, a: f64) -> Result<Vec<f64>> {
        self.apply_all(g, table, a)?;
        Ok(self.x.iter().map(|v| self.beta * v).collect())
    }

    fn apply_all(&mut self, g: &[f64], table: &LagScalingTable, a: f64) -> Result<()> {
        for ind in 0..self.x.len() {
            let s = table.get(self.k - self.lag[ind])?;
            self.lag[ind] = self.k;
            self.x[ind] += s * (a * g[ind]);
        }
        Ok(())
    }
}

/// Sparse SAGA for `(1/n)Σ ½(a_iᵀx − b_i)² + (reg/2)‖x‖²` started at the
/// origin, storing one scalar `a_iᵀφ_i` per point.
#[derive(Debug, Clone)]
pub struct SparseSagaLeastSquares {
    data: Arc<Dataset>,
    gamma: f64,
    reg: f64,
    iterate: LaggedIterate,
    c: Vec<f64>,
    g: Vec<f64>,
    table: LagScalingTable,
    epoch: usize,
    threshold: f64,
    renormalizations: u64,
}

impl SparseSagaLeastSquares {
    /// Sizes the lag table for `max_epochs` passes of `n` steps.
    pub fn new(data: Arc<Dataset>, gamma: f64, reg: f64, max_epochs: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidStepSize(gamma));
        }
        if !(reg >= 0.0 && reg.is_finite()) {
            return Err(Error::InvalidInput(format!("L2 strength must be >= 0, got {reg}")));
        }
        if reg * gamma >= 1.0 {
            return Err(Error::InvalidStepSize(gamma));
        }
        let (n, dim) = (data.n(), data.dim());
        let table = build_lag_scaling(1.0 - reg * gamma, n * max_epochs + 1)?;
        let mut g = vec![0.0; dim];
        for i in 0..n {
            data.point(i).add_scaled_to(-data.label(i) / n as f64, &mut g);
        }
        Ok(Self {
            data,
            gamma,
            reg,
            iterate: LaggedIterate::new(dim),
            c: vec![0.0; n],
            g,
            table,
            epoch: 0,
            threshold: RENORMALIZE_BELOW,
            renormalizations: 0,
        })
    }

    /// Sets the scale below which `β` is folded into the iterate.
    pub fn set_renormalize_threshold(&mut self, threshold: f64) {
        self.threshold = threshold;
    }

    pub fn renormalizations(&self) -> u64 {
        self.renormalizations
    }

    pub fn lagged(&self) -> &LaggedIterate {
        &self.iterate
    }

    pub fn gradient_average(&self) -> &[f64] {
        &self.g
    }

    pub fn stored_products(&self) -> &[f64] {
        &self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn reg(&self) -> f64 {
        self.reg
    }

    pub fn epochs_done(&self) -> usize {
        self.epoch
    }

    fn scale_coefficient(&self) -> f64 {
        -self.gamma / self.iterate.beta
    }

    /// One step on point `i`.
    pub fn step(&mut self, i: usize) -> Result<()> {
        let n = self.data.n();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let data = Arc::clone(&self.data);
        let col = data.point(i);
        let a = self.scale_coefficient();
        self.iterate.lagged_update(&self.g, col.indices, &self.table, a)?;

        let aix = self.iterate.beta * col.dot(&self.iterate.x);
        let change = aix - self.c[i];
        self.c[i] = aix;
        self.iterate.beta *= 1.0 - self.reg * self.gamma;
        col.add_scaled_to(-change * self.gamma / self.iterate.beta, &mut self.iterate.x);
        self.iterate.k += 1;
        self.iterate.touches += 2 * col.nnz() as u64;

        let a = self.scale_coefficient();
        self.iterate.lagged_update(&self.g, col.indices, &self.table, a)?;
        col.add_scaled_to(change / n as f64, &mut self.g);
        self.iterate.touches += col.nnz() as u64;

        if self.iterate.beta < self.threshold {
            self.renormalize()?;
        }
        if !self.iterate.beta.is_finite() || self.iterate.beta <= 0.0 {
            return Err(Error::Diverged { step: self.iterate.k });
        }
        Ok(())
    }

    /// Folds `β` into the stored iterate after bringing every coordinate up
    /// to date.
    fn renormalize(&mut self) -> Result<()> {
        let a = self.scale_coefficient();
        self.iterate.apply_all(&self.g, &self.table, a)?;
        let beta = self.iterate.beta;
        for v in &mut self.iterate.x {
            *v *= beta;
        }
        self.iterate.beta = 1.0;
        self.renormalizations += 1;
        Ok(())
    }

    /// Runs the given sequence of points.
    pub fn run_indices(&mut self, indices: &[usize]) -> Result<()> {
        for &i in indices {
            self.step(i)?;
        }
        Ok(())
    }

    /// One pass: in order on the first epoch, uniform draws afterwards.
    pub fn run_epoch<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let n = self.data.n();
        let indices = epoch_indices(n, n, Sampling::Uniform, self.epoch == 0, rng);
        self.run_indices(&indices)?;
        self.epoch += 1;
        Ok(())
    }

    /// Brings all coordinates up to date and returns the true iterate.
    pub fn flush(&mut self) -> Result<Vec<f64>> {
        let a = self.scale_coefficient();
        self.iterate.flush_lags(&self.g, &self.table, a)
    }

    /// The true iterate, without modifying the lazy state.
    pub fn iterate(&self) -> Result<Vec<f64>> {
        self.clone().flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CscMatrix;

    #[test]
    fn lag_scaling_examples() {
        assert_eq!(build_lag_scaling(1.0, 5).unwrap().as_slice(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(build_lag_scaling(0.5, 5).unwrap().as_slice(), &[0.0, 1.0, 1.5, 1.75, 1.875]);
        assert_eq!(build_lag_scaling(0.0, 4).unwrap().as_slice(), &[0.0, 1.0, 1.0, 1.0]);
        assert!(build_lag_scaling(1.5, 4).is_err());
        assert!(build_lag_scaling(-0.1, 4).is_err());
        assert!(build_lag_scaling(0.5, 0).is_err());
    }

    #[test]
    fn zero_gap_is_noop() {
        let table = build_lag_scaling(0.9, 10).unwrap();
        let mut it = LaggedIterate::from_parts(vec![1.0, 2.0], vec![4, 4], 1.0, 4).unwrap();
        it.lagged_update(&[5.0, 5.0], &[0, 1], &table, -1.0).unwrap();
        assert_eq!(it.raw(), &[1.0, 2.0]);
    }

    #[test]
    fn three_missed_unit_steps() {
        let table = build_lag_scaling(1.0, 10).unwrap();
        let mut it = LaggedIterate::from_parts(vec![1.0], vec![0], 1.0, 3).unwrap();
        it.lagged_update(&[0.1], &[0], &table, -1.0).unwrap();
        assert!((it.raw()[0] - 0.7).abs() < 1e-15);
        assert_eq!(it.lag(), &[3]);
    }

    #[test]
    fn gap_beyond_table_is_an_error() {
        let table = build_lag_scaling(1.0, 3).unwrap();
        let mut it = LaggedIterate::from_parts(vec![0.0], vec![0], 1.0, 5).unwrap();
        assert!(matches!(
            it.lagged_update(&[1.0], &[0], &table, 1.0),
            Err(Error::LagTableExhausted { gap: 5, len: 3 })
        ));
    }

    #[test]
    fn flush_is_idempotent_and_identity_without_lags() {
        let table = build_lag_scaling(0.8, 10).unwrap();
        let mut it = LaggedIterate::from_parts(vec![1.0, -2.0], vec![2, 2], 1.0, 2).unwrap();
        assert_eq!(it.flush_lags(&[3.0, 3.0], &table, -0.1).unwrap(), vec![1.0, -2.0]);
        let mut it = LaggedIterate::from_parts(vec![1.0, -2.0], vec![0, 1], 0.5, 4).unwrap();
        let first = it.flush_lags(&[3.0, 1.0], &table, -0.1).unwrap();
        let second = it.flush_lags(&[3.0, 1.0], &table, -0.1).unwrap();
        assert_eq!(first, second);
        assert!(it.lag().iter().all(|&l| l == 4));
    }

    #[test]
    fn empty_column_leaves_iterate_and_average_alone() {
        let m = CscMatrix::from_columns(3, &[vec![(0, 1.0)], vec![], vec![(2, -1.0)]]).unwrap();
        let ds = Arc::new(Dataset::new(m, vec![1.0, 0.5, -1.0]).unwrap());
        let mut s = SparseSagaLeastSquares::new(ds, 0.1, 0.0, 2).unwrap();
        let g0 = s.gradient_average().to_vec();
        let x0 = s.lagged().raw().to_vec();
        s.step(1).unwrap();
        assert_eq!(s.gradient_average(), g0.as_slice());
        assert_eq!(s.lagged().raw(), x0.as_slice());
        assert_eq!(s.lagged().touches(), 0);
    }

    #[test]
    fn rejects_shrinkage_at_or_beyond_one() {
        let m = CscMatrix::from_dense_columns(1, &[vec![1.0]]).unwrap();
        let ds = Arc::new(Dataset::new(m, vec![1.0]).unwrap());
        assert!(SparseSagaLeastSquares::new(ds.clone(), 1.0, 1.0, 1).is_err());
        assert!(SparseSagaLeastSquares::new(ds, 0.5, 1.0, 1).is_ok());
    }
}
