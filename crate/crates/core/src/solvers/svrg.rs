use rand::Rng;

use super::run::{run_with_rng, Method, RunConfig, TraceRecord};
use super::saga::check_start;
use super::{check_gamma, check_index, check_iterate};
use crate::error::Result;
use crate::linalg;
use crate::objective::FiniteSumObjective;

/// SVRG iterate with its snapshot `x̃` and full gradient `f'(x̃)`.
#[derive(Debug, Clone)]
pub struct SvrgState {
    x: Vec<f64>,
    snapshot: Vec<f64>,
    snapshot_grad: Vec<f64>,
    grad_evals: u64,
    k: u64,
}

impl SvrgState {
    /// Starts at `x0` with the snapshot taken there (charged `n` evaluations).
    pub fn new(obj: &FiniteSumObjective, x0: &[f64]) -> Result<Self> {
        check_start(obj, x0)?;
        let mut s = Self {
            x: x0.to_vec(),
            snapshot: x0.to_vec(),
            snapshot_grad: vec![0.0; obj.dim()],
            grad_evals: 0,
            k: 0,
        };
        s.recalibrate(obj);
        Ok(s)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn snapshot(&self) -> &[f64] {
        &self.snapshot
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Component gradient evaluations charged so far.
    pub fn grad_evals(&self) -> u64 {
        self.grad_evals
    }

    /// `x̃ ← x`, recomputing `f'(x̃)`.
    pub fn recalibrate(&mut self, obj: &FiniteSumObjective) {
        self.snapshot.copy_from_slice(&self.x);
        self.snapshot_grad = obj.full_gradient_at(&self.snapshot);
        self.grad_evals += obj.n() as u64;
    }

    /// `f_j'(x) − f_j'(x̃) + f'(x̃)`
    pub fn direction(&self, obj: &FiniteSumObjective, j: usize) -> Vec<f64> {
        let mut dir = self.snapshot_grad.clone();
        obj.add_gradient_to(j, &self.x, 1.0, &mut dir);
        obj.add_gradient_to(j, &self.snapshot, -1.0, &mut dir);
        dir
    }

    pub fn inner_step(&mut self, obj: &FiniteSumObjective, j: usize, gamma: f64) -> Result<()> {
        check_index(j, obj.n())?;
        check_gamma(gamma)?;
        let dir = self.direction(obj, j);
        linalg::axpy(-gamma, &dir, &mut self.x);
        obj.composite().prox_in_place(gamma, &mut self.x)?;
        self.grad_evals += 2;
        self.k += 1;
        check_iterate(&self.x, self.k)
    }
}

/// Runs `epochs` outer loops of `m` inner steps, tracing once per outer loop.
pub fn svrg_run<R: Rng + ?Sized>(
    obj: &FiniteSumObjective,
    x0: &[f64],
    gamma: f64,
    m: usize,
    epochs: usize,
    rng: &mut R,
) -> Result<Vec<TraceRecord>> {
    let cfg = RunConfig {
        step_size: Some(super::StepSizePolicy::Manual(gamma)),
        epochs,
        ..RunConfig::new(Method::Svrg { inner: Some(m) })
    };
    Ok(run_with_rng(obj, x0, &cfg, rng)?.trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CscMatrix, Dataset, LossKind, Regularizer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn problem(reg: Regularizer) -> FiniteSumObjective {
        let m = CscMatrix::from_dense_columns(
            2,
            &[vec![1.0, 0.5], vec![-0.3, 1.0], vec![0.8, 0.8], vec![0.0, -1.2]],
        )
        .unwrap();
        let ds = Dataset::new(m, vec![1.0, -1.0, 1.0, 1.0]).unwrap();
        FiniteSumObjective::new(ds, LossKind::Logistic, 0.05, reg).unwrap()
    }

    #[test]
    fn direction_at_snapshot_is_full_gradient() {
        let obj = problem(Regularizer::None);
        let s = SvrgState::new(&obj, &[0.4, -0.2]).unwrap();
        let g = obj.full_gradient(&[0.4, -0.2]).unwrap();
        for j in 0..4 {
            assert!(linalg::max_abs_diff(&s.direction(&obj, j), &g) < 1e-15);
        }
    }

    #[test]
    fn one_inner_step_per_snapshot_is_prox_gradient_descent() {
        let obj = problem(Regularizer::L1 { strength: 0.05 });
        let gamma = 0.5;
        let mut s = SvrgState::new(&obj, &[1.0, 1.0]).unwrap();
        let mut y = vec![1.0, 1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            s.recalibrate(&obj);
            s.inner_step(&obj, rng.random_range(0..4), gamma).unwrap();
            let g = obj.full_gradient(&y).unwrap();
            linalg::axpy(-gamma, &g, &mut y);
            obj.composite().prox_in_place(gamma, &mut y).unwrap();
            assert!(linalg::max_abs_diff(s.x(), &y) < 1e-14);
        }
    }

    #[test]
    fn accounting_charges_n_per_snapshot_and_two_per_step() {
        let obj = problem(Regularizer::None);
        let mut s = SvrgState::new(&obj, &[0.0, 0.0]).unwrap();
        assert_eq!(s.grad_evals(), 4);
        for j in 0..4 {
            s.inner_step(&obj, j, 0.1).unwrap();
        }
        s.recalibrate(&obj);
        assert_eq!(s.grad_evals(), 4 + 8 + 4);
    }

    #[test]
    fn run_traces_three_passes_per_outer_loop() {
        let obj = problem(Regularizer::None);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trace = svrg_run(&obj, &[0.0, 0.0], 0.2, 4, 5, &mut rng).unwrap();
        assert_eq!(trace.len(), 6);
        for w in trace.windows(2) {
            assert!((w[1].grad_evals_per_n - w[0].grad_evals_per_n - 3.0).abs() < 1e-12);
        }
    }
}
