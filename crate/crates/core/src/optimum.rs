//! Reference optimum by deterministic proximal gradient descent.

use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::FiniteSumObjective;

pub const OPTIMUM_TOLERANCE: f64 = 1e-12;
pub const OPTIMUM_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceOptimum {
    pub x: Vec<f64>,
    /// `F(x*)`
    pub value: f64,
    /// Final `‖x − prox_{1/L}(x − f'(x)/L)‖`.
    pub residual: f64,
    pub iterations: usize,
}

/// Runs `x ← prox_{1/L}(x − f'(x)/L)` from the origin until the fixed-point
/// residual drops to `1e-12`.
pub fn compute_reference_optimum(obj: &FiniteSumObjective) -> Result<ReferenceOptimum> {
    compute_reference_optimum_from(obj, &vec![0.0; obj.dim()])
}

pub fn compute_reference_optimum_from(obj: &FiniteSumObjective, x0: &[f64]) -> Result<ReferenceOptimum> {
    let step = 1.0 / obj.estimate_constants()?.lipschitz;
    let mut x = x0.to_vec();
    if !linalg::all_finite(&x) || x.len() != obj.dim() {
        return Err(Error::InvalidInput("bad starting point".into()));
    }
    let mut residual = f64::INFINITY;
    for it in 0..OPTIMUM_MAX_ITER {
        let g = obj.full_gradient_at(&x);
        let mut next = x.clone();
        linalg::axpy(-step, &g, &mut next);
        obj.composite().prox_in_place(step, &mut next)?;
        residual = linalg::dist_sq(&next, &x).sqrt();
        x = next;
        if !linalg::all_finite(&x) {
            return Err(Error::Diverged { step: it as u64 });
        }
        if residual <= OPTIMUM_TOLERANCE {
            let value = obj.objective_value(&x, true)?;
            return Ok(ReferenceOptimum { x, value, residual, iterations: it + 1 });
        }
    }
    Err(Error::OptimumNotConverged { residual, iterations: OPTIMUM_MAX_ITER })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CscMatrix, Dataset, LossKind, Regularizer};

    fn q2(reg: Regularizer) -> FiniteSumObjective {
        let m = CscMatrix::from_dense_columns(1, &[vec![1.0], vec![1.0]]).unwrap();
        FiniteSumObjective::new(Dataset::new(m, vec![1.0, -1.0]).unwrap(), LossKind::Squared, 0.0, reg).unwrap()
    }

    #[test]
    fn q2_optimum() {
        let r = compute_reference_optimum(&q2(Regularizer::None)).unwrap();
        assert_eq!(r.x, vec![0.0]);
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn q2_with_l1_stays_at_zero() {
        let r = compute_reference_optimum(&q2(Regularizer::L1 { strength: 2.0 })).unwrap();
        assert_eq!(r.x, vec![0.0]);
    }

    #[test]
    fn one_dimensional_ridge() {
        // ½(x − 1)² + ½x² → x* = ½
        let m = CscMatrix::from_dense_columns(1, &[vec![1.0]]).unwrap();
        let obj = FiniteSumObjective::new(Dataset::new(m, vec![1.0]).unwrap(), LossKind::Squared, 1.0, Regularizer::None).unwrap();
        let r = compute_reference_optimum(&obj).unwrap();
        assert!((r.x[0] - 0.5).abs() < 1e-12);
    }
}
