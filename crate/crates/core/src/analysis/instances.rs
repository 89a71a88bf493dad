use std::ops::RangeInclusive;

use rand::Rng;
use rand_distr::StandardNormal;

use super::lyapunov::ProblemSnapshot;
use crate::data::{CscMatrix, Dataset};
use crate::error::Result;
use crate::loss::LossKind;
use crate::objective::{FiniteSumObjective, ProblemConstants};
use crate::optimum::compute_reference_optimum;
use crate::regularizer::Regularizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// Squared loss with a split L2 term.
    Quadratic,
    /// Logistic loss with a split L2 term.
    LogisticL2,
}

/// A random strongly convex problem with its optimum.
#[derive(Debug, Clone)]
pub struct Instance {
    pub obj: FiniteSumObjective,
    pub consts: ProblemConstants,
    pub x_star: Vec<f64>,
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Dense Gaussian points with per-point scales in `[0.2, 2]` and
/// `μ/L_loss` drawn log-uniformly from `[0.01, 1]`.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    kind: InstanceKind,
    n_range: RangeInclusive<usize>,
    d_range: RangeInclusive<usize>,
) -> Result<Instance> {
    let n = rng.random_range(n_range);
    let d = rng.random_range(d_range);
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let scale = log_uniform(rng, 0.2, 2.0) / (d as f64).sqrt();
            (0..d).map(|_| scale * gaussian(rng)).collect()
        })
        .collect();
    let (loss, labels): (LossKind, Vec<f64>) = match kind {
        InstanceKind::Quadratic => (LossKind::Squared, (0..n).map(|_| 2.0 * gaussian(rng)).collect()),
        InstanceKind::LogisticL2 => (
            LossKind::Logistic,
            (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
        ),
    };
    let ds = Dataset::new(CscMatrix::from_dense_columns(d, &cols)?, labels)?;
    let loss_only = FiniteSumObjective::new(ds, loss, 0.0, Regularizer::None)?;
    let l_loss = loss_only.estimate_constants().map(|c| c.lipschitz).unwrap_or(1.0);
    let mu = l_loss * log_uniform(rng, 0.01, 1.0);
    let obj = FiniteSumObjective::with_shared(loss_only.shared_dataset(), loss, mu, Regularizer::None)?;
    let consts = obj.estimate_constants()?;
    let x_star = compute_reference_optimum(&obj)?.x;
    Ok(Instance { obj, consts, x_star })
}

/// Iterate and stored points scattered around `x*` at log-uniform scales;
/// about a quarter of snapshots use a fresh table (`φ_i = x`).
pub fn random_snapshot<R: Rng + ?Sized>(rng: &mut R, inst: &Instance) -> Result<ProblemSnapshot> {
    let d = inst.obj.dim();
    let around = |rng: &mut R| -> Vec<f64> {
        let s = log_uniform(rng, 1e-3, 10.0);
        inst.x_star.iter().map(|v| v + s * gaussian(rng)).collect()
    };
    let x = around(rng);
    let fresh = rng.random::<f64>() < 0.25;
    let phi = (0..inst.obj.n())
        .map(|_| if fresh { x.clone() } else { around(rng) })
        .collect();
    debug_assert_eq!(x.len(), d);
    ProblemSnapshot::new(&inst.obj, x, phi, inst.x_star.clone())
}
