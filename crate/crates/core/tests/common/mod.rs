#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use saga_core::{CscMatrix, Dataset, FiniteSumObjective, LossKind, Regularizer};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * normal(rng)).collect()
}

/// Random points with roughly `density` of their coordinates nonzero.
pub fn dataset(rng: &mut ChaCha8Rng, n: usize, d: usize, density: f64, loss: LossKind) -> Dataset {
    let cols: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|_| {
            let scale = (d as f64 * density).sqrt().max(1.0);
            let mut col = Vec::new();
            for i in 0..d {
                if rng.random::<f64>() < density {
                    col.push((i, normal(rng) / scale));
                }
            }
            col
        })
        .collect();
    let labels = (0..n)
        .map(|_| match loss {
            LossKind::Squared => normal(rng),
            LossKind::Logistic => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        })
        .collect();
    Dataset::new(CscMatrix::from_columns(d, &cols).unwrap(), labels).unwrap()
}

pub fn objective(seed: u64, loss: LossKind, split_l2: f64, composite: Regularizer) -> FiniteSumObjective {
    let mut r = rng(seed);
    let n = r.random_range(2..=12);
    let d = r.random_range(1..=6);
    FiniteSumObjective::new(dataset(&mut r, n, d, 1.0, loss), loss, split_l2, composite).unwrap()
}

/// `f_1 = ½(x − 1)²`, `f_2 = ½(x + 1)²`
pub fn q2() -> FiniteSumObjective {
    let m = CscMatrix::from_dense_columns(1, &[vec![1.0], vec![1.0]]).unwrap();
    FiniteSumObjective::new(Dataset::new(m, vec![1.0, -1.0]).unwrap(), LossKind::Squared, 0.0, Regularizer::None)
        .unwrap()
}
