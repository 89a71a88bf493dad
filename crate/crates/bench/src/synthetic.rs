//! Seeded synthetic datasets from a planted linear model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use saga_core::{CscMatrix, Dataset};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    /// Dense planted weights, `b = aᵀw + noise·ε`.
    Ridge,
    /// Planted weights with about a tenth of the coordinates non-zero.
    LassoLs,
    /// `b = ±1` drawn with `P(b = 1) = σ(aᵀw / noise)`, or `sign(aᵀw)` when
    /// `noise = 0`.
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    pub d: usize,
    #[serde(default = "one")]
    pub density: f64,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
    /// Scale every point to unit norm.
    #[serde(default)]
    pub normalize: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub dataset: Dataset,
    pub planted: Vec<f64>,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n: usize, d: usize) -> Self {
        Self { kind, n, d, density: 1.0, noise: 0.0, seed: 0, normalize: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(BenchError::Config(format!("synthetic n and d must be >= 1, got n={} d={}", self.n, self.d)));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(BenchError::Config(format!("density must be in (0, 1], got {}", self.density)));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(BenchError::Config(format!("noise must be finite and >= 0, got {}", self.noise)));
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Synthetic> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let planted: Vec<f64> = match spec.kind {
        SyntheticKind::LassoLs => {
            let support = (spec.d / 10).max(1);
            let mut w = vec![0.0; spec.d];
            for i in rand::seq::index::sample(&mut rng, spec.d, support) {
                w[i] = rng.sample::<f64, _>(StandardNormal);
            }
            w
        }
        _ => (0..spec.d).map(|_| rng.sample(StandardNormal)).collect(),
    };

    let mut columns = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let mut col: Vec<(usize, f64)> = (0..spec.d)
            .filter(|_| spec.density >= 1.0 || rng.random::<f64>() < spec.density)
            .map(|j| (j, 0.0))
            .collect();
        if col.is_empty() {
            col.push((rng.random_range(0..spec.d), 0.0));
        }
        for entry in &mut col {
            entry.1 = rng.sample(StandardNormal);
        }
        if spec.normalize {
            let norm = col.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                col.iter_mut().for_each(|(_, v)| *v /= norm);
            }
        }
        let margin: f64 = col.iter().map(|&(j, v)| v * planted[j]).sum();
        let label = match spec.kind {
            SyntheticKind::Ridge | SyntheticKind::LassoLs => {
                margin + spec.noise * rng.sample::<f64, _>(StandardNormal)
            }
            SyntheticKind::Logistic if spec.noise == 0.0 => {
                if margin >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            SyntheticKind::Logistic => {
                let p = 1.0 / (1.0 + (-margin / spec.noise).exp());
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        columns.push(col);
        labels.push(label);
    }
    let dataset = Dataset::new(CscMatrix::from_columns(spec.d, &columns)?, labels)?;
    Ok(Synthetic { dataset, planted })
}
