//! Method comparisons: one solver run per (method, seed), reported as
//! suboptimality against a shared reference optimum.

use rayon::prelude::*;
use saga_core::optimum::compute_reference_optimum;
use saga_core::solvers::{resolve_step_size, run, Method, RunConfig, StepSizePolicy, TraceRecord};
use saga_core::{Dataset, FiniteSumObjective, ReferenceOptimum, Regularizer};

use crate::config::{DatasetSpec, ExperimentConfig, MethodSpec};
use crate::error::{BenchError, Result};
use crate::libsvm::{load_libsvm, LibsvmOptions};
use crate::synthetic::generate_synthetic;

/// Values below this are reported as this.
pub const SUBOPTIMALITY_FLOOR: f64 = 1e-16;
/// How far `F(x) − F*` may fall below zero before the optimum is deemed wrong.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;
/// The sweep tries `γ₀·2^k` for `k` in this range.
pub const SWEEP_EXPONENTS: std::ops::RangeInclusive<i32> = -3..=3;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub seed: u64,
    pub grad_evals_per_n: f64,
    pub suboptimality: f64,
    pub dist_sq: f64,
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    match spec {
        DatasetSpec::Synthetic(s) => Ok(generate_synthetic(s)?.dataset),
        DatasetSpec::Libsvm { path, normalize, dim } => {
            load_libsvm(path, LibsvmOptions { normalize: *normalize, dim: *dim })
        }
    }
}

pub fn build_objective(cfg: &ExperimentConfig) -> Result<FiniteSumObjective> {
    let data = load_dataset(&cfg.dataset)?;
    let composite = if cfg.regularizer.l1 > 0.0 {
        Regularizer::L1 { strength: cfg.regularizer.l1 }
    } else {
        Regularizer::None
    };
    Ok(FiniteSumObjective::new(data, cfg.loss.into(), cfg.regularizer.l2, composite)?)
}

/// Clamps `value − optimum` to zero after the tolerance, then applies the
/// reporting floor.
pub fn suboptimality(value: f64, optimum: f64) -> Result<f64> {
    let gap = value - optimum;
    if gap < -NEGATIVE_TOLERANCE {
        return Err(BenchError::Numerical(format!(
            "objective {value:e} is {:e} below the reference optimum",
            -gap
        )));
    }
    Ok(gap.max(0.0).max(SUBOPTIMALITY_FLOOR))
}

/// A resolved method entry.
#[derive(Debug, Clone)]
struct Plan {
    label: String,
    method: Method,
    step_size: Option<StepSizePolicy>,
}

pub struct Experiment {
    pub config: ExperimentConfig,
    pub objective: FiniteSumObjective,
    pub optimum: ReferenceOptimum,
}

impl Experiment {
    /// Builds the objective, rejects incompatible methods and computes `x*`.
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let objective = build_objective(&config)?;
        for spec in &config.methods {
            let cfg = run_config(&config, &plan(spec)?, 0);
            resolve_step_size(&objective, &cfg).map_err(|e| match e {
                e if e.is_numerical() => BenchError::Solver(e),
                e => BenchError::Config(format!("{}: {e}", spec.label())),
            })?;
        }
        let optimum = compute_reference_optimum(&objective)?;
        Ok(Self { config, objective, optimum })
    }

    pub fn run(&self) -> Result<Vec<ResultRow>> {
        let mut plans: Vec<Plan> = self.config.methods.iter().map(plan).collect::<Result<_>>()?;
        if self.config.sweep_steps {
            for p in plans.iter_mut().filter(|p| p.method.has_step_size()) {
                p.step_size = Some(StepSizePolicy::Manual(self.sweep(p)?));
            }
        }
        let jobs: Vec<(&Plan, u64)> = plans
            .iter()
            .flat_map(|p| self.config.seeds.iter().map(move |&s| (p, s)))
            .collect();
        let runs: Vec<Vec<ResultRow>> = jobs
            .par_iter()
            .map(|&(p, seed)| self.run_one(p, seed))
            .collect::<Result<_>>()?;
        let mut rows: Vec<ResultRow> = runs.into_iter().flatten().collect();
        sort_rows(&mut rows);
        Ok(rows)
    }

    fn trace(&self, p: &Plan, seed: u64) -> Result<Vec<TraceRecord>> {
        let mut cfg = run_config(&self.config, p, seed);
        cfg.x_star = Some(self.optimum.x.clone());
        let result = run(&self.objective, &vec![0.0; self.objective.dim()], &cfg)?;
        let every = self.config.trace_every;
        let last = result.trace.len() - 1;
        Ok(result
            .trace
            .into_iter()
            .enumerate()
            .filter(|(epoch, _)| epoch % every == 0 || *epoch == last)
            .map(|(_, r)| r)
            .collect())
    }

    fn run_one(&self, p: &Plan, seed: u64) -> Result<Vec<ResultRow>> {
        self.trace(p, seed)?
            .into_iter()
            .map(|r| {
                Ok(ResultRow {
                    method: p.label.clone(),
                    seed,
                    grad_evals_per_n: r.grad_evals_per_n,
                    suboptimality: suboptimality(r.objective, self.optimum.value)?,
                    dist_sq: r.dist_sq.unwrap_or(f64::NAN),
                })
            })
            .collect()
    }

    /// The grid step with the lowest final objective on the first seed.
    /// Diverging candidates are skipped.
    fn sweep(&self, p: &Plan) -> Result<f64> {
        let base = resolve_step_size(&self.objective, &run_config(&self.config, p, 0))?;
        let seed = self.config.seeds[0];
        let scores: Vec<(f64, Option<f64>)> = SWEEP_EXPONENTS
            .into_par_iter()
            .map(|k| {
                let gamma = base * 2f64.powi(k);
                let candidate = Plan { step_size: Some(StepSizePolicy::Manual(gamma)), ..p.clone() };
                let score = match self.trace(&candidate, seed) {
                    Ok(trace) => trace.last().map(|r| r.objective).filter(|v| v.is_finite()),
                    Err(e) if e.exit_code() == 2 => None,
                    Err(e) => return Err(e),
                };
                Ok((gamma, score))
            })
            .collect::<Result<_>>()?;
        scores
            .into_iter()
            .filter_map(|(g, s)| s.map(|s| (g, s)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(g, _)| g)
            .ok_or_else(|| BenchError::Numerical(format!("every step size in the sweep diverged for {}", p.label)))
    }
}

fn plan(spec: &MethodSpec) -> Result<Plan> {
    Ok(Plan {
        label: spec.label().to_string(),
        method: spec.resolve()?,
        step_size: spec.step_size.map(Into::into),
    })
}

fn run_config(cfg: &ExperimentConfig, p: &Plan, seed: u64) -> RunConfig {
    let mut rc = RunConfig::new(p.method);
    rc.step_size = p.step_size;
    rc.epochs = cfg.epochs;
    rc.seed = seed;
    rc.sampling = cfg.sampling.into();
    rc.init = cfg.init.into();
    rc
}

/// Orders rows by method, seed, then gradient evaluations.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.seed.cmp(&b.seed))
            .then(a.grad_evals_per_n.total_cmp(&b.grad_evals_per_n))
    });
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    Experiment::prepare(cfg.clone())?.run()
}
