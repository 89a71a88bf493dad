use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sdca::variant5_beta;
use super::step_size::{step_size, StepSizePolicy};
use super::table::{GradientTable, TableMode};
use super::{FinitoState, SagaState, SdcaState, SvrgState};
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::FiniteSumObjective;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Saga,
    /// SAGA with the objective's L2 term applied as an explicit shrinkage.
    SagaExplicitL2,
    Sag,
    /// `inner` steps per snapshot; `None` means `n`.
    Svrg { inner: Option<usize> },
    Finito,
    SdcaPrimal,
    SdcaVariant5,
    Midpoint,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Saga,
        Method::SagaExplicitL2,
        Method::Sag,
        Method::Svrg { inner: None },
        Method::Finito,
        Method::SdcaPrimal,
        Method::SdcaVariant5,
        Method::Midpoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Saga => "saga",
            Method::SagaExplicitL2 => "saga_l2",
            Method::Sag => "sag",
            Method::Svrg { .. } => "svrg",
            Method::Finito => "finito",
            Method::SdcaPrimal => "sdca",
            Method::SdcaVariant5 => "sdca_v5",
            Method::Midpoint => "midpoint",
        }
    }

    /// Whether a composite term `h` can be handled through its prox.
    pub fn supports_prox(self) -> bool {
        matches!(self, Method::Saga | Method::Svrg { .. })
    }

    pub fn needs_strong_convexity(self) -> bool {
        matches!(
            self,
            Method::Finito | Method::SdcaPrimal | Method::SdcaVariant5 | Method::Midpoint
        )
    }

    /// Whether the step size is a free parameter.
    pub fn has_step_size(self) -> bool {
        !matches!(self, Method::SdcaPrimal | Method::SdcaVariant5 | Method::Midpoint)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableInit {
    /// Every stored gradient evaluated at `x0` before the first step.
    #[default]
    FullPass,
    /// Empty table; the first pass visits points in order and averages over
    /// the points seen so far. SAGA and SAG only.
    FirstPassHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Independent uniform draws with replacement.
    #[default]
    Uniform,
    /// A fresh permutation of all points each pass.
    PermutedPerPass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    /// `None` picks the method's default.
    pub step_size: Option<StepSizePolicy>,
    /// Passes over the data; outer loops for SVRG.
    pub epochs: usize,
    pub seed: u64,
    /// Record every this many steps; `None` records once per epoch.
    pub trace_every: Option<u64>,
    pub init: TableInit,
    pub sampling: Sampling,
    /// Enables the `dist_sq` column.
    pub x_star: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            step_size: None,
            epochs: 10,
            seed: 0,
            trace_every: None,
            init: TableInit::FullPass,
            sampling: Sampling::Uniform,
            x_star: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Iterations taken (inner steps for SVRG).
    pub step: u64,
    pub grad_evals: u64,
    pub grad_evals_per_n: f64,
    /// `F(x^k)`
    pub objective: f64,
    /// `F(x̄^k)` with `x̄^k` the mean of `x^1, …, x^k` (`x^0` when `k = 0`).
    pub average_objective: f64,
    /// `‖x^k − x*‖²`, when `x*` was supplied.
    pub dist_sq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trace: Vec<TraceRecord>,
    pub x: Vec<f64>,
    pub x_average: Vec<f64>,
    /// The step size in effect (implied by the method for SDCA and midpoint).
    pub step_size: f64,
}

/// Indices for one pass: `count` uniform draws, a permutation, or `0..n` in
/// order when `in_order` is set.
pub fn epoch_indices<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    sampling: Sampling,
    in_order: bool,
    rng: &mut R,
) -> Vec<usize> {
    if in_order {
        return (0..count).map(|t| t % n).collect();
    }
    match sampling {
        Sampling::Uniform => (0..count).map(|_| rng.random_range(0..n)).collect(),
        Sampling::PermutedPerPass => {
            let mut idx = Vec::with_capacity(count);
            while idx.len() < count {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(rng);
                idx.extend(perm);
            }
            idx.truncate(count);
            idx
        }
    }
}

pub fn run(obj: &FiniteSumObjective, x0: &[f64], cfg: &RunConfig) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    run_with_rng(obj, x0, cfg, &mut rng)
}

enum Engine {
    Saga(SagaState),
    SagaL2(SagaState, f64),
    Sag(SagaState),
    Svrg(SvrgState),
    Finito(FinitoState),
    Midpoint(FinitoState),
    Sdca(SdcaState),
    SdcaV5(SdcaState, f64),
}

impl Engine {
    fn x(&self) -> &[f64] {
        match self {
            Engine::Saga(s) | Engine::SagaL2(s, _) | Engine::Sag(s) => s.x(),
            Engine::Svrg(s) => s.x(),
            Engine::Finito(s) | Engine::Midpoint(s) => s.x(),
            Engine::Sdca(s) | Engine::SdcaV5(s, _) => s.x(),
        }
    }

    fn step(&mut self, work: &FiniteSumObjective, j: usize, gamma: f64, warm: Option<usize>) -> Result<u64> {
        match self {
            Engine::Saga(s) | Engine::Sag(s) if warm.is_some() => {
                s.warm_start_step(work, j, gamma, warm.unwrap_or(1))?
            }
            Engine::Saga(s) => s.saga_step(work, j, gamma)?,
            Engine::SagaL2(s, mu) => s.saga_step_explicit_l2(work, j, gamma, *mu)?,
            Engine::Sag(s) => s.sag_step(work, j, gamma)?,
            Engine::Svrg(s) => {
                s.inner_step(work, j, gamma)?;
                return Ok(2);
            }
            Engine::Finito(s) => s.finito_step(work, j, gamma)?,
            Engine::Midpoint(s) => s.midpoint_step(work, j)?,
            Engine::Sdca(s) => s.primal_step(work, j)?,
            Engine::SdcaV5(s, beta) => s.interpolation_step(work, j, *beta)?,
        }
        Ok(1)
    }

    fn resync(&mut self, work: &FiniteSumObjective) {
        match self {
            Engine::Saga(s) | Engine::SagaL2(s, _) | Engine::Sag(s) => {
                s.resync(work);
            }
            Engine::Svrg(_) => {}
            Engine::Finito(s) | Engine::Midpoint(s) => {
                s.resync(work);
            }
            Engine::Sdca(s) | Engine::SdcaV5(s, _) => {
                s.resync(work);
            }
        }
    }
}

/// Checks method preconditions and returns the objective the solver
/// iterates on, the explicit L2 strength (if any) and the step size.
fn prepare(obj: &FiniteSumObjective, cfg: &RunConfig) -> Result<(FiniteSumObjective, f64, f64)> {
    let method = cfg.method;
    if !method.supports_prox() && !obj.composite().is_none() {
        return Err(Error::Unsupported(format!(
            "{method} does not support proximal regularizers"
        )));
    }
    if cfg.init == TableInit::FirstPassHeuristic && !matches!(method, Method::Saga | Method::Sag) {
        return Err(Error::Unsupported(format!("{method} has no first-pass heuristic")));
    }
    let consts = obj.estimate_constants()?;
    let (l, mu, n) = (consts.lipschitz, consts.strong_convexity, consts.n as f64);
    if method.needs_strong_convexity() && mu <= 0.0 {
        return Err(Error::NeedsStrongConvexity(method.name()));
    }
    if !method.has_step_size() && cfg.step_size.is_some() {
        return Err(Error::Unsupported(format!("{method} has no step-size parameter")));
    }
    let default = match method {
        Method::Saga | Method::SagaExplicitL2 if mu > 0.0 => StepSizePolicy::StronglyConvex,
        Method::Saga | Method::SagaExplicitL2 => StepSizePolicy::Adaptive,
        Method::Sag => StepSizePolicy::Manual(1.0 / (16.0 * l)),
        Method::Svrg { .. } => StepSizePolicy::Manual(1.0 / (10.0 * l)),
        Method::Finito => StepSizePolicy::Manual(1.0 / (2.0 * mu * n)),
        Method::SdcaPrimal | Method::SdcaVariant5 => StepSizePolicy::Manual(1.0 / (mu * n)),
        Method::Midpoint => StepSizePolicy::Manual(1.0 / (mu * (n - 1.0).max(1.0))),
    };
    let gamma = step_size(cfg.step_size.unwrap_or(default), &consts)?;
    let explicit = matches!(method, Method::SagaExplicitL2 | Method::SdcaPrimal | Method::SdcaVariant5);
    let work = if explicit { obj.without_split_l2() } else { obj.clone() };
    Ok((work, if explicit { mu } else { 0.0 }, gamma))
}

/// The step size `run` would use for this configuration.
pub fn resolve_step_size(obj: &FiniteSumObjective, cfg: &RunConfig) -> Result<f64> {
    prepare(obj, cfg).map(|(_, _, gamma)| gamma)
}

pub fn run_with_rng<R: Rng + ?Sized>(
    obj: &FiniteSumObjective,
    x0: &[f64],
    cfg: &RunConfig,
    rng: &mut R,
) -> Result<RunResult> {
    if let Some(s) = &cfg.x_star {
        if s.len() != obj.dim() {
            return Err(Error::InvalidInput("x_star has wrong dimension".into()));
        }
    }
    if cfg.trace_every == Some(0) {
        return Err(Error::InvalidInput("trace_every must be positive".into()));
    }
    let (work, mu, gamma) = prepare(obj, cfg)?;
    let n = obj.n();
    let mode = TableMode::preferred(&work);
    let warm_start = cfg.init == TableInit::FirstPassHeuristic;
    let mut engine = match cfg.method {
        Method::Saga | Method::Sag if warm_start => {
            let s = SagaState::from_parts(x0.to_vec(), GradientTable::zeros(&work, mode)?);
            super::saga::check_start(&work, x0)?;
            if cfg.method == Method::Saga { Engine::Saga(s) } else { Engine::Sag(s) }
        }
        Method::Saga => Engine::Saga(SagaState::new(&work, x0, mode)?),
        Method::Sag => Engine::Sag(SagaState::new(&work, x0, mode)?),
        Method::SagaExplicitL2 => Engine::SagaL2(SagaState::new(&work, x0, mode)?, mu),
        Method::Svrg { .. } => Engine::Svrg(SvrgState::new(&work, x0)?),
        Method::Finito => Engine::Finito(FinitoState::new(&work, x0, work.split_l2(), mode)?),
        Method::Midpoint => Engine::Midpoint(FinitoState::new(&work, x0, work.split_l2(), mode)?),
        Method::SdcaPrimal => Engine::Sdca(SdcaState::new(&work, x0, mu, mode)?),
        Method::SdcaVariant5 => {
            let l = work.estimate_constants()?.lipschitz;
            Engine::SdcaV5(SdcaState::new(&work, x0, mu, mode)?, variant5_beta(mu, n, l))
        }
    };
    let steps_per_epoch = match cfg.method {
        Method::Svrg { inner } => {
            let m = inner.unwrap_or(n);
            if m == 0 {
                return Err(Error::InvalidInput("SVRG inner loop length must be positive".into()));
            }
            m
        }
        _ => n,
    };

    let mut tracer = Tracer::new(obj, cfg.x_star.as_deref(), x0)?;
    tracer.record(0, 0, x0)?;
    let mut step: u64 = 0;
    let mut evals: u64 = 0;
    for epoch in 0..cfg.epochs {
        if let Engine::Svrg(s) = &mut engine {
            if epoch > 0 {
                s.recalibrate(&work);
            }
            evals += n as u64;
        }
        let in_order = warm_start && epoch == 0;
        let indices = epoch_indices(n, steps_per_epoch, cfg.sampling, in_order, rng);
        for (t, &j) in indices.iter().enumerate() {
            let warm = in_order.then_some(t + 1);
            evals += engine.step(&work, j, gamma, warm)?;
            step += 1;
            tracer.accumulate(engine.x());
            if cfg.trace_every.is_some_and(|every| step.is_multiple_of(every)) {
                tracer.record(step, evals, engine.x())?;
            }
        }
        engine.resync(&work);
        if cfg.trace_every.is_none() {
            tracer.record(step, evals, engine.x())?;
        }
    }
    let x_average = tracer.average(x0);
    Ok(RunResult { trace: tracer.rows, x: engine.x().to_vec(), x_average, step_size: gamma })
}

struct Tracer<'a> {
    obj: &'a FiniteSumObjective,
    x_star: Option<&'a [f64]>,
    sum: Vec<f64>,
    count: u64,
    rows: Vec<TraceRecord>,
}

impl<'a> Tracer<'a> {
    fn new(obj: &'a FiniteSumObjective, x_star: Option<&'a [f64]>, x0: &[f64]) -> Result<Self> {
        super::saga::check_start(obj, x0)?;
        Ok(Self { obj, x_star, sum: vec![0.0; obj.dim()], count: 0, rows: Vec::new() })
    }

    fn accumulate(&mut self, x: &[f64]) {
        linalg::axpy(1.0, x, &mut self.sum);
        self.count += 1;
    }

    fn average(&self, x0: &[f64]) -> Vec<f64> {
        if self.count == 0 {
            return x0.to_vec();
        }
        self.sum.iter().map(|v| v / self.count as f64).collect()
    }

    fn record(&mut self, step: u64, grad_evals: u64, x: &[f64]) -> Result<()> {
        let avg = self.average(x);
        self.rows.push(TraceRecord {
            step,
            grad_evals,
            grad_evals_per_n: grad_evals as f64 / self.obj.n() as f64,
            objective: self.obj.objective_value(x, true)?,
            average_objective: self.obj.objective_value(&avg, true)?,
            dist_sq: self.x_star.map(|s| linalg::dist_sq(x, s)),
        });
        Ok(())
    }
}
