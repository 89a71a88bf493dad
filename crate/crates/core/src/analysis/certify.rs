use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::estimator::{theta_estimator_stats, theta_moments_by_enumeration, EstimatorSpec};
use super::instances::{random_instance, random_snapshot, InstanceKind};
use super::lemmas::{lemma_gap, Lemma, LemmaInputs};
use super::lyapunov::{expected_lyapunov_next, lyapunov_value, LyapunovParams};
use crate::error::Result;
use crate::linalg;
use crate::regularizer::Regularizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Random problems per property.
    pub instances: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_d: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { instances: 1000, seed: 0, max_n: 50, max_d: 10 }
    }
}

/// Outcome of one property: passes when the worst gap is at least
/// `-tolerance` (for identities, when the worst error is at most `tolerance`).
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: String,
    pub trials: usize,
    pub worst_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<32} trials={:<6} worst_gap={:+.3e} tolerance={:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.trials,
            self.worst_gap,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertificationReport {
    pub properties: Vec<PropertyResult>,
}

impl CertificationReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Tracks the minimum of an inequality gap (`gap ≥ −tol` passes).
struct Inequality {
    name: String,
    tol: f64,
    worst: f64,
    trials: usize,
}

impl Inequality {
    fn new(name: impl Into<String>, tol: f64) -> Self {
        Self { name: name.into(), tol, worst: f64::INFINITY, trials: 0 }
    }

    fn push(&mut self, gap: f64) {
        self.trials += 1;
        if gap.is_nan() || gap < self.worst {
            self.worst = gap;
        }
    }

    fn finish(self) -> PropertyResult {
        let passed = self.trials > 0 && self.worst >= -self.tol;
        PropertyResult { name: self.name, trials: self.trials, worst_gap: self.worst, tolerance: self.tol, passed }
    }
}

/// Runs every property over freshly drawn random instances.
pub fn certify(opts: &CertifyOptions) -> Result<CertificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sc = Inequality::new("lyapunov_contraction", 1e-10);
    let mut adaptive = Inequality::new("lyapunov_contraction_adaptive", 1e-10);
    let mut lemmas: Vec<Inequality> = Lemma::ALL.iter().map(|l| Inequality::new(format!("lemma_{}", l.name()), 1e-12)).collect();
    let mut estimator = Inequality::new("estimator_algebra", 1e-14);
    let mut moreau = Inequality::new("moreau_decomposition", 1e-12);

    for t in 0..opts.instances {
        let kind = if t % 2 == 0 { InstanceKind::Quadratic } else { InstanceKind::LogisticL2 };
        let inst = random_instance(&mut rng, kind, 2..=opts.max_n.max(2), 1..=opts.max_d.max(1))?;
        let obj = &inst.obj;

        for (params, acc) in [
            (LyapunovParams::strongly_convex(&inst.consts)?, &mut sc),
            (LyapunovParams::adaptive(&inst.consts)?, &mut adaptive),
        ] {
            let snap = random_snapshot(&mut rng, &inst)?;
            let now = lyapunov_value(&snap, obj, params.c)?;
            let next = expected_lyapunov_next(&snap, obj, &params)?;
            acc.push(params.rate() * now - next);
        }

        let snap = random_snapshot(&mut rng, &inst)?;
        let params = LyapunovParams::strongly_convex(&inst.consts)?;
        let component = rng.random_range(0..obj.n());
        let y = &snap.phi[rng.random_range(0..obj.n())];
        let lemma_cases = [
            LemmaInputs::StrongLb { component, x: &snap.x, y },
            LemmaInputs::IpBound { x: &snap.x, x_star: &snap.x_star },
            LemmaInputs::GradDiff { phi: &snap.phi, x_star: &snap.x_star },
        ];
        for (slot, inputs) in lemmas.iter_mut().zip(&lemma_cases) {
            slot.push(lemma_gap(obj, &inst.consts, inputs)?);
        }
        let mut worst_w = f64::INFINITY;
        for beta in [0.5, 1.0, 2.0, params.beta] {
            let inputs = LemmaInputs::WChange {
                x: &snap.x,
                phi: &snap.phi,
                x_star: &snap.x_star,
                gamma: params.gamma,
                beta,
            };
            worst_w = worst_w.min(lemma_gap(obj, &inst.consts, &inputs)?);
        }
        lemmas[3].push(worst_w);

        estimator.push(-estimator_error(&mut rng)?);
        moreau.push(-moreau_error(&mut rng)?);
    }

    let mut properties = vec![sc.finish(), adaptive.finish()];
    properties.extend(lemmas.into_iter().map(Inequality::finish));
    properties.push(estimator.finish());
    properties.push(moreau.finish());
    Ok(CertificationReport { properties })
}

fn estimator_error<R: Rng + ?Sized>(rng: &mut R) -> Result<f64> {
    let m = rng.random_range(1..=8);
    let pairs: Vec<(f64, f64)> = (0..m)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            (x, 0.5 * x + y)
        })
        .collect();
    let spec = EstimatorSpec::uniform(&pairs, rng.random::<f64>())?;
    let a = theta_estimator_stats(&spec);
    let b = theta_moments_by_enumeration(&spec);
    Ok((a.bias - b.bias).abs().max((a.variance - b.variance).abs()))
}

fn moreau_error<R: Rng + ?Sized>(rng: &mut R) -> Result<f64> {
    let gamma = rng.random_range(0.01..2.0);
    let strength = rng.random_range(0.0..3.0);
    let v: Vec<f64> = (0..5).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect();
    let mut worst: f64 = 0.0;
    for h in [Regularizer::L1 { strength }, Regularizer::L2 { strength }] {
        let p = h.prox(gamma, &v)?;
        let complement = linalg::sub(&v, &p);
        worst = worst.max(linalg::max_abs_diff(&complement, &h.moreau_complement(gamma, &v)?));
    }
    Ok(worst)
}
