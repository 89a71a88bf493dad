use crate::error::{Error, Result};

/// One point of a finite sample space: probability and the values of the
/// paired variables `X` and `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub prob: f64,
    pub x: f64,
    pub y: f64,
}

/// The estimator `θ_α = α(X − Y) + E[Y]` over a finite sample space.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSpec {
    pub outcomes: Vec<Outcome>,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorStats {
    /// `E[θ_α] − E[X]`
    pub bias: f64,
    pub variance: f64,
}

impl EstimatorSpec {
    pub fn new(outcomes: Vec<Outcome>, alpha: f64) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidInput("empty sample space".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidInput(format!("alpha {alpha} outside [0, 1]")));
        }
        if outcomes.iter().any(|o| !(o.prob >= 0.0) || !o.x.is_finite() || !o.y.is_finite()) {
            return Err(Error::InvalidInput("probabilities must be >= 0 and values finite".into()));
        }
        let total: f64 = outcomes.iter().map(|o| o.prob).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
        }
        Ok(Self { outcomes, alpha })
    }

    /// Equiprobable outcomes.
    pub fn uniform(pairs: &[(f64, f64)], alpha: f64) -> Result<Self> {
        let p = 1.0 / pairs.len().max(1) as f64;
        Self::new(pairs.iter().map(|&(x, y)| Outcome { prob: p, x, y }).collect(), alpha)
    }

    fn expect(&self, f: impl Fn(&Outcome) -> f64) -> f64 {
        self.outcomes.iter().map(|o| o.prob * f(o)).sum()
    }
}

/// Closed forms: bias `(α − 1)(E[X] − E[Y])`, variance
/// `α²(var X + var Y − 2 cov(X, Y))`.
pub fn theta_estimator_stats(spec: &EstimatorSpec) -> EstimatorStats {
    let ex = spec.expect(|o| o.x);
    let ey = spec.expect(|o| o.y);
    let var_x = spec.expect(|o| (o.x - ex).powi(2));
    let var_y = spec.expect(|o| (o.y - ey).powi(2));
    let cov = spec.expect(|o| (o.x - ex) * (o.y - ey));
    let a = spec.alpha;
    EstimatorStats { bias: (a - 1.0) * (ex - ey), variance: a * a * (var_x + var_y - 2.0 * cov) }
}

/// Moments of `θ_α` computed directly from its value on each outcome.
pub fn theta_moments_by_enumeration(spec: &EstimatorSpec) -> EstimatorStats {
    let ex = spec.expect(|o| o.x);
    let ey = spec.expect(|o| o.y);
    let theta = |o: &Outcome| spec.alpha * (o.x - o.y) + ey;
    let mean = spec.expect(theta);
    let variance = spec.expect(|o| (theta(o) - mean).powi(2));
    EstimatorStats { bias: mean - ex, variance }
}
