//! Composite terms `h` with closed-form proximal operators.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Regularizer {
    #[default]
    None,
    /// `h(x) = (strength/2)‖x‖²`
    L2 { strength: f64 },
    /// `h(x) = strength·‖x‖₁`
    L1 { strength: f64 },
    /// `h(x) = (l2/2)‖x‖² + l1·‖x‖₁`
    ElasticNet { l2: f64, l1: f64 },
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStepSize(gamma))
    }
}

impl Regularizer {
    pub fn validate(&self) -> Result<()> {
        let ok = |s: f64| s >= 0.0 && s.is_finite();
        let valid = match *self {
            Regularizer::None => true,
            Regularizer::L2 { strength } | Regularizer::L1 { strength } => ok(strength),
            Regularizer::ElasticNet { l2, l1 } => ok(l2) && ok(l1),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("regularizer strengths must be finite and >= 0: {self:?}")))
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Regularizer::None)
    }

    /// True when the term has a nonsmooth part.
    pub fn has_l1(&self) -> bool {
        match *self {
            Regularizer::L1 { strength } => strength > 0.0,
            Regularizer::ElasticNet { l1, .. } => l1 > 0.0,
            _ => false,
        }
    }

    fn parts(&self) -> (f64, f64) {
        match *self {
            Regularizer::None => (0.0, 0.0),
            Regularizer::L2 { strength } => (strength, 0.0),
            Regularizer::L1 { strength } => (0.0, strength),
            Regularizer::ElasticNet { l2, l1 } => (l2, l1),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let (l2, l1) = self.parts();
        let mut v = 0.0;
        if l2 != 0.0 {
            v += 0.5 * l2 * x.iter().map(|t| t * t).sum::<f64>();
        }
        if l1 != 0.0 {
            v += l1 * x.iter().map(|t| t.abs()).sum::<f64>();
        }
        v
    }

    /// `argmin_x { h(x) + ‖x − y‖²/(2γ) }`
    pub fn prox(&self, gamma: f64, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = y.to_vec();
        self.prox_in_place(gamma, &mut out)?;
        Ok(out)
    }

    pub fn prox_in_place(&self, gamma: f64, y: &mut [f64]) -> Result<()> {
        check_gamma(gamma)?;
        let (l2, l1) = self.parts();
        let shrink = 1.0 / (1.0 + gamma * l2);
        let thresh = gamma * l1;
        match (l1 != 0.0, l2 != 0.0) {
            (false, false) => {}
            (false, true) => y.iter_mut().for_each(|v| *v *= shrink),
            (true, _) => y
                .iter_mut()
                .for_each(|v| *v = soft_threshold(*v, thresh) * shrink),
        }
        Ok(())
    }

    /// Closed form of `v − prox_γ(v)`, the conjugate side of the Moreau
    /// decomposition: a clamp to `[−γλ, γλ]` for L1, the shrink complement
    /// `γμ/(1 + γμ)·v` for L2, zero for no regularizer.
    pub fn moreau_complement(&self, gamma: f64, v: &[f64]) -> Result<Vec<f64>> {
        check_gamma(gamma)?;
        let out = match *self {
            Regularizer::None => vec![0.0; v.len()],
            Regularizer::L2 { strength } => {
                let w = gamma * strength / (1.0 + gamma * strength);
                v.iter().map(|t| w * t).collect()
            }
            Regularizer::L1 { strength } => {
                let t = gamma * strength;
                v.iter().map(|x| x.clamp(-t, t)).collect()
            }
            Regularizer::ElasticNet { l2, l1 } => {
                // v − soft(v, γλ)/(1+γμ) = clamp(v) + γμ/(1+γμ)·soft(v)
                let t = gamma * l1;
                let w = gamma * l2 / (1.0 + gamma * l2);
                v.iter()
                    .map(|x| x.clamp(-t, t) + w * soft_threshold(*x, t))
                    .collect()
            }
        };
        Ok(out)
    }
}
