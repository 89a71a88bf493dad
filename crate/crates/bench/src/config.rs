//! JSON experiment configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use saga_core::solvers::{Method, Sampling, StepSizePolicy, TableInit};
use saga_core::LossKind;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::synthetic::SyntheticSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    Synthetic(SyntheticSpec),
    Libsvm {
        path: PathBuf,
        #[serde(default)]
        normalize: bool,
        #[serde(default)]
        dim: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossName {
    Squared,
    Logistic,
}

impl From<LossName> for LossKind {
    fn from(l: LossName) -> Self {
        match l {
            LossName::Squared => LossKind::Squared,
            LossName::Logistic => LossKind::Logistic,
        }
    }
}

/// `l2` is shared among the components, so it counts towards `μ`; `l1` is
/// applied through its prox.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizerSpec {
    #[serde(default)]
    pub l2: f64,
    #[serde(default)]
    pub l1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    StronglyConvex,
    AverageStronglyConvex,
    Adaptive,
}

/// A number, or the name of a theory rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSizeSpec {
    Value(f64),
    Policy(PolicyName),
}

impl From<StepSizeSpec> for StepSizePolicy {
    fn from(s: StepSizeSpec) -> Self {
        match s {
            StepSizeSpec::Value(g) => StepSizePolicy::Manual(g),
            StepSizeSpec::Policy(PolicyName::StronglyConvex) => StepSizePolicy::StronglyConvex,
            StepSizeSpec::Policy(PolicyName::AverageStronglyConvex) => StepSizePolicy::AverageStronglyConvex,
            StepSizeSpec::Policy(PolicyName::Adaptive) => StepSizePolicy::Adaptive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub method: String,
    /// Name used in the output; defaults to `method`.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub step_size: Option<StepSizeSpec>,
    /// SVRG inner loop length; defaults to `n`.
    #[serde(default)]
    pub inner: Option<usize>,
}

impl MethodSpec {
    pub fn named(method: &str) -> Self {
        Self { method: method.to_string(), label: None, step_size: None, inner: None }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.method)
    }

    pub fn resolve(&self) -> Result<Method> {
        let method = Method::from_str(&self.method).map_err(|e| BenchError::Config(e.to_string()))?;
        match method {
            Method::Svrg { .. } => Ok(Method::Svrg { inner: self.inner }),
            _ if self.inner.is_some() => {
                Err(BenchError::Config(format!("`inner` only applies to svrg, not {method}")))
            }
            m => Ok(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingName {
    #[default]
    Uniform,
    Permuted,
}

impl From<SamplingName> for Sampling {
    fn from(s: SamplingName) -> Self {
        match s {
            SamplingName::Uniform => Sampling::Uniform,
            SamplingName::Permuted => Sampling::PermutedPerPass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    #[default]
    FullPass,
    FirstPass,
}

impl From<InitName> for TableInit {
    fn from(s: InitName) -> Self {
        match s {
            InitName::FullPass => TableInit::FullPass,
            InitName::FirstPass => TableInit::FirstPassHeuristic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub loss: LossName,
    #[serde(default)]
    pub regularizer: RegularizerSpec,
    pub methods: Vec<MethodSpec>,
    pub epochs: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Record a trace row every this many epochs.
    #[serde(default = "default_trace_every")]
    pub trace_every: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Pick each step size from a geometric grid on the first seed.
    #[serde(default)]
    pub sweep_steps: bool,
    #[serde(default)]
    pub sampling: SamplingName,
    #[serde(default)]
    pub init: InitName,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_trace_every() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Shape checks that need no data. Method and regularizer compatibility
    /// is checked against the built objective before any run.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(BenchError::Config("at least one method is required".into()));
        }
        if self.epochs == 0 {
            return Err(BenchError::Config("epochs must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::Config("seeds must be non-empty".into()));
        }
        if self.trace_every == 0 {
            return Err(BenchError::Config("trace_every must be at least 1".into()));
        }
        let RegularizerSpec { l2, l1 } = self.regularizer;
        if !(l2 >= 0.0 && l2.is_finite() && l1 >= 0.0 && l1.is_finite()) {
            return Err(BenchError::Config("regularizer strengths must be finite and >= 0".into()));
        }
        let mut labels = Vec::new();
        for spec in &self.methods {
            spec.resolve()?;
            if labels.contains(&spec.label()) {
                return Err(BenchError::Config(format!("duplicate method label `{}`", spec.label())));
            }
            labels.push(spec.label());
        }
        if let DatasetSpec::Synthetic(s) = &self.dataset {
            s.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dataset": {"synthetic": {"kind": "ridge", "n": 10, "d": 3}},
        "loss": "squared",
        "methods": [{"method": "saga"}],
        "epochs": 5
    }"#;

    #[test]
    fn defaults() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.seeds, vec![0]);
        assert_eq!(cfg.trace_every, 1);
        assert_eq!(cfg.regularizer, RegularizerSpec::default());
        assert!(!cfg.sweep_steps);
    }

    #[test]
    fn step_size_forms() {
        let v: MethodSpec = serde_json::from_str(r#"{"method": "sag", "step_size": 0.25}"#).unwrap();
        assert_eq!(v.step_size.map(StepSizePolicy::from), Some(StepSizePolicy::Manual(0.25)));
        let p: MethodSpec = serde_json::from_str(r#"{"method": "saga", "step_size": "adaptive"}"#).unwrap();
        assert_eq!(p.step_size.map(StepSizePolicy::from), Some(StepSizePolicy::Adaptive));
        assert!(serde_json::from_str::<MethodSpec>(r#"{"method": "saga", "step_size": "huge"}"#).is_err());
    }

    #[test]
    fn invariants() {
        let mut cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        cfg.methods.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        cfg.epochs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        cfg.seeds.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        cfg.methods.push(MethodSpec::named("saga"));
        assert!(cfg.validate().unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn method_names() {
        assert!(MethodSpec::named("newton").resolve().is_err());
        let mut svrg = MethodSpec::named("svrg");
        svrg.inner = Some(7);
        assert_eq!(svrg.resolve().unwrap(), Method::Svrg { inner: Some(7) });
        let mut saga = MethodSpec::named("saga");
        saga.inner = Some(7);
        assert!(saga.resolve().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"epochs\": 5", "\"epochs\": 5, \"epoch\": 3");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(BenchError::Json(_))));
    }
}
