//! Benchmark harness: datasets (LIBSVM files or seeded synthetic data),
//! JSON experiment configs, method comparisons against a reference
//! optimum, and CSV suboptimality traces.

pub mod config;
mod error;
pub mod experiment;
pub mod libsvm;
pub mod output;
pub mod synthetic;

pub use config::{DatasetSpec, ExperimentConfig, LossName, MethodSpec, RegularizerSpec, StepSizeSpec};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, Experiment, ResultRow};
pub use libsvm::{load_libsvm, parse_libsvm, write_libsvm, LibsvmOptions};
pub use output::{emit_csv, load_csv, read_csv, write_csv};
pub use synthetic::{generate_synthetic, Synthetic, SyntheticKind, SyntheticSpec};
