use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use saga_core::analysis::{certify, CertifyOptions};
use saga_bench::config::MethodSpec;
use saga_bench::{emit_csv, write_csv, BenchError, Experiment, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "saga-bench", version, about = "Compare variance-reduced solvers on a finite-sum problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured methods and write suboptimality traces as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated method names, replacing the config's list.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Output path; `-` or no path writes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tune each step size on a geometric grid first.
        #[arg(long)]
        sweep_steps: bool,
    },
    /// Check the convergence lemmas and Lyapunov contraction on random problems.
    Certify {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the reference optimum `x*` and `F*`.
    Optimum {
        #[arg(long)]
        config: PathBuf,
    },
}

fn apply_overrides(
    cfg: &mut ExperimentConfig,
    methods: Option<Vec<String>>,
    epochs: Option<usize>,
    seeds: Option<Vec<u64>>,
    out: Option<PathBuf>,
    sweep_steps: bool,
) {
    if let Some(names) = methods {
        cfg.methods = names
            .iter()
            .map(|name| {
                cfg.methods
                    .iter()
                    .find(|m| m.label() == name)
                    .cloned()
                    .unwrap_or_else(|| MethodSpec::named(name))
            })
            .collect();
    }
    if let Some(e) = epochs {
        cfg.epochs = e;
    }
    if let Some(s) = seeds {
        cfg.seeds = s;
    }
    if out.is_some() {
        cfg.output = out;
    }
    cfg.sweep_steps |= sweep_steps;
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, methods, epochs, seeds, out, sweep_steps } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            apply_overrides(&mut cfg, methods, epochs, seeds, out, sweep_steps);
            let output = cfg.output.clone();
            let rows = Experiment::prepare(cfg)?.run()?;
            match output {
                Some(path) if path.as_os_str() != "-" => emit_csv(&rows, path)?,
                _ => write_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Certify { instances, seed } => {
            let opts = CertifyOptions { instances, seed, ..CertifyOptions::default() };
            let report = certify(&opts)?;
            print!("{report}");
            Ok(report.all_passed())
        }
        Command::Optimum { config } => {
            let exp = Experiment::prepare(ExperimentConfig::load(&config)?)?;
            let mut out = std::io::stdout().lock();
            let x: Vec<String> = exp.optimum.x.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "F* = {:.16e}", exp.optimum.value).map_err(|e| BenchError::io("stdout", e))?;
            writeln!(out, "x* = [{}]", x.join(", ")).map_err(|e| BenchError::io("stdout", e))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
