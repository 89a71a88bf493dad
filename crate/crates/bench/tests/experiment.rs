use saga_bench::config::{InitName, MethodSpec, RegularizerSpec};
use saga_bench::experiment::{build_objective, SUBOPTIMALITY_FLOOR};
use saga_bench::{
    read_csv, run_experiment, write_csv, DatasetSpec, Experiment, ExperimentConfig, LossName, ResultRow,
    StepSizeSpec, SyntheticKind, SyntheticSpec,
};
use saga_core::solvers::{run, Method, RunConfig};
use saga_core::{compute_reference_optimum, linalg};

fn config(kind: SyntheticKind, loss: LossName, methods: &[&str]) -> ExperimentConfig {
    let mut data = SyntheticSpec::new(kind, 60, 6);
    data.noise = 0.5;
    data.seed = 5;
    ExperimentConfig {
        dataset: DatasetSpec::Synthetic(data),
        loss,
        regularizer: RegularizerSpec { l2: 0.05, l1: 0.0 },
        methods: methods.iter().map(|m| MethodSpec::named(m)).collect(),
        epochs: 10,
        seeds: vec![0, 1, 2],
        trace_every: 1,
        output: None,
        sweep_steps: false,
        sampling: Default::default(),
        init: InitName::FullPass,
    }
}

fn csv_bytes(rows: &[ResultRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).unwrap();
    buf
}

#[test]
fn row_count_includes_epoch_zero() {
    let cfg = config(SyntheticKind::Ridge, LossName::Squared, &["saga", "svrg"]);
    assert_eq!(run_experiment(&cfg).unwrap().len(), 2 * 3 * 11);
}

#[test]
fn coarser_traces_keep_the_endpoints() {
    let mut cfg = config(SyntheticKind::Ridge, LossName::Squared, &["saga"]);
    cfg.seeds = vec![0];
    cfg.trace_every = 4;
    let x: Vec<f64> = run_experiment(&cfg).unwrap().iter().map(|r| r.grad_evals_per_n).collect();
    assert_eq!(x, vec![0.0, 4.0, 8.0, 10.0]);
}

#[test]
fn svrg_accounting_advances_three_per_epoch() {
    let cfg = config(SyntheticKind::Ridge, LossName::Squared, &["svrg"]);
    let rows = run_experiment(&cfg).unwrap();
    for run in rows.chunks(11) {
        for (k, r) in run.iter().enumerate() {
            assert_eq!(r.grad_evals_per_n, 3.0 * k as f64);
        }
    }
}

#[test]
fn accounting_is_strictly_monotone() {
    let cfg = config(SyntheticKind::Logistic, LossName::Logistic, &["saga", "sag", "svrg", "finito", "sdca", "midpoint"]);
    let rows = run_experiment(&cfg).unwrap();
    for w in rows.windows(2) {
        if w[0].method == w[1].method && w[0].seed == w[1].seed {
            assert!(w[1].grad_evals_per_n > w[0].grad_evals_per_n, "{:?}", w);
        }
    }
    assert!(rows.iter().all(|r| r.suboptimality >= SUBOPTIMALITY_FLOOR && r.dist_sq >= 0.0));
}

#[test]
fn identical_config_gives_identical_csv() {
    let cfg = config(SyntheticKind::Logistic, LossName::Logistic, &["saga", "svrg", "sag"]);
    let a = csv_bytes(&run_experiment(&cfg).unwrap());
    let b = csv_bytes(&run_experiment(&cfg).unwrap());
    assert_eq!(a, b);
    let back = read_csv(a.as_slice()).unwrap();
    assert_eq!(csv_bytes(&back), a);
}

#[test]
fn csv_file_round_trip() {
    let mut cfg = config(SyntheticKind::Ridge, LossName::Squared, &["saga"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    cfg.output = Some(path.clone());
    let rows = run_experiment(&cfg).unwrap();
    saga_bench::emit_csv(&rows, &path).unwrap();
    assert_eq!(saga_bench::load_csv(&path).unwrap(), rows);
    assert!(saga_bench::emit_csv(&rows, dir.path().join("missing/trace.csv")).is_err());
}

#[test]
fn l1_rejects_methods_without_prox_before_running() {
    let mut cfg = config(SyntheticKind::LassoLs, LossName::Squared, &["saga", "finito"]);
    cfg.regularizer.l1 = 0.1;
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("does not support proximal"), "{err}");
    cfg.methods.pop();
    cfg.methods.push(MethodSpec::named("svrg"));
    assert!(run_experiment(&cfg).is_ok());
}

#[test]
fn missing_strong_convexity_is_a_config_error() {
    let mut cfg = config(SyntheticKind::Ridge, LossName::Squared, &["sdca"]);
    cfg.regularizer.l2 = 0.0;
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn divergence_exits_with_numerical_code() {
    let mut cfg = config(SyntheticKind::Ridge, LossName::Squared, &["saga"]);
    cfg.methods[0].step_size = Some(StepSizeSpec::Value(50.0));
    cfg.epochs = 50;
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn sweep_never_does_worse_than_the_default_on_the_tuning_seed() {
    let mut cfg = config(SyntheticKind::Logistic, LossName::Logistic, &["saga", "svrg"]);
    cfg.seeds = vec![0];
    let plain = run_experiment(&cfg).unwrap();
    cfg.sweep_steps = true;
    let swept = run_experiment(&cfg).unwrap();
    let last = |rows: &[ResultRow], m: &str| rows.iter().rfind(|r| r.method == m).unwrap().suboptimality;
    for m in ["saga", "svrg"] {
        assert!(last(&swept, m) <= last(&plain, m), "{m}");
    }
}

#[test]
fn planted_weights_are_recovered_without_noise() {
    let mut data = SyntheticSpec::new(SyntheticKind::Ridge, 80, 5);
    data.seed = 2;
    let planted = saga_bench::generate_synthetic(&data).unwrap().planted;
    let mut cfg = config(SyntheticKind::Ridge, LossName::Squared, &["saga"]);
    cfg.dataset = DatasetSpec::Synthetic(data);
    cfg.regularizer.l2 = 1e-12;
    let obj = build_objective(&cfg).unwrap();
    let mut rc = RunConfig::new(Method::Saga);
    rc.epochs = 200;
    let x = run(&obj, &[0.0; 5], &rc).unwrap().x;
    assert!(linalg::max_abs_diff(&x, &planted) < 1e-4, "{x:?} vs {planted:?}");
}

#[test]
fn long_runs_agree_across_methods() {
    let mut cfg = config(
        SyntheticKind::Logistic,
        LossName::Logistic,
        &["saga", "saga_l2", "sag", "svrg", "finito", "sdca", "sdca_v5", "midpoint"],
    );
    cfg.regularizer.l2 = 0.1;
    cfg.seeds = vec![4];
    let exp = Experiment::prepare(cfg.clone()).unwrap();
    let mut finals = Vec::new();
    for spec in &cfg.methods {
        let mut rc = RunConfig::new(spec.resolve().unwrap());
        rc.epochs = if spec.method == "sag" { 2000 } else { 300 };
        let res = run(&exp.objective, &[0.0; 6], &rc).unwrap();
        let value = exp.objective.objective_value(&res.x, true).unwrap();
        assert!(value - exp.optimum.value <= 1e-8, "{}: {:e}", spec.method, value - exp.optimum.value);
        finals.push(res.x);
    }
    for a in &finals {
        for b in &finals {
            assert!(linalg::max_abs_diff(a, b) < 1e-4);
        }
    }
}

#[test]
fn optimum_is_shared_by_all_runs() {
    let cfg = config(SyntheticKind::Ridge, LossName::Squared, &["saga"]);
    let exp = Experiment::prepare(cfg.clone()).unwrap();
    let direct = compute_reference_optimum(&build_objective(&cfg).unwrap()).unwrap();
    assert_eq!(exp.optimum, direct);
    assert!(exp.optimum.residual <= 1e-12);
}
