mod common;

use common::{normal_vec, objective, q2, rng};
use proptest::prelude::*;
use rand::Rng;
use saga_core::linalg::{axpy, max_abs_diff};
use saga_core::solvers::{
    epoch_indices, FinitoState, GradientTable, SagaState, SagaUState, Sampling, SvrgState, TableMode,
};
use saga_core::{FiniteSumObjective, LossKind, Regularizer};

fn random_saga_state(obj: &FiniteSumObjective, seed: u64, mode: TableMode) -> SagaState {
    let mut r = rng(seed);
    let points: Vec<Vec<f64>> = (0..obj.n()).map(|_| normal_vec(&mut r, obj.dim(), 1.5)).collect();
    let table = GradientTable::at_points(obj, &points, mode).unwrap();
    SagaState::from_parts(normal_vec(&mut r, obj.dim(), 1.5), table)
}

fn mean_direction(obj: &FiniteSumObjective, dir: impl Fn(usize) -> Vec<f64>) -> Vec<f64> {
    let mut mean = vec![0.0; obj.dim()];
    for j in 0..obj.n() {
        axpy(1.0 / obj.n() as f64, &dir(j), &mut mean);
    }
    mean
}

#[test]
fn saga_and_svrg_directions_are_unbiased() {
    for seed in 0..100u64 {
        let logistic = seed % 2 == 0;
        let loss = if logistic { LossKind::Logistic } else { LossKind::Squared };
        let split = if seed % 3 == 0 { 0.0 } else { 0.2 };
        let obj = objective(seed, loss, split, Regularizer::None);
        let s = random_saga_state(&obj, seed + 7, TableMode::preferred(&obj));
        let g = obj.full_gradient(s.x()).unwrap();
        let saga = mean_direction(&obj, |j| s.saga_direction(&obj, j));
        assert!(max_abs_diff(&saga, &g) <= 1e-12, "seed {seed}");

        let mut v = SvrgState::new(&obj, &normal_vec(&mut rng(seed), obj.dim(), 1.0)).unwrap();
        v.inner_step(&obj, 0, 0.01).unwrap();
        let gv = obj.full_gradient(v.x()).unwrap();
        let svrg = mean_direction(&obj, |j| v.direction(&obj, j));
        assert!(max_abs_diff(&svrg, &gv) <= 1e-12, "seed {seed}");
    }
}

#[test]
fn sag_direction_interpolates_with_weight_one_over_n() {
    for seed in 0..100u64 {
        let obj = objective(seed, LossKind::Logistic, 0.1, Regularizer::None);
        let s = random_saga_state(&obj, seed, TableMode::Dense);
        let n = obj.n() as f64;
        let mut expected = obj.full_gradient(s.x()).unwrap();
        for (e, a) in expected.iter_mut().zip(s.table().average()) {
            *e = *e / n + (1.0 - 1.0 / n) * a;
        }
        let sag = mean_direction(&obj, |j| s.sag_direction(&obj, j));
        assert!(max_abs_diff(&sag, &expected) <= 1e-12, "seed {seed}");
    }
}

#[test]
fn q2_fresh_table_directions_equal_one() {
    let obj = q2();
    let s = SagaState::new(&obj, &[1.0], TableMode::Scalar).unwrap();
    for j in 0..2 {
        assert_eq!(s.saga_direction(&obj, j), vec![1.0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn u_form_reproduces_saga(seed in any::<u64>(), logistic in any::<bool>()) {
        let loss = if logistic { LossKind::Logistic } else { LossKind::Squared };
        let obj = objective(seed, loss, 0.0, Regularizer::None);
        let gamma = 1.0 / (3.0 * obj.estimate_constants().unwrap().lipschitz);
        let x0 = normal_vec(&mut rng(seed), obj.dim(), 1.0);
        let mut a = SagaState::new(&obj, &x0, TableMode::Scalar).unwrap();
        let mut b = SagaUState::new(&obj, &x0, gamma, TableMode::Scalar).unwrap();
        let mut r = rng(seed ^ 1);
        for _ in 0..100 {
            let j = r.random_range(0..obj.n());
            a.saga_step(&obj, j, gamma).unwrap();
            b.step(&obj, j).unwrap();
            prop_assert!(max_abs_diff(a.x(), &b.x()) <= 1e-12);
        }
    }

    #[test]
    fn running_average_stays_consistent(seed in any::<u64>(), dense in any::<bool>()) {
        let obj = objective(seed, LossKind::Logistic, if dense { 0.1 } else { 0.0 }, Regularizer::L1 { strength: 0.01 });
        let mode = if dense { TableMode::Dense } else { TableMode::Scalar };
        let mut s = SagaState::new(&obj, &vec![0.0; obj.dim()], mode).unwrap();
        let gamma = 1.0 / (3.0 * obj.estimate_constants().unwrap().lipschitz);
        let mut r = rng(seed);
        for _ in 0..5 {
            for j in epoch_indices(obj.n(), obj.n(), Sampling::Uniform, false, &mut r) {
                s.saga_step(&obj, j, gamma).unwrap();
            }
            prop_assert!(s.resync(&obj) <= 1e-9);
        }
    }

    #[test]
    fn finito_mean_moves_toward_new_point_in_expectation(seed in any::<u64>()) {
        let obj = objective(seed, LossKind::Squared, 0.5, Regularizer::None);
        let mut r = rng(seed);
        let points: Vec<Vec<f64>> = (0..obj.n()).map(|_| normal_vec(&mut r, obj.dim(), 1.0)).collect();
        let s = FinitoState::from_points(&obj, &points, 0.5, TableMode::Dense).unwrap();
        let gamma = 1.0 / (2.0 * 0.5 * obj.n() as f64);
        let x = s.next_point(gamma);
        let mut mean = vec![0.0; obj.dim()];
        for j in 0..obj.n() {
            let mut t = s.clone();
            t.finito_step(&obj, j, gamma).unwrap();
            axpy(1.0 / obj.n() as f64, t.phi_mean(), &mut mean);
        }
        let mut expected = s.phi_mean().to_vec();
        for (e, xv) in expected.iter_mut().zip(&x) {
            *e += (xv - *e) / obj.n() as f64;
        }
        prop_assert!(max_abs_diff(&mean, &expected) <= 1e-12);
    }

    #[test]
    fn midpoint_identity_holds_after_every_step(seed in any::<u64>(), logistic in any::<bool>(), mu in 0.05f64..2.0) {
        let loss = if logistic { LossKind::Logistic } else { LossKind::Squared };
        let obj = objective(seed, loss, if seed % 2 == 0 { mu } else { 0.0 }, Regularizer::None);
        let mut r = rng(seed);
        let points: Vec<Vec<f64>> = (0..obj.n()).map(|_| normal_vec(&mut r, obj.dim(), 1.0)).collect();
        let mut s = FinitoState::from_points(&obj, &points, mu, TableMode::preferred(&obj)).unwrap();
        for _ in 0..30 {
            let j = r.random_range(0..obj.n());
            s.midpoint_step(&obj, j).unwrap();
            let identity = s.midpoint_identity();
            prop_assert!(max_abs_diff(s.phi(j), &identity) <= 1e-10);
            prop_assert!(max_abs_diff(s.x(), &identity) <= 1e-10);
        }
    }
}
