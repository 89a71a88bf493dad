mod common;

use common::{normal_vec, objective, rng};
use proptest::prelude::*;
use rand::Rng;
use saga_core::linalg::{dist_sq, dot, norm_sq, sub};
use saga_core::{LossKind, Regularizer};

fn loss_kind(logistic: bool) -> LossKind {
    if logistic {
        LossKind::Logistic
    } else {
        LossKind::Squared
    }
}

#[test]
fn full_gradient_matches_central_differences() {
    for seed in 0..100u64 {
        let obj = objective(seed, loss_kind(seed % 2 == 0), 0.1 * (seed % 3) as f64, Regularizer::None);
        let mut r = rng(seed + 1000);
        let x = normal_vec(&mut r, obj.dim(), 1.0);
        let g = obj.full_gradient(&x).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..obj.dim())
            .map(|t| {
                let mut p = x.clone();
                let mut m = x.clone();
                p[t] += h;
                m[t] -= h;
                (obj.objective_value(&p, false).unwrap() - obj.objective_value(&m, false).unwrap()) / (2.0 * h)
            })
            .collect();
        let err = dist_sq(&fd, &g).sqrt();
        assert!(err <= 1e-6 * norm_sq(&g).sqrt().max(1.0), "seed {seed}: {err}");
    }
}

fn prox_objective(h: &Regularizer, gamma: f64, p: &[f64], y: &[f64]) -> f64 {
    h.value(p) + dist_sq(p, y) / (2.0 * gamma)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prox_is_a_minimizer(seed in any::<u64>(), kind in 0usize..4, gamma in 0.01f64..3.0) {
        let mut r = rng(seed);
        let (a, b) = (r.random_range(0.0..2.0), r.random_range(0.0..2.0));
        let h = match kind {
            0 => Regularizer::None,
            1 => Regularizer::L2 { strength: a },
            2 => Regularizer::L1 { strength: b },
            _ => Regularizer::ElasticNet { l2: a, l1: b },
        };
        let y = normal_vec(&mut r, 4, 2.0);
        let p = h.prox(gamma, &y).unwrap();
        let best = prox_objective(&h, gamma, &p, &y);
        for _ in 0..1000 {
            let scale = 10f64.powf(r.random_range(-6.0..0.0));
            let q: Vec<f64> = p.iter().zip(normal_vec(&mut r, 4, scale)).map(|(a, b)| a + b).collect();
            prop_assert!(best <= prox_objective(&h, gamma, &q, &y) + 1e-12);
        }
    }

    #[test]
    fn moreau_complement_is_conjugate_prox(seed in any::<u64>(), gamma in 0.01f64..3.0, s in 0.0f64..3.0) {
        let mut r = rng(seed);
        let v = normal_vec(&mut r, 6, 3.0);
        for h in [Regularizer::L1 { strength: s }, Regularizer::L2 { strength: s }] {
            let complement = sub(&v, &h.prox(gamma, &v).unwrap());
            let closed = h.moreau_complement(gamma, &v).unwrap();
            for (a, b) in complement.iter().zip(&closed) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
        // For h = λ|·| the complement is the clamp onto [−γλ, γλ].
        let clamp: Vec<f64> = v.iter().map(|x| x.clamp(-gamma * s, gamma * s)).collect();
        let l1 = Regularizer::L1 { strength: s };
        let complement = sub(&v, &l1.prox(gamma, &v).unwrap());
        for (a, b) in complement.iter().zip(&clamp) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn split_l2_components_are_strongly_convex(seed in any::<u64>(), mu in 0.01f64..2.0, logistic in any::<bool>()) {
        let obj = objective(seed, loss_kind(logistic), mu, Regularizer::None);
        let mut r = rng(seed ^ 0xabc);
        for i in 0..obj.n() {
            let x = normal_vec(&mut r, obj.dim(), 2.0);
            let y = normal_vec(&mut r, obj.dim(), 2.0);
            let g = obj.component_gradient(i, &x).unwrap();
            let slack = obj.component_value(i, &y).unwrap()
                - obj.component_value(i, &x).unwrap()
                - dot(&g, &sub(&y, &x))
                - mu / 2.0 * dist_sq(&y, &x);
            prop_assert!(slack >= -1e-12, "slack {}", slack);
        }
    }

    #[test]
    fn loss_prox_satisfies_optimality(seed in any::<u64>(), gamma in 0.01f64..10.0, split in 0.0f64..1.0, logistic in any::<bool>()) {
        let obj = objective(seed, loss_kind(logistic), split, Regularizer::None);
        let mut r = rng(seed ^ 0x55);
        let z = normal_vec(&mut r, obj.dim(), 3.0);
        let i = r.random_range(0..obj.n());
        let p = obj.scalar_loss_prox(i, gamma, &z).unwrap();
        let g = obj.component_gradient(i, &p.point).unwrap();
        for (a, b) in g.iter().zip(&p.gradient) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }
}

#[test]
fn constants_bound_every_component_curvature() {
    for seed in 0..20 {
        let obj = objective(seed, LossKind::Logistic, 0.3, Regularizer::None);
        let c = obj.estimate_constants().unwrap();
        assert_eq!(c.strong_convexity, 0.3);
        let mut r = rng(seed);
        for i in 0..obj.n() {
            let x = normal_vec(&mut r, obj.dim(), 1.0);
            let y = normal_vec(&mut r, obj.dim(), 1.0);
            let dg = sub(&obj.component_gradient(i, &x).unwrap(), &obj.component_gradient(i, &y).unwrap());
            assert!(norm_sq(&dg).sqrt() <= c.lipschitz * dist_sq(&x, &y).sqrt() + 1e-12);
        }
    }
}
