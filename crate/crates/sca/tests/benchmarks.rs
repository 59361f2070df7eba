mod common;

use common::{drop, params};
use swipt_core::metrics::{benchmark3_q, benchmark3_se, evaluate, evaluate_orthogonal};
use swipt_core::Allocation;
use swipt_sca::*;

#[test]
fn benchmark1_transmits_at_full_power() {
    let p = params(8, 3, 2, 1e-6);
    for seed in 0..10 {
        let net = drop(&p, seed);
        let out = benchmark1(&net, &p, seed).unwrap();
        let alloc = &out.allocation;
        assert!(alloc.is_binary());
        for m in 0..8 {
            assert!((alloc.info_power(m) - alloc.a[m]).abs() < 1e-15);
            assert!((alloc.energy_power(m) - (1.0 - alloc.a[m])).abs() < 1e-15);
        }
        assert!(alloc.a.contains(&1.0) && alloc.a.contains(&0.0));
        assert_eq!(out.metrics, evaluate(alloc, &net, &p).unwrap());
    }
}

#[test]
fn benchmark1_is_deterministic_per_seed() {
    let p = params(8, 2, 2, 1e-6);
    let net = drop(&p, 4);
    let draws: Vec<Vec<f64>> = (0..12).map(|s| benchmark1(&net, &p, s).unwrap().allocation.a).collect();
    for (s, a) in draws.iter().enumerate() {
        assert_eq!(*a, benchmark1(&net, &p, s as u64).unwrap().allocation.a);
    }
    assert!(draws.iter().any(|a| *a != draws[0]), "seed has no effect");
}

#[test]
fn benchmark1_never_leaves_a_mode_empty() {
    let p = params(2, 1, 1, 0.0);
    for seed in 0..200 {
        let net = drop(&p, seed);
        let a = benchmark1(&net, &p, seed).unwrap().allocation.a;
        assert!(a == [1.0, 0.0] || a == [0.0, 1.0], "{a:?}");
    }
}

#[test]
fn benchmark2_without_energy_aps_is_infeasible() {
    let p = params(4, 2, 2, 1e-8);
    let net = drop(&p, 1);
    let out = benchmark2_solve(&net, &p, &[1.0; 4]).unwrap();
    assert_eq!(out.status, OutcomeStatus::Infeasible);
    assert!(!out.is_feasible());
}

#[test]
fn benchmark2_rejects_fractional_modes() {
    let p = params(3, 1, 1, 0.0);
    let net = drop(&p, 0);
    assert!(matches!(benchmark2_solve(&net, &p, &[1.0, 0.5, 0.0]), Err(ScaError::InvalidModes(_))));
    assert!(matches!(benchmark2_solve(&net, &p, &[1.0, 0.0]), Err(ScaError::InvalidModes(_))));
}

#[test]
fn benchmark2_reproduces_the_rounded_proposed_solution() {
    let p = params(6, 2, 2, 1e-8);
    let mut checked = 0;
    for seed in 0..5 {
        let net = drop(&p, seed);
        let out = proposed(&net, &p).unwrap();
        if !out.rounded.is_feasible() {
            continue;
        }
        checked += 1;
        let b2 = benchmark2_solve(&net, &p, &out.rounded.allocation.a).unwrap();
        assert!(b2.is_feasible());
        for w in b2.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        let (x, y) = (b2.objective_sum_he, out.rounded.objective_sum_he);
        assert!((x - y).abs() <= 1e-6 * y, "seed {seed}: benchmark2 {x} rounded {y}");
    }
    assert!(checked >= 2);
}

#[test]
fn benchmark3_halves_are_decoupled() {
    let p = params(5, 2, 3, 1e-8);
    let net = drop(&p, 6);
    let out = benchmark3_solve(&net, &p).unwrap();
    assert!(out.is_feasible(), "{}", out.text_log());
    let alloc = &out.allocation;
    assert!(alloc.a.iter().all(|&a| a == 1.0));
    let q = benchmark3_q(&alloc.eta_e, &net, &p);
    let se = benchmark3_se(&alloc.eta_i, &net, &p);
    assert_eq!(out.metrics.q_per_eu, q);
    assert_eq!(out.metrics.se_per_iu, se);
    let zero_i = nalgebra::DMatrix::zeros(5, 2);
    let zero_e = nalgebra::DMatrix::zeros(5, 3);
    assert_eq!(evaluate_orthogonal(&zero_i, &alloc.eta_e, &net, &p).q_per_eu, q);
    assert_eq!(evaluate_orthogonal(&alloc.eta_i, &zero_e, &net, &p).se_per_iu, se);
    for m in 0..5 {
        assert!(alloc.eta_i.row(m).sum() <= 1.0 + 1e-8);
        assert!(alloc.eta_e.row(m).sum() <= 1.0 + 1e-8);
    }
    for &s in &out.metrics.se_per_iu {
        assert!(s >= p.se_target - 1e-6);
    }
}

#[test]
fn benchmark3_energy_half_ignores_se_target() {
    let p = params(5, 2, 3, 1e-8);
    let net = drop(&p, 6);
    let base = benchmark3_solve(&net, &p).unwrap();
    let other = benchmark3_solve(&net, &p.clone().with_se_target(0.5)).unwrap();
    assert_eq!(base.allocation.eta_e, other.allocation.eta_e);
    assert_eq!(base.objective_sum_he, other.objective_sum_he);
}

#[test]
fn benchmark3_prelog_is_half_the_joint_prelog() {
    let p = params(4, 2, 2, 0.0);
    let net = drop(&p, 5);
    let eta_i = nalgebra::DMatrix::from_element(4, 2, 0.5);
    let joint = Allocation {
        a: vec![1.0; 4],
        eta_i: eta_i.clone(),
        eta_e: nalgebra::DMatrix::zeros(4, 2),
    };
    let full = evaluate(&joint, &net, &p).unwrap().se_per_iu;
    let half = benchmark3_se(&eta_i, &net, &p);
    for (f, h) in full.iter().zip(&half) {
        assert!((h / f - 0.5).abs() < 1e-12, "{h} vs {f}");
    }
}
