mod common;

use common::{drop, drop_from_distances, params};
use swipt_core::{Allocation, NetworkRealization, SystemParams};
use swipt_sca::*;

fn assert_monotone(out: &SolveOutcome) {
    for w in out.history.windows(2) {
        assert!(w[1] >= w[0] - 1e-9, "history fell from {} to {}", w[0], w[1]);
    }
}

fn assert_output_feasible(out: &SolveOutcome, net: &NetworkRealization, p: &SystemParams) {
    let alloc = &out.allocation;
    assert!(alloc.power_violation() <= 1e-8, "power budget exceeded by {}", alloc.power_violation());
    alloc.check(net, 1e-8).unwrap();
    for &s in &out.metrics.se_per_iu {
        assert!(s >= p.se_target - 1e-6, "SE {s}");
    }
    for (&phi, &g) in out.metrics.phi_per_eu.iter().zip(&p.he_targets) {
        assert!(phi >= g - 1e-9, "harvested {phi} target {g}");
    }
}

#[test]
fn relaxed_and_rounded_outputs_are_feasible_and_monotone() {
    let p = params(6, 2, 3, 1e-8);
    let mut solved = 0;
    for seed in 0..6 {
        let net = drop(&p, seed);
        let out = proposed(&net, &p).unwrap();
        assert_monotone(&out.relaxed);
        if out.relaxed.status.is_solved() {
            assert_output_feasible(&out.relaxed, &net, &p);
            let first = out.relaxed.history[0];
            assert!(out.relaxed.objective_sum_he >= first - 1e-12);
        }
        if out.rounded.is_feasible() {
            solved += 1;
            assert!(out.rounded.allocation.is_binary());
            assert_monotone(&out.rounded);
            assert_output_feasible(&out.rounded, &net, &p);
            assert!(
                out.rounded.objective_sum_he <= out.relaxed.objective_sum_he + 1e-6,
                "rounded {} relaxed {}",
                out.rounded.objective_sum_he,
                out.relaxed.objective_sum_he
            );
        }
    }
    assert!(solved >= 3, "only {solved} feasible drops");
}

#[test]
fn empty_qos_never_needs_phase_one() {
    for seed in 0..4 {
        let p = params(4, 2, 2, 0.0).with_se_target(0.0);
        let net = drop(&p, seed);
        let start = initialize(&net, &p).unwrap();
        assert!(start.feasible);
        assert_eq!(start.phase1_iterations, 0);
        let out = sca_solve(&net, &p).unwrap();
        assert_eq!(out.phase1_iterations, 0);
        assert!(out.status.is_solved());
    }
}

#[test]
fn unreachable_se_target_is_reported_infeasible() {
    let p = params(1, 1, 1, 0.0).with_se_target(50.0);
    let net = drop(&p, 7);
    let start = initialize(&net, &p).unwrap();
    assert!(!start.feasible);
    let out = proposed(&net, &p).unwrap();
    assert_eq!(out.relaxed.status, OutcomeStatus::Infeasible);
    assert_eq!(out.rounded.status, OutcomeStatus::Infeasible);
    assert!(!out.rounded.is_feasible());
}

#[test]
fn runs_are_deterministic() {
    let p = params(5, 2, 2, 1e-8);
    let net = drop(&p, 3);
    let s1 = initialize(&net, &p).unwrap();
    let s2 = initialize(&net, &p).unwrap();
    assert_eq!(s1.state.iterate, s2.state.iterate);
    assert_eq!(s1.state.omega, s2.state.omega);
    let a = proposed(&net, &p).unwrap();
    let b = proposed(&net, &p).unwrap();
    assert_eq!(a.relaxed.history, b.relaxed.history);
    assert_eq!(a.rounded.allocation, b.rounded.allocation);
    assert_eq!(a.rounded.csv_row(), b.rounded.csv_row());
}

#[test]
fn already_binary_relaxation_rounds_to_itself() {
    let p = params(4, 2, 2, 1e-8);
    let net = drop(&p, 2);
    let a = brute_force_oracle(&net, &p).unwrap().allocation.a;
    let fixed = benchmark2_solve(&net, &p, &a).unwrap();
    assert!(fixed.is_feasible());
    let rounded = round_modes(&fixed, &net, &p).unwrap();
    assert_eq!(rounded.allocation.a, a);
    assert!(rounded.flips.is_empty());
    assert!((rounded.objective_sum_he - fixed.objective_sum_he).abs() <= 1e-6 * fixed.objective_sum_he);
}

#[test]
fn all_information_rounding_flips_an_ap_to_energy() {
    let p = params(4, 2, 2, 1e-8);
    let net = drop(&p, 2);
    let mut relaxed = brute_force_oracle(&net, &p).unwrap();
    assert!(relaxed.is_feasible());
    relaxed.relaxed_allocation = Allocation::uniform(&[0.9, 0.6, 0.8, 0.7], 2, 2);
    let rounded = round_modes(&relaxed, &net, &p).unwrap();
    assert!(!rounded.flips.is_empty());
    let first = rounded.flips[0];
    assert_eq!(first, 1, "AP closest to 1/2 flips first");
    assert_eq!(rounded.allocation.a[first], 0.0);
    assert!(rounded.allocation.a.contains(&0.0));
}

/// Two APs, one IU and one EU. AP 0 sits next to the EU and far from the IU,
/// AP 1 the other way round, so the only sensible assignment is AP 0 for
/// energy and AP 1 for information.
#[test]
fn oracle_matches_geography_on_two_aps() {
    let p = params(2, 1, 1, 1e-6);
    let net = drop_from_distances(&p, &[&[300.0], &[10.0]], &[&[10.0], &[300.0]]);
    let oracle = brute_force_oracle(&net, &p).unwrap();
    assert!(oracle.is_feasible());
    assert_eq!(oracle.allocation.a, vec![0.0, 1.0]);
    let swapped = benchmark2_solve(&net, &p, &[1.0, 0.0]).unwrap();
    assert!(!swapped.is_feasible() || swapped.objective_sum_he < oracle.objective_sum_he);
    let out = proposed(&net, &p).unwrap();
    assert_eq!(out.rounded.allocation.a, vec![0.0, 1.0]);
}

/// Exhaustive enumeration brackets the proposed scheme: the relaxation is an
/// upper bound and rounding never beats the best binary vector.
#[test]
fn relaxation_and_rounding_bracket_the_oracle() {
    let p = params(4, 2, 2, 1e-8).with_layout(4, 6);
    let mut compared = 0;
    for seed in 0..8 {
        let net = drop(&p, seed);
        let oracle = brute_force_oracle(&net, &p).unwrap();
        let out = proposed(&net, &p).unwrap();
        if !oracle.is_feasible() {
            assert!(!out.rounded.is_feasible(), "seed {seed}: rounding found a point the oracle missed");
            continue;
        }
        compared += 1;
        let tol = 1e-6 * oracle.objective_sum_he.max(1e-9);
        if out.relaxed.status.is_solved() {
            assert!(
                out.relaxed.objective_sum_he >= oracle.objective_sum_he - 1e-6,
                "seed {seed}: relaxed {} oracle {}",
                out.relaxed.objective_sum_he,
                oracle.objective_sum_he
            );
        }
        if out.rounded.is_feasible() {
            assert!(
                out.rounded.objective_sum_he <= oracle.objective_sum_he + tol,
                "seed {seed}: rounded {} oracle {}",
                out.rounded.objective_sum_he,
                oracle.objective_sum_he
            );
        }
    }
    assert!(compared >= 3, "only {compared} feasible drops");
}

#[test]
fn oracle_refuses_large_networks() {
    let p = params(ORACLE_MAX_APS + 1, 2, 2, 0.0);
    let net = drop(&p, 0);
    match brute_force_oracle(&net, &p) {
        Err(ScaError::TooManyAps { m, limit }) => {
            assert_eq!(m, ORACLE_MAX_APS + 1);
            assert_eq!(limit, ORACLE_MAX_APS);
        }
        other => panic!("expected refusal, got {:?}", other.map(|o| o.status)),
    }
}
