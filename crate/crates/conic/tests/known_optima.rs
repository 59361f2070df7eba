use std::time::Instant;

use swipt_conic::suite::known_optimum_suite;
use swipt_conic::{check_kkt, solve, SolveStatus};

#[test]
fn every_known_program_is_solved() {
    for k in known_optimum_suite() {
        let start = Instant::now();
        let sol = solve(&k.program, 1e-8, 200).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        assert_eq!(sol.status, SolveStatus::Optimal, "{}", k.name);
        let kkt = check_kkt(&k.program, &sol);
        assert!(kkt.max() <= 1e-6, "{}: {kkt:?}", k.name);
        let err = (sol.objective_value - k.optimum).abs() / (1.0 + k.optimum.abs());
        assert!(err <= 1e-6, "{}: got {} expected {}", k.name, sol.objective_value, k.optimum);
        assert!(elapsed <= 1.0, "{} took {elapsed}s", k.name);
    }
}

#[test]
fn reported_residuals_meet_tolerance() {
    for k in known_optimum_suite() {
        let sol = solve(&k.program, 1e-8, 200).unwrap();
        let worst = sol.primal_residual.max(sol.dual_residual).max(sol.duality_gap);
        assert!(worst <= 1e-8, "{}: {worst}", k.name);
    }
}

#[test]
fn weak_duality_holds() {
    for k in known_optimum_suite() {
        let sol = solve(&k.program, 1e-8, 200).unwrap();
        let slack = 1e-6 * (1.0 + sol.objective_value.abs());
        assert!(sol.objective_value >= sol.dual_objective_value - slack, "{}", k.name);
    }
}

#[test]
fn solves_are_deterministic() {
    for k in known_optimum_suite() {
        let a = solve(&k.program, 1e-8, 200).unwrap();
        let b = solve(&k.program, 1e-8, 200).unwrap();
        assert_eq!(a.x, b.x, "{}", k.name);
        assert_eq!(a.iterations, b.iterations, "{}", k.name);
    }
}

#[test]
fn objective_scaling_keeps_argmin() {
    for k in known_optimum_suite() {
        let base = solve(&k.program, 1e-9, 200).unwrap();
        for s in [0.01, 7.0, 1e3] {
            let mut scaled = k.program.clone();
            scaled.objective.iter_mut().for_each(|c| *c *= s);
            let sol = solve(&scaled, 1e-9, 200).unwrap();
            let dx = sol.x.iter().zip(&base.x).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())).fold(0.0, f64::max);
            assert!(dx <= 1e-6, "{} scale {s}: {dx}", k.name);
        }
    }
}
