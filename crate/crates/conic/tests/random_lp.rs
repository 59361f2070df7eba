//! Random bounded LPs checked against brute-force vertex enumeration.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swipt_conic::{check_kkt, solve, Affine, ConicProgram, SolveStatus};

struct Lp {
    c: Vec<f64>,
    /// rows `g'x <= h`
    g: Vec<Vec<f64>>,
    h: Vec<f64>,
}

fn random_lp(seed: u64, n: usize, m: usize) -> Lp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for _ in 0..m {
        g.push((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        // the origin stays strictly feasible
        h.push(rng.random_range(0.5..2.0));
    }
    // box keeps the polytope bounded
    for j in 0..n {
        for s in [1.0, -1.0] {
            let mut row = vec![0.0; n];
            row[j] = s;
            g.push(row);
            h.push(3.0);
        }
    }
    Lp { c, g, h }
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if m < k {
        return vec![];
    }
    let mut out = combinations(m - 1, k);
    for mut c in combinations(m - 1, k - 1) {
        c.push(m - 1);
        out.push(c);
    }
    out
}

fn vertex_optimum(lp: &Lp) -> f64 {
    let n = lp.c.len();
    let mut best = f64::INFINITY;
    for active in combinations(lp.g.len(), n) {
        let a = DMatrix::from_fn(n, n, |i, j| lp.g[active[i]][j]);
        let b = DVector::from_fn(n, |i, _| lp.h[active[i]]);
        let Some(x) = a.lu().solve(&b) else { continue };
        let feasible = lp
            .g
            .iter()
            .zip(&lp.h)
            .all(|(row, h)| row.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() <= h + 1e-9);
        if feasible {
            best = best.min(lp.c.iter().zip(x.iter()).map(|(a, b)| a * b).sum());
        }
    }
    best
}

fn to_program(lp: &Lp) -> ConicProgram {
    let n = lp.c.len();
    let mut p = ConicProgram::new(n);
    for (j, &c) in lp.c.iter().enumerate() {
        p.set_cost(j, c);
    }
    for (row, &h) in lp.g.iter().zip(&lp.h) {
        let lhs = Affine::linear(row.iter().copied().enumerate().collect());
        p.add_le(lhs, Affine::constant(h));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_vertex_enumeration(seed in any::<u64>(), n in 1usize..=6, m in 0usize..=4) {
        let lp = random_lp(seed, n, m);
        let prog = to_program(&lp);
        let sol = solve(&prog, 1e-8, 200).unwrap();
        prop_assert_eq!(sol.status, SolveStatus::Optimal);
        let expected = vertex_optimum(&lp);
        prop_assert!((sol.objective_value - expected).abs() <= 1e-6, "{} vs {}", sol.objective_value, expected);
        prop_assert!(check_kkt(&prog, &sol).max() <= 1e-6);
    }
}

#[test]
fn perturbed_solution_fails_kkt() {
    let lp = random_lp(3, 3, 3);
    let prog = to_program(&lp);
    let sol = solve(&prog, 1e-8, 200).unwrap();
    assert!(check_kkt(&prog, &sol).max() <= 1e-8);
    let mut bad = sol.clone();
    bad.x.iter_mut().for_each(|v| *v *= 1.05);
    bad.x[0] += 0.5;
    assert!(check_kkt(&prog, &bad).max() > 1e-6);
    let mut bad = sol;
    bad.z.iter_mut().for_each(|v| *v += 0.1);
    assert!(check_kkt(&prog, &bad).max() > 1e-6);
}
