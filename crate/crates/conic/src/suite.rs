//! Small conic programs whose optimal values are known in closed form.

use std::f64::consts::{E, LN_2, SQRT_2};

use crate::program::{Affine, ConicProgram};

pub struct KnownProgram {
    pub name: &'static str,
    pub program: ConicProgram,
    pub optimum: f64,
}

fn known(name: &'static str, program: ConicProgram, optimum: f64) -> KnownProgram {
    KnownProgram { name, program, optimum }
}

fn minimize(n: usize, cost: &[(usize, f64)]) -> ConicProgram {
    let mut p = ConicProgram::new(n);
    for &(j, c) in cost {
        p.set_cost(j, c);
    }
    p
}

pub fn known_optimum_suite() -> Vec<KnownProgram> {
    let mut out = Vec::new();

    let mut p = minimize(1, &[(0, 1.0)]);
    p.add_nonneg(Affine::var(0).offset(-1.0));
    out.push(known("lp_single_bound", p, 1.0));

    // vertex (8/5, 6/5) of x + 2y <= 4, 3x + y <= 6
    let mut p = minimize(2, &[(0, -1.0), (1, -1.0)]);
    p.add_le(Affine::var(0).plus(1, 2.0), Affine::constant(4.0));
    p.add_le(Affine::term(0, 3.0).plus(1, 1.0), Affine::constant(6.0));
    p.add_nonneg(Affine::var(0));
    p.add_nonneg(Affine::var(1));
    out.push(known("lp_two_constraint_vertex", p, -14.0 / 5.0));

    let mut p = minimize(3, &[(0, 1.0), (1, 2.0), (2, 3.0)]);
    p.add_eq(Affine::var(0).plus(1, 1.0).plus(2, 1.0).offset(-1.0));
    (0..3).for_each(|j| p.add_nonneg(Affine::var(j)));
    out.push(known("lp_simplex_equality", p, 1.0));

    let mut p = minimize(2, &[(0, -1.0), (1, -1.0)]);
    p.set_bounds(0, 0.0, 2.0);
    p.set_bounds(1, -1.0, 3.0);
    out.push(known("lp_box_bounds", p, -5.0));

    let c = [2.0, -1.0, 0.5, -3.0];
    let mut p = minimize(4, &c.iter().copied().enumerate().collect::<Vec<_>>());
    (0..4).for_each(|j| p.set_bounds(j, -1.0, 2.0));
    let opt = c.iter().map(|&ci: &f64| (-ci).min(2.0 * ci)).sum();
    out.push(known("lp_box_mixed_signs", p, opt));

    let mut p = minimize(1, &[(0, 1.0)]);
    p.add_soc(vec![Affine::var(0), Affine::constant(3.0), Affine::constant(4.0)]);
    out.push(known("soc_norm_3_4", p, 5.0));

    // distance from (3, 4) to the line x1 + x2 = 1
    let mut p = minimize(3, &[(2, 1.0)]);
    p.add_eq(Affine::var(0).plus(1, 1.0).offset(-1.0));
    p.add_soc(vec![Affine::var(2), Affine::var(0).offset(-3.0), Affine::var(1).offset(-4.0)]);
    out.push(known("soc_point_to_line", p, 6.0 / SQRT_2));

    // min c'x over the unit ball, c = (1, 2, 2)
    let mut p = minimize(3, &[(0, 1.0), (1, 2.0), (2, 2.0)]);
    p.add_soc(vec![Affine::constant(1.0), Affine::var(0), Affine::var(1), Affine::var(2)]);
    out.push(known("soc_linear_over_ball", p, -3.0));

    // distance from (1, 1, 1) to the plane x1 + x2 + x3 = 0
    let mut p = minimize(4, &[(3, 1.0)]);
    p.add_eq(Affine::var(0).plus(1, 1.0).plus(2, 1.0));
    p.add_soc(vec![
        Affine::var(3),
        Affine::var(0).offset(-1.0),
        Affine::var(1).offset(-1.0),
        Affine::var(2).offset(-1.0),
    ]);
    out.push(known("soc_point_to_plane", p, 3f64.sqrt()));

    // max(sqrt 2, 1.5)
    let mut p = minimize(1, &[(0, 1.0)]);
    p.add_soc(vec![Affine::var(0), Affine::constant(1.0), Affine::constant(1.0)]);
    p.add_nonneg(Affine::var(0).offset(-1.5));
    out.push(known("soc_with_active_lp_bound", p, 1.5));

    // min ||(1e-6 x, 1e6 y)|| s.t. 1e-6 x + 1e6 y = 1: x = 5e5, y = 5e-7
    let mut p = minimize(3, &[(2, 1.0)]);
    p.add_eq(Affine::term(0, 1e-6).plus(1, 1e6).offset(-1.0));
    p.add_soc(vec![Affine::var(2), Affine::term(0, 1e-6), Affine::term(1, 1e6)]);
    out.push(known("soc_wide_dynamic_range", p, 1.0 / SQRT_2));

    let mut p = minimize(2, &[(0, 1.0), (1, 1.0)]);
    p.add_rsoc(vec![Affine::var(0), Affine::var(1), Affine::constant(1.0)]);
    out.push(known("rsoc_hyperbola", p, SQRT_2));

    // max t s.t. t <= sqrt(ab), a + b = 2
    let mut p = minimize(3, &[(2, -1.0)]);
    p.add_eq(Affine::var(0).plus(1, 1.0).offset(-2.0));
    p.add_rsoc(vec![Affine::var(0), Affine::var(1), Affine::term(2, SQRT_2)]);
    out.push(known("rsoc_geometric_mean", p, -1.0));

    // 2u >= ||(3, 4)||^2
    let mut p = minimize(1, &[(0, 1.0)]);
    p.add_rsoc(vec![Affine::var(0), Affine::constant(1.0), Affine::constant(3.0), Affine::constant(4.0)]);
    out.push(known("rsoc_squared_norm", p, 12.5));

    // min x^2 - 2x via t >= x^2
    let mut p = minimize(2, &[(0, 1.0), (1, -2.0)]);
    p.add_rsoc(vec![Affine::var(0), Affine::constant(0.5), Affine::var(1)]);
    out.push(known("rsoc_parabola", p, -1.0));

    let mut p = minimize(2, &[(0, 1.0), (1, 1.0)]);
    p.add_rsoc(vec![Affine::var(0), Affine::var(1), Affine::constant(8f64.sqrt())]);
    out.push(known("rsoc_product_bound", p, 4.0));

    let mut p = minimize(1, &[(0, 1.0)]);
    p.add_exp(Affine::constant(1.0), Affine::constant(1.0), Affine::var(0));
    out.push(known("exp_boundary_e", p, E));

    // max t s.t. t <= ln 2
    let mut p = minimize(1, &[(0, -1.0)]);
    p.add_exp(Affine::var(0), Affine::constant(1.0), Affine::constant(2.0));
    out.push(known("exp_log_two", p, -LN_2));

    // min e^x + e^-x
    let mut p = minimize(3, &[(1, 1.0), (2, 1.0)]);
    p.add_exp(Affine::var(0), Affine::constant(1.0), Affine::var(1));
    p.add_exp(Affine::term(0, -1.0), Affine::constant(1.0), Affine::var(2));
    out.push(known("exp_cosh", p, 2.0));

    // max sum ln x_i on the simplex
    let mut p = minimize(6, &[(3, -1.0), (4, -1.0), (5, -1.0)]);
    p.add_eq(Affine::var(0).plus(1, 1.0).plus(2, 1.0).offset(-1.0));
    for i in 0..3 {
        p.add_exp(Affine::var(3 + i), Affine::constant(1.0), Affine::var(i));
    }
    out.push(known("exp_log_barrier_simplex", p, 3.0 * 3f64.ln()));

    // min t s.t. e^(1-t) + e^(2-t) <= 1
    let mut p = minimize(3, &[(0, 1.0)]);
    p.add_exp(Affine::term(0, -1.0).offset(1.0), Affine::constant(1.0), Affine::var(1));
    p.add_exp(Affine::term(0, -1.0).offset(2.0), Affine::constant(1.0), Affine::var(2));
    p.add_le(Affine::var(1).plus(2, 1.0), Affine::constant(1.0));
    out.push(known("exp_log_sum_exp", p, (E + E * E).ln()));

    // max x s.t. ln(1 - x) >= -1
    let mut p = minimize(1, &[(0, -1.0)]);
    p.add_exp(Affine::constant(-1.0), Affine::constant(1.0), Affine::term(0, -1.0).offset(1.0));
    out.push(known("exp_log_of_gap", p, -(1.0 - 1.0 / E)));

    // min x - ln x
    let mut p = minimize(2, &[(0, 1.0), (1, -1.0)]);
    p.add_exp(Affine::var(1), Affine::constant(1.0), Affine::var(0));
    out.push(known("exp_x_minus_log", p, 1.0));

    // mixed: min t s.t. ||x|| <= t, x1 >= e^0.5
    let mut p = minimize(3, &[(2, 1.0)]);
    p.add_soc(vec![Affine::var(2), Affine::var(0), Affine::var(1)]);
    p.add_exp(Affine::constant(0.5), Affine::constant(1.0), Affine::var(0));
    out.push(known("mixed_soc_exp", p, 0.5f64.exp()));

    out
}
