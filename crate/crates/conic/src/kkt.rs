//! KKT residuals recomputed from the program data and a candidate
//! primal-dual point, without any solver-internal state.
//!
//! With cone rows `s = G x + h` and equality rows `A x + b = 0`, the
//! Lagrangian `c'x + y'(A x + b) - z'(G x + h)` gives stationarity
//! `c + A'y - G'z = 0`, `z` in the dual cone, and complementarity `z's = 0`.

use serde::Serialize;

use crate::program::{Affine, ConeKind, ConicProgram};
use crate::solver::{bound_rows, ConicSolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktResiduals {
    /// Equality residual and cone infeasibility of `s`, scaled by `1 + ||h||`.
    pub primal: f64,
    /// Stationarity residual and dual-cone infeasibility of `z`, scaled by `1 + ||c||`.
    pub dual: f64,
    /// `|z's|` scaled by `1 + |c'x|`.
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.complementarity)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn soc_violation(v: &[f64]) -> f64 {
    (norm2(&v[1..]) - v[0]).max(0.0)
}

fn rsoc_violation(v: &[f64]) -> f64 {
    let (u, w) = (v[0], v[1]);
    let mut t = vec![(u + w) / std::f64::consts::SQRT_2, (u - w) / std::f64::consts::SQRT_2];
    t.extend_from_slice(&v[2..]);
    soc_violation(&t)
}

/// Distance-like violation of `(x, y, z)` from the exponential cone.
pub fn exp_violation(v: &[f64]) -> f64 {
    let (x, y, z) = (v[0], v[1], v[2]);
    if y > 0.0 && z > 0.0 {
        // y exp(x / y) <= z  <=>  x <= y ln(z / y)
        return (x - y * (z / y).ln()).max(0.0);
    }
    // closure part: y = 0, x <= 0, z >= 0
    let mut viol = (-y).max(0.0).max((-z).max(0.0));
    if y <= 0.0 {
        viol = viol.max(x.max(0.0));
    } else {
        // z <= 0 < y: need z >= y exp(x / y) > 0
        viol = viol.max(y * (x / y).min(700.0).exp() - z);
    }
    viol
}

/// Violation of `(u, v, w)` from the dual exponential cone
/// `{u < 0, -u exp(v / u) <= e w} U {u = 0, v >= 0, w >= 0}`.
pub fn exp_dual_violation(d: &[f64]) -> f64 {
    let (u, v, w) = (d[0], d[1], d[2]);
    if u < 0.0 && w > 0.0 {
        // ln(-u) + v / u <= 1 + ln w  <=>  v >= u (1 + ln(w / -u))
        return (u * (1.0 + (w / -u).ln()) - v).max(0.0);
    }
    u.max(0.0).max((-v).max(0.0)).max((-w).max(0.0))
}

fn cone_violation(kind: ConeKind, s: &[f64]) -> f64 {
    match kind {
        ConeKind::Nonneg => s.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max),
        ConeKind::Soc => soc_violation(s),
        ConeKind::Rsoc => rsoc_violation(s),
        ConeKind::Exp => exp_violation(s),
    }
}

fn dual_cone_violation(kind: ConeKind, z: &[f64]) -> f64 {
    match kind {
        ConeKind::Exp => exp_dual_violation(z),
        // the nonnegative orthant and both quadratic cones are self-dual
        other => cone_violation(other, z),
    }
}

/// All cone rows in solution order, grouped into blocks.
fn blocks(prog: &ConicProgram) -> Vec<(ConeKind, Vec<Affine>)> {
    let mut out: Vec<_> = prog.cones.iter().map(|c| (c.kind, c.rows.clone())).collect();
    let bounds = bound_rows(prog);
    if !bounds.is_empty() {
        out.push((ConeKind::Nonneg, bounds));
    }
    out
}

/// Residuals of an arbitrary primal-dual triple `(x, y, z)`.
pub fn kkt_residuals(prog: &ConicProgram, x: &[f64], y: &[f64], z: &[f64]) -> KktResiduals {
    let blocks = blocks(prog);
    let n_rows: usize = blocks.iter().map(|b| b.1.len()).sum();
    assert_eq!(x.len(), prog.n_vars, "x has the wrong length");
    assert_eq!(y.len(), prog.equalities.len(), "y has the wrong length");
    assert_eq!(z.len(), n_rows, "z has the wrong length");

    let h_scale = 1.0
        + prog
            .equalities
            .iter()
            .chain(blocks.iter().flat_map(|b| b.1.iter()))
            .map(|r| r.constant.abs())
            .fold(0.0, f64::max);
    let c_scale = 1.0 + prog.objective.iter().map(|c| c.abs()).fold(0.0, f64::max);

    let mut primal = prog.equalities.iter().map(|r| r.eval(x).abs()).fold(0.0, f64::max);
    let mut dual_cone = 0.0f64;
    let mut comp = 0.0;
    let mut grad = prog.objective.clone();
    for (row, &yi) in prog.equalities.iter().zip(y) {
        for &(j, c) in &row.terms {
            grad[j] += c * yi;
        }
    }
    let mut offset = 0;
    for (kind, rows) in &blocks {
        let s: Vec<f64> = rows.iter().map(|r| r.eval(x)).collect();
        let zb = &z[offset..offset + rows.len()];
        primal = primal.max(cone_violation(*kind, &s));
        dual_cone = dual_cone.max(dual_cone_violation(*kind, zb));
        comp += s.iter().zip(zb).map(|(a, b)| a * b).sum::<f64>();
        for (row, &zi) in rows.iter().zip(zb) {
            for &(j, c) in &row.terms {
                grad[j] -= c * zi;
            }
        }
        offset += rows.len();
    }
    let z_scale = 1.0 + z.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let stationarity = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
    KktResiduals {
        primal: primal / h_scale,
        dual: (stationarity / c_scale).max(dual_cone / z_scale),
        complementarity: comp.abs() / (1.0 + prog.objective_value(x).abs()),
    }
}

pub fn check_kkt(prog: &ConicProgram, sol: &ConicSolution) -> KktResiduals {
    kkt_residuals(prog, &sol.x, &sol.y, &sol.z)
}
