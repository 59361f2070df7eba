//! Interior-point solve through the Clarabel backend.
//!
//! Equalities map to the zero cone; every cone row `s = G x + h` is passed as
//! `-G x + s = h`. Rotated cones are lowered to standard second-order cones
//! through `(u, v, x) -> (u + v, u - v, sqrt(2) x)`, and the duals are mapped
//! back with the transpose so that [`ConicSolution::z`] lives in the program's
//! own coordinates. Before the solve the objective is normalized and the
//! variables and cone blocks are equilibrated (Ruiz passes on the constraint
//! matrix augmented with the constants and the objective); the reported
//! residuals refer to the equilibrated program.

use std::time::Instant;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use serde::{Deserialize, Serialize};

use crate::error::{ConicError, Result};
use crate::program::{Affine, ConeKind, ConicProgram};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    Numerical,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConicSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    /// Multipliers of the equality rows.
    pub y: Vec<f64>,
    /// Multipliers of the cone rows in block order, followed by the lower
    /// and upper bound rows produced by [`bound_rows`].
    pub z: Vec<f64>,
    pub objective_value: f64,
    pub dual_objective_value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub duality_gap: f64,
    pub iterations: u32,
    pub solve_time: f64,
}

impl ConicSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: u32,
    pub time_limit: f64,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            time_limit: f64::INFINITY,
            verbose: false,
        }
    }
}

/// Finite variable bounds as nonnegative rows: all lower rows first
/// (`x_j - lo >= 0`), then all upper rows (`hi - x_j >= 0`).
pub fn bound_rows(prog: &ConicProgram) -> Vec<Affine> {
    let Some(bounds) = &prog.var_bounds else {
        return Vec::new();
    };
    let lower = bounds
        .iter()
        .enumerate()
        .filter(|(_, b)| b.0.is_finite())
        .map(|(j, b)| Affine::var(j).offset(-b.0));
    let upper = bounds
        .iter()
        .enumerate()
        .filter(|(_, b)| b.1.is_finite())
        .map(|(j, b)| Affine::term(j, -1.0).offset(b.1));
    lower.chain(upper).collect()
}

struct Triplets {
    i: Vec<usize>,
    j: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
}

impl Triplets {
    fn push_row(&mut self, row: &Affine, sign: f64) {
        let r = self.b.len();
        for &(j, c) in &row.terms {
            if c != 0.0 {
                self.i.push(r);
                self.j.push(j);
                self.v.push(sign * c);
            }
        }
        self.b.push(-sign * row.constant);
    }
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn lower_rsoc(rows: &[Affine]) -> Vec<Affine> {
    let sum = |a: &Affine, b: &Affine, s: f64| {
        let mut out = a.clone();
        out.terms.extend(b.terms.iter().map(|&(j, c)| (j, s * c)));
        out.constant += s * b.constant;
        out
    };
    let mut out = vec![sum(&rows[0], &rows[1], 1.0), sum(&rows[0], &rows[1], -1.0)];
    out.extend(rows[2..].iter().map(|r| r.clone().scaled(SQRT2)));
    out
}

pub fn solve(prog: &ConicProgram, tol: f64, max_iter: u32) -> Result<ConicSolution> {
    solve_with(
        prog,
        &SolveOptions {
            tol,
            max_iter,
            ..Default::default()
        },
    )
}

/// One lowered constraint row, tagged with the cone block it belongs to.
/// Rows of the same block share a scale factor so that cone membership is
/// preserved; nonnegative rows each form their own block.
struct Row {
    row: Affine,
    block: usize,
}

/// Geometric equilibration factors: variable scales `d`, block scales `e`,
/// and the objective scale `sigma`, so that the solver sees
/// `min sigma (D c)'x'` subject to `E (G D x' + h)`.
struct Scaling {
    d: Vec<f64>,
    e: Vec<f64>,
    sigma: f64,
}

const GEOMETRIC_PASSES: usize = 8;
const RUIZ_PASSES: usize = 25;
const SCALE_LIMIT: f64 = 1e12;

/// Magnitude ranges `(min, max)` of the nonzeros of every column and block
/// under the current scaling; the objective counts toward columns and the
/// constants toward blocks.
fn ranges(objective: &[f64], rows: &[Row], s: &Scaling) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let empty = (f64::INFINITY, 0.0f64);
    let mut col = vec![empty; s.d.len()];
    let mut blk = vec![empty; s.e.len()];
    let widen = |r: &mut (f64, f64), a: f64| {
        if a > 0.0 {
            r.0 = r.0.min(a);
            r.1 = r.1.max(a);
        }
    };
    for (j, c) in objective.iter().enumerate() {
        widen(&mut col[j], (s.sigma * c * s.d[j]).abs());
    }
    for r in rows {
        let eb = s.e[r.block];
        widen(&mut blk[r.block], (eb * r.row.constant).abs());
        for &(j, v) in &r.row.terms {
            let a = (eb * v * s.d[j]).abs();
            widen(&mut col[j], a);
            widen(&mut blk[r.block], a);
        }
    }
    (col, blk)
}

fn rescale(factors: &mut [f64], ranges: &[(f64, f64)], target: impl Fn((f64, f64)) -> f64) -> bool {
    let mut done = true;
    for (f, r) in factors.iter_mut().zip(ranges) {
        if r.1 > 0.0 {
            let t = target(*r);
            *f = (*f / t.sqrt()).clamp(1.0 / SCALE_LIMIT, SCALE_LIMIT);
            done &= (t - 1.0).abs() < 1e-3;
        }
    }
    done
}

/// Geometric-mean passes bring each column and block range around 1, then
/// max-norm (Ruiz) passes bound every entry by 1.
fn equilibrate(n: usize, objective: &[f64], rows: &[Row], n_blocks: usize) -> Scaling {
    // the objective enters the column ranges only through its direction, so
    // a positive multiple of the objective yields the same scaling
    let c_max = objective.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut s = Scaling {
        d: vec![1.0; n],
        e: vec![1.0; n_blocks],
        sigma: if c_max > 0.0 { 1.0 / c_max } else { 1.0 },
    };
    for _ in 0..GEOMETRIC_PASSES {
        let (col, _) = ranges(objective, rows, &s);
        rescale(&mut s.d, &col, |(lo, hi)| lo * hi);
        let (_, blk) = ranges(objective, rows, &s);
        rescale(&mut s.e, &blk, |(lo, hi)| lo * hi);
    }
    // unit objective in the equilibrated variables
    let c_max = objective.iter().zip(&s.d).map(|(c, d)| (c * d).abs()).fold(0.0, f64::max);
    if c_max > 0.0 {
        s.sigma = 1.0 / c_max;
    }
    for _ in 0..RUIZ_PASSES {
        let (col, _) = ranges(objective, rows, &s);
        let mut done = rescale(&mut s.d, &col, |(_, hi)| hi);
        let (_, blk) = ranges(objective, rows, &s);
        done &= rescale(&mut s.e, &blk, |(_, hi)| hi);
        if done {
            break;
        }
    }
    s
}

pub fn solve_with(prog: &ConicProgram, opts: &SolveOptions) -> Result<ConicSolution> {
    prog.validate()?;
    let start = Instant::now();

    // lower everything to (rows, clarabel cones); equalities come first
    let mut rows: Vec<Row> = Vec::new();
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    let mut n_blocks = 0;
    let mut push_block = |rows: &mut Vec<Row>, block_rows: Vec<Affine>| {
        for row in block_rows {
            rows.push(Row { row, block: n_blocks });
        }
        n_blocks += 1;
    };
    for row in &prog.equalities {
        push_block(&mut rows, vec![row.clone()]);
    }
    if !prog.equalities.is_empty() {
        cones.push(SupportedConeT::ZeroConeT(prog.equalities.len()));
    }
    for block in &prog.cones {
        let d = block.rows.len();
        match block.kind {
            ConeKind::Nonneg => {
                block.rows.iter().for_each(|r| push_block(&mut rows, vec![r.clone()]));
                cones.push(SupportedConeT::NonnegativeConeT(d));
            }
            ConeKind::Soc => {
                push_block(&mut rows, block.rows.clone());
                cones.push(SupportedConeT::SecondOrderConeT(d));
            }
            ConeKind::Rsoc => {
                push_block(&mut rows, lower_rsoc(&block.rows));
                cones.push(SupportedConeT::SecondOrderConeT(d));
            }
            ConeKind::Exp => {
                push_block(&mut rows, block.rows.clone());
                cones.push(SupportedConeT::ExponentialConeT());
            }
        }
    }
    let bounds = bound_rows(prog);
    if !bounds.is_empty() {
        cones.push(SupportedConeT::NonnegativeConeT(bounds.len()));
    }
    bounds.into_iter().for_each(|r| push_block(&mut rows, vec![r]));

    let n = prog.n_vars;
    let n_eq = prog.equalities.len();
    let scale = equilibrate(n, &prog.objective, &rows, n_blocks);

    let mut trip = Triplets {
        i: Vec::new(),
        j: Vec::new(),
        v: Vec::new(),
        b: Vec::new(),
    };
    for (idx, r) in rows.iter().enumerate() {
        let eb = scale.e[r.block];
        let scaled = Affine {
            terms: r.row.terms.iter().map(|&(j, v)| (j, eb * v * scale.d[j])).collect(),
            constant: eb * r.row.constant,
        };
        // equality rows: a'x = -c; cone rows: -g'x + s = h
        trip.push_row(&scaled, if idx < n_eq { 1.0 } else { -1.0 });
    }
    let q: Vec<f64> = prog
        .objective
        .iter()
        .zip(&scale.d)
        .map(|(c, d)| scale.sigma * c * d)
        .collect();

    let m = trip.b.len();
    let a = CscMatrix::new_from_triplets(m, n, trip.i, trip.j, trip.v);
    let p = CscMatrix::zeros((n, n));
    let settings = DefaultSettingsBuilder::default()
        .tol_gap_abs(opts.tol)
        .tol_gap_rel(opts.tol)
        .tol_feas(opts.tol)
        .tol_ktratio(opts.tol.max(1e-10).min(1e-6))
        .max_iter(opts.max_iter)
        .time_limit(opts.time_limit)
        .verbose(opts.verbose)
        .max_threads(1)
        .build()
        .map_err(|e| ConicError::Backend(e.to_string()))?;
    let mut solver = DefaultSolver::new(&p, &q, &a, &trip.b, &cones, settings)
        .map_err(|e| ConicError::Backend(format!("{e:?}")))?;
    solver.solve();

    let sol = &solver.solution;
    let info = &solver.info;
    let status = match sol.status {
        SolverStatus::Solved => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::PrimalInfeasible,
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::DualInfeasible,
        SolverStatus::MaxIterations | SolverStatus::MaxTime => SolveStatus::MaxIter,
        _ => SolveStatus::Numerical,
    };

    let x: Vec<f64> = sol.x.iter().zip(&scale.d).map(|(x, d)| x * d).collect();
    // z = E z' / sigma row by row, then rotated blocks mapped back by T'
    let unscaled: Vec<f64> = sol
        .z
        .iter()
        .zip(&rows)
        .map(|(z, r)| z * scale.e[r.block] / scale.sigma)
        .collect();
    let y = unscaled[..n_eq].to_vec();
    let mut z = Vec::with_capacity(m - n_eq);
    let mut offset = n_eq;
    for block in &prog.cones {
        let d = block.rows.len();
        let zb = &unscaled[offset..offset + d];
        if block.kind == ConeKind::Rsoc {
            z.push(zb[0] + zb[1]);
            z.push(zb[0] - zb[1]);
            z.extend(zb[2..].iter().map(|v| SQRT2 * v));
        } else {
            z.extend_from_slice(zb);
        }
        offset += d;
    }
    z.extend_from_slice(&unscaled[offset..]);

    Ok(ConicSolution {
        status,
        objective_value: prog.objective_value(&x),
        dual_objective_value: sol.obj_val_dual / scale.sigma,
        x,
        y,
        z,
        primal_residual: info.res_primal,
        dual_residual: info.res_dual,
        duality_gap: info.gap_abs.min(info.gap_rel),
        iterations: sol.iterations,
        solve_time: start.elapsed().as_secs_f64(),
    })
}
