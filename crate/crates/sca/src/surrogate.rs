//! Convex inner approximations of the energy and SE constraints around an
//! SCA iterate.
//!
//! Rows are divided by their own magnitude at the iterate, and each
//! `omega_l` is carried as `omega0_l + step_l * w_l` with `step_l` the
//! current harvested-power excess, so the program stays O(1) although
//! received energies are ~1e-5 watt-symbols and path gains span ten orders
//! of magnitude.
//!
//! Bilinear terms are split as differences of squares. The energy
//! constraint uses `a u = ((k a + u/k)^2 - (k a - u/k)^2) / 4` with a per
//! (AP, EU) balance factor `k`; the SE constraint uses
//! `a d = ((a + d)^2 - (a - d)^2) / 4` with `d = eta^I - eta^E`. In both the
//! square with the positive sign on the larger side of the inequality is
//! linearized from below and the other one goes into a rotated-cone
//! epigraph.

use std::f64::consts::SQRT_2;

use swipt_conic::{Affine, ConicProgram};
use swipt_core::{EhModel, NetworkRealization, SystemParams};

use crate::state::{clamp_omega, ScaState, OMEGA_MARGIN};

/// Relative tightening of the SINR threshold so that points returned within
/// solver tolerance still meet the SE target.
pub const SE_MARGIN: f64 = 1e-7;
/// Relative tightening of the harvested-power targets.
pub const HE_MARGIN: f64 = 1e-7;

const INF: f64 = f64::INFINITY;
/// Smallest curvature used in the exponential cone. `-ln(1 - m w) / m` grows
/// with `m`, so a larger value still bounds the log term from above with the
/// same value and slope at `w = 0`; below this the cone is nearly flat over
/// the range `w` moves in and the interior-point iterates stall.
pub const EXP_CURVATURE_FLOOR: f64 = 1e-2;
/// Largest `mu_c w` allowed.
const W_CONE_FRACTION: f64 = 0.9;

/// How AP modes enter the program.
#[derive(Debug, Clone, PartialEq)]
pub enum Modes {
    /// `a` is a variable in `[0, 1]`.
    Relaxed,
    /// `a` is fixed; `true` marks an information AP. Power variables of the
    /// opposite mode are absent from the program.
    Fixed(Vec<bool>),
}

/// Variable indices of one subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub a: Vec<Option<usize>>,
    pub eta_i: Vec<Vec<Option<usize>>>,
    pub eta_e: Vec<Vec<Option<usize>>>,
    /// `omega_l = omega0_l + omega_step_l * w_l`.
    pub w: Vec<usize>,
    pub omega0: Vec<f64>,
    pub omega_step: Vec<f64>,
    /// Number of leading variables that are decisions rather than
    /// epigraph or slack auxiliaries.
    pub n_decision: usize,
    pub slacks: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Subproblem {
    pub program: ConicProgram,
    pub layout: Layout,
    /// Normalized energy rows (`>= 0`), one per EU.
    pub energy_rows: Vec<Affine>,
    /// Normalized SE rows (`>= 0`), one per IU; empty when the SE target is 0.
    /// Before phase-1 slacks, `se_rows[k] * se_scale[k]` is the surrogate of
    /// `rho (N - K_d) q_k^2 / thr - (1 + rho * leakage_k)`.
    pub se_rows: Vec<Affine>,
    pub se_scale: Vec<f64>,
    /// The iterate with every auxiliary at its tight value.
    pub anchor: Vec<f64>,
}

impl Subproblem {
    /// Largest violation of any cone membership at `x`, in the program's
    /// own normalized units.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0f64;
        for block in &self.program.cones {
            let v: Vec<f64> = block.rows.iter().map(|r| r.eval(x)).collect();
            let viol = match block.kind {
                swipt_conic::ConeKind::Nonneg => v.iter().fold(0f64, |w, &r| w.max(-r)),
                swipt_conic::ConeKind::Soc => (v[1..].iter().map(|r| r * r).sum::<f64>().sqrt() - v[0]).max(0.0),
                swipt_conic::ConeKind::Rsoc => {
                    let sq: f64 = v[2..].iter().map(|r| r * r).sum();
                    (sq - 2.0 * v[0] * v[1]).max(-v[0]).max(-v[1]).max(0.0)
                }
                swipt_conic::ConeKind::Exp => (v[1] * (v[0] / v[1]).exp() - v[2]).max(-v[1]).max(0.0),
            };
            worst = worst.max(viol);
        }
        if let Some(b) = &self.program.var_bounds {
            for (j, &(lo, hi)) in b.iter().enumerate() {
                worst = worst.max(lo - x[j]).max(x[j] - hi);
            }
        }
        worst
    }

    /// Boxes every mode and power variable to within `radius` of the anchor.
    /// The anchor stays feasible, so the program does too.
    pub fn restrict_to_trust_region(&mut self, radius: f64) {
        let lay = &self.layout;
        let vars: Vec<usize> = lay
            .a
            .iter()
            .chain(lay.eta_i.iter().flatten())
            .chain(lay.eta_e.iter().flatten())
            .flatten()
            .copied()
            .collect();
        for j in vars {
            let (lo, hi) = self
                .program
                .var_bounds
                .as_ref()
                .map_or((f64::NEG_INFINITY, f64::INFINITY), |b| b[j]);
            let x = self.anchor[j];
            self.program.set_bounds(j, lo.max(x - radius), hi.min(x + radius));
        }
    }
}

struct Builder {
    prog: ConicProgram,
    anchor: Vec<f64>,
    slacks: Vec<usize>,
    phase1: bool,
}

impl Builder {
    fn new(phase1: bool) -> Self {
        Builder {
            prog: ConicProgram::new(0),
            anchor: Vec::new(),
            slacks: Vec::new(),
            phase1,
        }
    }

    fn var(&mut self, value: f64, lo: f64, hi: f64) -> usize {
        let j = self.prog.add_var();
        if lo.is_finite() || hi.is_finite() {
            self.prog.set_bounds(j, lo, hi);
        }
        self.anchor.push(value);
        j
    }

    /// `row >= 0`, relaxed in phase 1 by `weight * slack`.
    fn constrain(&mut self, mut row: Affine, weight: f64) -> Affine {
        if self.phase1 {
            let deficit = (-row.eval(&self.anchor)).max(0.0) / weight;
            let s = self.var(deficit, 0.0, INF);
            self.slacks.push(s);
            row = row.plus(s, weight);
        }
        self.prog.add_nonneg(row.clone());
        row
    }
}

fn acc(row: &mut Affine, other: &Affine, s: f64) {
    row.terms.extend(other.terms.iter().map(|&(j, c)| (j, s * c)));
    row.constant += s * other.constant;
}

fn sum_vars(vars: &[Option<usize>], coef: f64) -> Affine {
    Affine::linear(vars.iter().flatten().map(|&j| (j, coef)).collect())
}

/// Linearization data of one EU's energy constraint.
struct EnergyPoint {
    q0: f64,
    omega0: f64,
    /// `f(omega0)`; equals `q0` unless `omega0` was clamped.
    f0: f64,
    step: f64,
    /// `step / (phi - omega0)`, the curvature of the log term in `w`.
    mu: f64,
    /// Curvature used in the cone, at least `mu`.
    mu_c: f64,
    target: f64,
    phi0: f64,
}

fn energy_point(state: &ScaState, l: usize, target: f64, model: &EhModel) -> EnergyPoint {
    let q0 = state.q_energy[l];
    let omega0 = state.omega[l];
    let psi = swipt_core::metrics::logistic_psi(q0, model);
    let f0 = if clamp_omega(psi, model) == psi {
        q0
    } else {
        model.chi - ((model.phi - omega0) / omega0).ln() / model.xi
    };
    let excess = (1.0 - model.omega) * state.phi[l];
    let step = excess.max((1.0 - model.omega) * target * 1e-3).max(1e-12 * model.phi);
    let mu = step / (model.phi - omega0);
    EnergyPoint {
        q0,
        omega0,
        f0,
        step,
        mu,
        mu_c: mu.max(EXP_CURVATURE_FLOOR),
        target,
        phi0: state.phi[l],
    }
}

fn add_w(b: &mut Builder, pt: &EnergyPoint, model: &EhModel) -> usize {
    let eps = OMEGA_MARGIN * model.phi;
    // w >= -1 keeps Phi >= 0 when the step is the current excess, which
    // every real allocation satisfies; above, the cone needs w < 1 / mu_c
    let lo = ((eps - pt.omega0) / pt.step).max(-1.0);
    b.var(0.0, lo, W_CONE_FRACTION / pt.mu_c)
}

/// Adds `Q_surrogate / Q0 >= f~(omega) / Q0` and the harvested-power target.
/// `lin` must already be divided by `Q0`.
fn add_energy_constraint(b: &mut Builder, mut lin: Affine, w: usize, pt: &EnergyPoint, model: &EhModel) -> Affine {
    // f~(omega) = f0 + (mu r + lambda w) / xi with r >= -ln(1 - mu_c w) / mu_c
    // and mu_c >= mu, which bounds -ln(1 - mu w) / mu from above
    let (mu, mu_c) = (pt.mu, pt.mu_c);
    let r_max = -(1.0 - W_CONE_FRACTION).ln() / mu_c;
    let r = b.var(0.0, -INF, r_max);
    let lambda = pt.step / pt.omega0;
    b.prog.add_exp(
        Affine::term(r, -mu_c),
        Affine::constant(1.0),
        Affine::constant(1.0).plus(w, -mu_c),
    );
    let denom = model.xi * pt.q0;
    lin.constant -= pt.f0 / pt.q0;
    lin.terms.push((r, -mu / denom));
    lin.terms.push((w, -lambda / denom));
    b.prog.add_nonneg(lin.clone());

    if pt.target > 0.0 {
        let one_minus = 1.0 - model.omega;
        let w_target = one_minus * (pt.target * (1.0 + HE_MARGIN) - pt.phi0) / pt.step;
        let weight = one_minus * pt.target / pt.step;
        b.constrain(Affine::var(w).offset(-w_target), weight);
    }
    lin
}

/// Divides an SE row (already divided by `r0`) by its negative constant
/// when that exceeds one. Returns the row and its total divisor.
fn normalized(row: Affine, r0: f64) -> (Affine, f64) {
    let n0 = -row.constant;
    if n0 > 1.0 {
        (row.scaled(1.0 / n0), r0 * n0)
    } else {
        (row, r0)
    }
}

fn se_threshold(bits: f64) -> f64 {
    (bits.exp2() - 1.0) * (1.0 + SE_MARGIN)
}

fn finish(
    mut b: Builder,
    layout_parts: LayoutParts,
    energy_rows: Vec<Affine>,
    (se_rows, se_scale): (Vec<Affine>, Vec<f64>),
) -> Subproblem {
    if b.phase1 {
        for &s in &b.slacks {
            b.prog.set_cost(s, 1.0);
        }
    } else {
        let s_max = layout_parts.omega_step.iter().copied().fold(0.0, f64::max);
        for (&w, &s) in layout_parts.w.iter().zip(&layout_parts.omega_step) {
            b.prog.set_cost(w, -s / s_max);
        }
    }
    Subproblem {
        layout: Layout {
            a: layout_parts.a,
            eta_i: layout_parts.eta_i,
            eta_e: layout_parts.eta_e,
            w: layout_parts.w,
            omega0: layout_parts.omega0,
            omega_step: layout_parts.omega_step,
            n_decision: layout_parts.n_decision,
            slacks: b.slacks.clone(),
        },
        program: b.prog,
        energy_rows,
        se_rows,
        se_scale,
        anchor: b.anchor,
    }
}

struct LayoutParts {
    a: Vec<Option<usize>>,
    eta_i: Vec<Vec<Option<usize>>>,
    eta_e: Vec<Vec<Option<usize>>>,
    w: Vec<usize>,
    omega0: Vec<f64>,
    omega_step: Vec<f64>,
    n_decision: usize,
}

/// Relaxed joint subproblem: maximize `sum omega` over `(a, eta^I, eta^E, omega)`.
pub fn build_subproblem(state: &ScaState, net: &NetworkRealization, params: &SystemParams) -> Subproblem {
    build_program(state, net, params, &Modes::Relaxed, false)
}

/// Subproblem of the simultaneous-transmission scheme, either with relaxed
/// modes or with a fixed mode vector; `phase1` replaces the objective by
/// the sum of QoS slacks.
pub fn build_program(
    state: &ScaState,
    net: &NetworkRealization,
    params: &SystemParams,
    modes: &Modes,
    phase1: bool,
) -> Subproblem {
    let (m_aps, k_d, l_eu) = (net.num_aps(), net.num_ius(), net.num_eus());
    let model = EhModel::from_params(params);
    let rho = params.rho();
    let gain = (params.n - params.k_d + 1) as f64;
    let dof = (params.n - params.k_d) as f64;
    let it = &state.iterate;
    let info = |m: usize| match modes {
        Modes::Relaxed => None,
        Modes::Fixed(f) => Some(f[m]),
    };

    let mut b = Builder::new(phase1);
    let a: Vec<Option<usize>> = (0..m_aps)
        .map(|m| info(m).is_none().then(|| b.var(it.a[m], 0.0, 1.0)))
        .collect();
    let eta_i: Vec<Vec<Option<usize>>> = (0..m_aps)
        .map(|m| {
            (0..k_d)
                .map(|k| (info(m) != Some(false)).then(|| b.var(it.eta_i[(m, k)], 0.0, 1.0)))
                .collect()
        })
        .collect();
    let eta_e: Vec<Vec<Option<usize>>> = (0..m_aps)
        .map(|m| {
            (0..l_eu)
                .map(|l| (info(m) != Some(true)).then(|| b.var(it.eta_e[(m, l)], 0.0, 1.0)))
                .collect()
        })
        .collect();
    let points: Vec<EnergyPoint> = (0..l_eu)
        .map(|l| energy_point(state, l, params.he_targets[l], &model))
        .collect();
    let w: Vec<usize> = points.iter().map(|pt| add_w(&mut b, pt, &model)).collect();
    let n_decision = b.prog.n_vars;

    // per-AP power budgets
    for m in 0..m_aps {
        let pi = sum_vars(&eta_i[m], -1.0);
        let pe = sum_vars(&eta_e[m], -1.0);
        match (info(m), a[m]) {
            (None, Some(av)) => {
                b.prog.add_nonneg(pi.plus(av, 1.0));
                b.prog.add_nonneg(pe.plus(av, -1.0).offset(1.0));
            }
            (Some(true), _) if k_d > 0 => b.prog.add_nonneg(pi.offset(1.0)),
            (Some(false), _) if l_eu > 0 => b.prog.add_nonneg(pe.offset(1.0)),
            _ => {}
        }
    }

    let mut energy_rows = Vec::with_capacity(l_eu);
    let scale = params.energy_scale();
    for l in 0..l_eu {
        let pt = &points[l];
        let d = pt.q0 / scale;
        let c = rho / d;
        let mut lin = Affine::constant(1.0 / d);
        // eta^E terms of the (1 - a) part, and for fixed modes the whole expression
        for m in 0..m_aps {
            let beta = net.beta_eu[(m, l)];
            let g_own = gain * net.gamma_eu[(m, l)];
            let e_lin = energy_affine(&eta_e[m], l, c * g_own, c * beta);
            match info(m) {
                Some(true) => acc(&mut lin, &sum_vars(&eta_i[m], c * beta), 1.0),
                _ => acc(&mut lin, &e_lin, 1.0),
            }
        }
        if matches!(modes, Modes::Relaxed) {
            let mut y_rows = Vec::with_capacity(m_aps);
            let mut t0 = 0.0;
            let mut t_max = 0.0;
            for m in 0..m_aps {
                let beta = net.beta_eu[(m, l)];
                let g_own = gain * net.gamma_eu[(m, l)];
                let kappa = (c * beta.max(g_own)).sqrt();
                t_max += 4.0 * kappa * kappa;
                let av = a[m].expect("relaxed modes");
                // scaled expression holder U = c u
                let mut u = sum_vars(&eta_i[m], c * beta);
                acc(&mut u, &energy_affine(&eta_e[m], l, c * g_own, c * beta), -1.0);
                let u0 = c * state.u[(m, l)];
                let x0 = kappa * it.a[m] + u0 / kappa;
                let y0 = kappa * it.a[m] - u0 / kappa;
                let mut x = Affine::term(av, kappa);
                acc(&mut x, &u, 1.0 / kappa);
                acc(&mut lin, &x, 0.5 * x0);
                lin.constant -= 0.25 * x0 * x0;
                let mut y = Affine::term(av, kappa);
                acc(&mut y, &u, -1.0 / kappa);
                y_rows.push(y);
                t0 += y0 * y0;
            }
            // |y_m| <= 2 kappa_m on the power box
            let t = b.var(t0, 0.0, t_max);
            let mut cone = vec![Affine::var(t), Affine::constant(0.5)];
            cone.extend(y_rows);
            b.prog.add_rsoc(cone);
            lin.terms.push((t, -0.25));
        }
        energy_rows.push(add_energy_constraint(&mut b, lin, w[l], pt, &model));
    }

    let mut se_rows = Vec::new();
    let mut se_scale = Vec::new();
    if params.se_target > 0.0 {
        let thr = se_threshold(params.se_target / params.prelog());
        let amp = rho * dof / thr;
        for k in 0..k_d {
            let q0 = state.q[k];
            let nu: Vec<f64> = (0..m_aps)
                .map(|m| (net.beta_iu[(m, k)] - net.gamma_iu[(m, k)]).max(0.0))
                .collect();
            let (row, r0) = match modes {
                Modes::Relaxed => {
                    let z0 = &state.z;
                    let r0 = 1.0
                        + (0..m_aps)
                            .map(|m| {
                                let y0 = 2.0 * it.a[m] - z0[m];
                                rho * nu[m] * (0.25 * (z0[m] * z0[m] + y0 * y0) + it.energy_power(m))
                            })
                            .sum::<f64>();
                    let mut row = Affine::constant(-(amp * q0 * q0 + 1.0) / r0);
                    let mut z_rows = Vec::new();
                    let mut tau0 = 0.0;
                    let mut tau_max = 0.0;
                    for m in 0..m_aps {
                        let av = a[m].expect("relaxed modes");
                        let e = eta_i[m][k].expect("relaxed modes");
                        let gamma = net.gamma_iu[(m, k)];
                        if gamma > 0.0 {
                            let p = b.var((it.a[m] * it.eta_i[(m, k)]).max(0.0).sqrt(), -INF, INF);
                            b.prog
                                .add_rsoc(vec![Affine::var(av), Affine::var(e), Affine::term(p, SQRT_2)]);
                            row.terms.push((p, 2.0 * amp * q0 * gamma.sqrt() / r0));
                        }
                        let c = rho * nu[m] / (4.0 * r0);
                        if c > 0.0 {
                            let d = {
                                let mut d = sum_vars(&eta_i[m], 1.0);
                                acc(&mut d, &sum_vars(&eta_e[m], 1.0), -1.0);
                                d
                            };
                            let y0 = 2.0 * it.a[m] - z0[m];
                            let mut y = Affine::var(av);
                            acc(&mut y, &d, -1.0);
                            acc(&mut row, &y, 2.0 * c * y0);
                            row.constant -= c * y0 * y0;
                            let mut z = Affine::var(av);
                            acc(&mut z, &d, 1.0);
                            z_rows.push(z.scaled(c.sqrt()));
                            tau0 += c * z0[m] * z0[m];
                            tau_max += 4.0 * c;
                            acc(&mut row, &sum_vars(&eta_e[m], -4.0 * c), 1.0);
                        }
                    }
                    if !z_rows.is_empty() {
                        // |z_m| <= 2 on the power box
                        let tau = b.var(tau0, 0.0, tau_max);
                        let mut cone = vec![Affine::var(tau), Affine::constant(0.5)];
                        cone.extend(z_rows);
                        b.prog.add_rsoc(cone);
                        row.terms.push((tau, -1.0));
                    }
                    (row, r0)
                }
                Modes::Fixed(f) => {
                    let leak0: f64 = (0..m_aps)
                        .map(|m| {
                            let power = if f[m] { it.info_power(m) } else { it.energy_power(m) };
                            nu[m] * power
                        })
                        .sum();
                    let r0 = 1.0 + rho * leak0;
                    let mut row = Affine::constant(-(amp * q0 * q0 + 1.0) / r0);
                    for m in 0..m_aps {
                        let c = rho * nu[m] / r0;
                        if f[m] {
                            let e = eta_i[m][k].expect("information AP");
                            let gamma = net.gamma_iu[(m, k)];
                            if gamma > 0.0 {
                                let p = b.var(it.eta_i[(m, k)].max(0.0).sqrt(), -INF, INF);
                                b.prog
                                    .add_rsoc(vec![Affine::var(e), Affine::constant(0.5), Affine::var(p)]);
                                row.terms.push((p, 2.0 * amp * q0 * gamma.sqrt() / r0));
                            }
                            acc(&mut row, &sum_vars(&eta_i[m], -c), 1.0);
                        } else {
                            acc(&mut row, &sum_vars(&eta_e[m], -c), 1.0);
                        }
                    }
                    (row, r0)
                }
            };
            let (row, scale) = normalized(row, r0);
            se_rows.push(b.constrain(row, 1.0));
            se_scale.push(scale);
        }
    }

    let parts = LayoutParts {
        a,
        eta_i,
        eta_e,
        w,
        omega0: points.iter().map(|p| p.omega0).collect(),
        omega_step: points.iter().map(|p| p.step).collect(),
        n_decision,
    };
    finish(b, parts, energy_rows, (se_rows, se_scale))
}

/// `own * eta_ml + other * sum_{l' != l} eta_ml'` over the variables present.
fn energy_affine(eta_e_m: &[Option<usize>], l: usize, own: f64, other: f64) -> Affine {
    Affine::linear(
        eta_e_m
            .iter()
            .enumerate()
            .filter_map(|(j, v)| v.map(|v| (v, if j == l { own } else { other })))
            .collect(),
    )
}

/// Energy phase of the orthogonal scheme: all APs send unprojected MRT
/// beams for half of the downlink with per-AP budget `sum_l eta_ml <= 1`.
pub fn build_orthogonal_energy(
    state: &ScaState,
    net: &NetworkRealization,
    params: &SystemParams,
    phase1: bool,
) -> Subproblem {
    let (m_aps, l_eu) = (net.num_aps(), net.num_eus());
    let model = EhModel::from_params(params);
    let rho = params.rho();
    let gain = (params.n + 1) as f64;
    let it = &state.iterate;
    let mut b = Builder::new(phase1);
    let eta_e: Vec<Vec<Option<usize>>> = (0..m_aps)
        .map(|m| (0..l_eu).map(|l| Some(b.var(it.eta_e[(m, l)], 0.0, 1.0))).collect())
        .collect();
    let points: Vec<EnergyPoint> = (0..l_eu)
        .map(|l| energy_point(state, l, params.he_targets[l], &model))
        .collect();
    let w: Vec<usize> = points.iter().map(|pt| add_w(&mut b, pt, &model)).collect();
    let n_decision = b.prog.n_vars;
    if l_eu > 0 {
        for row in &eta_e {
            b.prog.add_nonneg(sum_vars(row, -1.0).offset(1.0));
        }
    }
    let scale = 0.5 * params.energy_scale();
    let mut energy_rows = Vec::new();
    for l in 0..l_eu {
        let pt = &points[l];
        let d = pt.q0 / scale;
        let c = rho / d;
        let mut lin = Affine::constant(1.0 / d);
        for m in 0..m_aps {
            let e = energy_affine(&eta_e[m], l, c * gain * net.gamma_eu[(m, l)], c * net.beta_eu[(m, l)]);
            acc(&mut lin, &e, 1.0);
        }
        energy_rows.push(add_energy_constraint(&mut b, lin, w[l], pt, &model));
    }
    let parts = LayoutParts {
        a: vec![None; m_aps],
        eta_i: vec![Vec::new(); m_aps],
        eta_e,
        w,
        omega0: points.iter().map(|p| p.omega0).collect(),
        omega_step: points.iter().map(|p| p.step).collect(),
        n_decision,
    };
    finish(b, parts, energy_rows, (Vec::new(), Vec::new()))
}

/// Information phase of the orthogonal scheme: all APs run PZF for half of
/// the downlink, so the SE target per unit pre-log doubles.
pub fn build_orthogonal_se(
    state: &ScaState,
    net: &NetworkRealization,
    params: &SystemParams,
    phase1: bool,
) -> Subproblem {
    let (m_aps, k_d) = (net.num_aps(), net.num_ius());
    let rho = params.rho();
    let dof = (params.n - params.k_d) as f64;
    let it = &state.iterate;
    let mut b = Builder::new(phase1);
    let eta_i: Vec<Vec<Option<usize>>> = (0..m_aps)
        .map(|m| (0..k_d).map(|k| Some(b.var(it.eta_i[(m, k)], 0.0, 1.0))).collect())
        .collect();
    let n_decision = b.prog.n_vars;
    if k_d > 0 {
        for row in &eta_i {
            b.prog.add_nonneg(sum_vars(row, -1.0).offset(1.0));
        }
    }
    let mut se_rows = Vec::new();
    let mut se_scale = Vec::new();
    if params.se_target > 0.0 {
        let thr = se_threshold(2.0 * params.se_target / params.prelog());
        let amp = rho * dof / thr;
        for k in 0..k_d {
            let q0: f64 = (0..m_aps)
                .map(|m| (it.eta_i[(m, k)] * net.gamma_iu[(m, k)]).max(0.0).sqrt())
                .sum();
            let nu = |m: usize| (net.beta_iu[(m, k)] - net.gamma_iu[(m, k)]).max(0.0);
            let r0 = 1.0 + rho * (0..m_aps).map(|m| nu(m) * it.info_power(m)).sum::<f64>();
            let mut row = Affine::constant(-(amp * q0 * q0 + 1.0) / r0);
            for m in 0..m_aps {
                let gamma = net.gamma_iu[(m, k)];
                let e = eta_i[m][k].expect("all APs carry information");
                if gamma > 0.0 {
                    let p = b.var(it.eta_i[(m, k)].max(0.0).sqrt(), -INF, INF);
                    b.prog
                        .add_rsoc(vec![Affine::var(e), Affine::constant(0.5), Affine::var(p)]);
                    row.terms.push((p, 2.0 * amp * q0 * gamma.sqrt() / r0));
                }
                acc(&mut row, &sum_vars(&eta_i[m], -rho * nu(m) / r0), 1.0);
            }
            let (row, scale) = normalized(row, r0);
            se_rows.push(b.constrain(row, 1.0));
            se_scale.push(scale);
        }
    }
    let parts = LayoutParts {
        a: vec![None; m_aps],
        eta_i,
        eta_e: vec![Vec::new(); m_aps],
        w: Vec::new(),
        omega0: Vec::new(),
        omega_step: Vec::new(),
        n_decision,
    };
    finish(b, parts, Vec::new(), (se_rows, se_scale))
}
