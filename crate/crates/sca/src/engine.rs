//! Generic SCA driver shared by the proposed scheme and the benchmarks.

use nalgebra::DMatrix;
use swipt_conic::{solve, SolveStatus};
use swipt_core::metrics::{benchmark3_q, benchmark3_se, evaluate, MetricsReport};
use swipt_core::{Allocation, NetworkRealization, SystemParams};

use crate::error::Result;
use crate::outcome::OutcomeStatus;
use crate::state::ScaState;
use crate::surrogate::{build_orthogonal_energy, build_orthogonal_se, build_program, Modes, Subproblem};

pub const MAX_ITERATIONS: usize = 100;
const SOLVER_TOL: f64 = 1e-8;
const RETRY_TOL: f64 = 1e-6;
const SOLVER_MAX_ITER: u32 = 200;
/// After an unusable solve the retry keeps modes and powers this close to
/// the current iterate.
const TRUST_RADIUS: f64 = 0.05;
/// Phase 1 gives up after this many iterations without a 1e-4 relative
/// reduction of the QoS shortfall.
const PHASE1_STALLS: usize = 5;
/// Iterates may miss the QoS targets by this much and still be accepted
/// (an order of magnitude inside the reporting tolerances).
const ACCEPT_SE_TOL: f64 = 1e-7;
const ACCEPT_HE_TOL: f64 = 1e-10;

/// QoS standing of an allocation.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub report: MetricsReport,
    /// `sum_k max(0, S - SE_k)` in bit/s/Hz.
    pub se_shortfall: f64,
    /// `sum_l max(0, 1 - Phi_l / Gamma_l)`.
    pub he_shortfall: f64,
    pub within_tolerance: bool,
}

impl Assessment {
    fn new(report: MetricsReport, params: &SystemParams, check_se: bool, check_he: bool) -> Self {
        let mut se_shortfall = 0.0;
        let mut he_shortfall = 0.0;
        let mut ok = true;
        if check_se {
            for &s in &report.se_per_iu {
                se_shortfall += (params.se_target - s).max(0.0);
                ok &= s >= params.se_target - ACCEPT_SE_TOL;
            }
        }
        if check_he {
            for (&p, &g) in report.phi_per_eu.iter().zip(&params.he_targets) {
                if g > 0.0 {
                    he_shortfall += (1.0 - p / g).max(0.0);
                }
                ok &= p >= g - ACCEPT_HE_TOL;
            }
        }
        Assessment {
            report,
            se_shortfall,
            he_shortfall,
            within_tolerance: ok,
        }
    }

    pub fn shortfall(&self) -> f64 {
        self.se_shortfall + self.he_shortfall
    }

    pub fn sum_phi(&self) -> f64 {
        self.report.sum_phi()
    }
}

/// One family of subproblems.
pub(crate) trait Model {
    fn state(&self, alloc: Allocation, iteration: usize) -> ScaState;
    fn build(&self, state: &ScaState, phase1: bool) -> Subproblem;
    fn extract(&self, sub: &Subproblem, x: &[f64]) -> Allocation;
    fn assess(&self, alloc: &Allocation) -> Result<Assessment>;
    /// False for pure feasibility problems.
    fn has_objective(&self) -> bool;
}

pub(crate) struct Run {
    pub state: ScaState,
    pub assessment: Assessment,
    /// Sum harvested power (W) after every accepted iterate, starting with the
    /// feasible start.
    pub history: Vec<f64>,
    pub status: OutcomeStatus,
    pub iterations: usize,
    pub phase1_iterations: usize,
    pub log: Vec<String>,
}

fn finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

pub(crate) struct PhaseOne {
    pub state: ScaState,
    pub assessment: Assessment,
    pub iterations: usize,
    pub feasible: bool,
    pub log: Vec<String>,
}

/// Drives the QoS shortfall of `start` to zero by minimizing slacks on the
/// SE and harvested-power constraints. A start that already meets every
/// target is returned untouched.
pub(crate) fn phase_one(model: &dyn Model, start: Allocation) -> Result<PhaseOne> {
    let mut log = Vec::new();
    let mut state = model.state(start, 0);
    let mut assessment = model.assess(&state.iterate)?;
    let mut iterations = 0;
    if assessment.shortfall() == 0.0 {
        return Ok(PhaseOne {
            state,
            assessment,
            iterations,
            feasible: true,
            log,
        });
    }
    let mut stalls = 0;
    let mut best = assessment.shortfall();
    let feasible = loop {
        if iterations == MAX_ITERATIONS || stalls >= PHASE1_STALLS {
            break false;
        }
        iterations += 1;
        let sub = model.build(&state, true);
        let sol = solve(&sub.program, SOLVER_TOL, SOLVER_MAX_ITER)?;
        if matches!(sol.status, SolveStatus::PrimalInfeasible) || !finite(&sol.x) {
            log.push(format!("phase1 {iterations}: solver {:?}", sol.status));
            break false;
        }
        let cand = model.extract(&sub, &sol.x);
        let cand_assessment = model.assess(&cand)?;
        let v = cand_assessment.shortfall();
        log.push(format!(
            "phase1 {iterations}: slack {:.6e} shortfall {v:.6e} solver {:?}",
            sol.objective_value, sol.status
        ));
        if v < best * (1.0 - 1e-4) {
            stalls = 0;
        } else {
            stalls += 1;
        }
        best = best.min(v);
        state = model.state(cand, 0);
        assessment = cand_assessment;
        if v == 0.0 {
            break true;
        }
    };
    if !feasible {
        log.push(format!("phase1 failed: shortfall {:.6e}", assessment.shortfall()));
    }
    Ok(PhaseOne {
        state,
        assessment,
        iterations,
        feasible,
        log,
    })
}

/// Phase 1 then the main SCA loop.
pub(crate) fn run(model: &dyn Model, start: Allocation, sca_tol: f64) -> Result<Run> {
    let p1 = phase_one(model, start)?;
    let mut log = p1.log;
    let phase1_iterations = p1.iterations;
    let mut state = p1.state;
    let mut assessment = p1.assessment;
    if !p1.feasible {
        return Ok(Run {
            state,
            assessment,
            history: Vec::new(),
            status: OutcomeStatus::Infeasible,
            iterations: 0,
            phase1_iterations,
            log,
        });
    }

    let mut history = vec![assessment.sum_phi()];
    let mut status = OutcomeStatus::MaxIter;
    let mut iterations = 0;
    let mut failures = 0;
    if !model.has_objective() {
        status = OutcomeStatus::Converged;
    }
    while status == OutcomeStatus::MaxIter && iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut sub = model.build(&state, false);
        let tol = if failures == 0 { SOLVER_TOL } else { RETRY_TOL };
        if failures > 0 {
            sub.restrict_to_trust_region(TRUST_RADIUS);
        }
        let sol = solve(&sub.program, tol, SOLVER_MAX_ITER)?;
        // an inexact solve is still usable when its point meets the exact
        // constraints and does not lose objective
        let old = *history.last().expect("history starts non-empty");
        let mut detail = String::new();
        let candidate = if finite(&sol.x) && !matches!(sol.status, SolveStatus::PrimalInfeasible) {
            let cand = model.extract(&sub, &sol.x);
            let a = model.assess(&cand)?;
            let usable = a.within_tolerance && (sol.status == SolveStatus::Optimal || a.sum_phi() >= old);
            detail = format!(
                ", qos {} sum_phi {:.6e}, res {:.2e}/{:.2e} gap {:.2e}",
                if a.within_tolerance { "met" } else { "missed" },
                a.sum_phi(),
                sol.primal_residual,
                sol.dual_residual,
                sol.duality_gap
            );
            usable.then_some((cand, a))
        } else {
            None
        };
        let Some((cand, cand_assessment)) = candidate else {
            failures += 1;
            log.push(format!("iter {iterations}: unusable solve ({:?}{detail})", sol.status));
            if failures >= 2 {
                status = OutcomeStatus::Numerical;
            }
            continue;
        };
        failures = 0;
        let new = cand_assessment.sum_phi();
        log.push(format!(
            "iter {iterations}: sum_phi {new:.12e} W solver {:?} res {:.2e}/{:.2e} gap {:.2e}",
            sol.status, sol.primal_residual, sol.dual_residual, sol.duality_gap
        ));
        if new < old {
            log.push(format!("iter {iterations}: objective fell by {:.3e}; keeping previous iterate", old - new));
            status = OutcomeStatus::Converged;
            break;
        }
        state = model.state(cand, iterations);
        assessment = cand_assessment;
        history.push(new);
        if new - old <= sca_tol * old.abs() {
            status = OutcomeStatus::Converged;
        }
    }

    Ok(Run {
        state,
        assessment,
        history,
        status,
        iterations,
        phase1_iterations,
        log,
    })
}

/// Simultaneous transmission with relaxed or fixed modes.
pub(crate) struct JointModel<'a> {
    pub net: &'a NetworkRealization,
    pub params: &'a SystemParams,
    pub modes: Modes,
}

impl Model for JointModel<'_> {
    fn state(&self, alloc: Allocation, iteration: usize) -> ScaState {
        ScaState::new(alloc, self.net, self.params, iteration)
    }

    fn build(&self, state: &ScaState, phase1: bool) -> Subproblem {
        build_program(state, self.net, self.params, &self.modes, phase1)
    }

    fn extract(&self, sub: &Subproblem, x: &[f64]) -> Allocation {
        let lay = &sub.layout;
        let (m_aps, k_d, l_eu) = (self.net.num_aps(), self.net.num_ius(), self.net.num_eus());
        let a: Vec<f64> = (0..m_aps)
            .map(|m| match (&self.modes, lay.a[m]) {
                (Modes::Fixed(f), _) => f64::from(u8::from(f[m])),
                (Modes::Relaxed, Some(j)) => x[j].clamp(0.0, 1.0),
                (Modes::Relaxed, None) => unreachable!("relaxed layout has every a"),
            })
            .collect();
        let pick = |v: Option<usize>| v.map_or(0.0, |j| x[j].max(0.0));
        let mut eta_i = DMatrix::from_fn(m_aps, k_d, |m, k| pick(lay.eta_i[m][k]));
        let mut eta_e = DMatrix::from_fn(m_aps, l_eu, |m, l| pick(lay.eta_e[m][l]));
        for m in 0..m_aps {
            fit_row(&mut eta_i, m, a[m]);
            fit_row(&mut eta_e, m, 1.0 - a[m]);
        }
        Allocation { a, eta_i, eta_e }
    }

    fn assess(&self, alloc: &Allocation) -> Result<Assessment> {
        let report = evaluate(alloc, self.net, self.params)?;
        Ok(Assessment::new(report, self.params, true, true))
    }

    fn has_objective(&self) -> bool {
        self.net.num_eus() > 0
    }
}

/// Scales row `m` down so that it sums to at most `budget`.
fn fit_row(eta: &mut DMatrix<f64>, m: usize, budget: f64) {
    let s = eta.row(m).sum();
    if s > budget {
        let f = if s > 0.0 { budget.max(0.0) / s } else { 0.0 };
        eta.row_mut(m).iter_mut().for_each(|v| *v *= f);
    }
}

/// Energy half of the orthogonal scheme. Allocations carry `a = 1` and only
/// `eta_e` is meaningful.
pub(crate) struct OrthogonalEnergy<'a> {
    pub net: &'a NetworkRealization,
    pub params: &'a SystemParams,
}

impl Model for OrthogonalEnergy<'_> {
    fn state(&self, alloc: Allocation, iteration: usize) -> ScaState {
        let q = benchmark3_q(&alloc.eta_e, self.net, self.params);
        ScaState::with_energy(alloc, q, self.net, self.params, iteration)
    }

    fn build(&self, state: &ScaState, phase1: bool) -> Subproblem {
        build_orthogonal_energy(state, self.net, self.params, phase1)
    }

    fn extract(&self, sub: &Subproblem, x: &[f64]) -> Allocation {
        let (m_aps, k_d, l_eu) = (self.net.num_aps(), self.net.num_ius(), self.net.num_eus());
        let mut eta_e = DMatrix::from_fn(m_aps, l_eu, |m, l| sub.layout.eta_e[m][l].map_or(0.0, |j| x[j].max(0.0)));
        (0..m_aps).for_each(|m| fit_row(&mut eta_e, m, 1.0));
        Allocation {
            a: vec![1.0; m_aps],
            eta_i: DMatrix::zeros(m_aps, k_d),
            eta_e,
        }
    }

    fn assess(&self, alloc: &Allocation) -> Result<Assessment> {
        let q = benchmark3_q(&alloc.eta_e, self.net, self.params);
        let report = MetricsReport::from_parts(Vec::new(), q, self.params);
        Ok(Assessment::new(report, self.params, false, true))
    }

    fn has_objective(&self) -> bool {
        self.net.num_eus() > 0
    }
}

/// Information half of the orthogonal scheme (feasibility only).
pub(crate) struct OrthogonalSe<'a> {
    pub net: &'a NetworkRealization,
    pub params: &'a SystemParams,
}

impl Model for OrthogonalSe<'_> {
    fn state(&self, alloc: Allocation, iteration: usize) -> ScaState {
        let q = vec![0.0; self.net.num_eus()];
        ScaState::with_energy(alloc, q, self.net, self.params, iteration)
    }

    fn build(&self, state: &ScaState, phase1: bool) -> Subproblem {
        build_orthogonal_se(state, self.net, self.params, phase1)
    }

    fn extract(&self, sub: &Subproblem, x: &[f64]) -> Allocation {
        let (m_aps, k_d, l_eu) = (self.net.num_aps(), self.net.num_ius(), self.net.num_eus());
        let mut eta_i = DMatrix::from_fn(m_aps, k_d, |m, k| sub.layout.eta_i[m][k].map_or(0.0, |j| x[j].max(0.0)));
        (0..m_aps).for_each(|m| fit_row(&mut eta_i, m, 1.0));
        Allocation {
            a: vec![1.0; m_aps],
            eta_i,
            eta_e: DMatrix::zeros(m_aps, l_eu),
        }
    }

    fn assess(&self, alloc: &Allocation) -> Result<Assessment> {
        let se = benchmark3_se(&alloc.eta_i, self.net, self.params);
        let report = MetricsReport::from_parts(se, Vec::new(), self.params);
        Ok(Assessment::new(report, self.params, true, false))
    }

    fn has_objective(&self) -> bool {
        false
    }
}
