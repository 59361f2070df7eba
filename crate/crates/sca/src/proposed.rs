//! Joint mode selection and power control: continuous relaxation solved by
//! SCA, then rounding with power re-optimization and greedy repair.

use std::time::Instant;

use swipt_core::{Allocation, NetworkRealization, SystemParams};

use crate::benchmarks::benchmark2_solve;
use crate::engine::{phase_one, run, JointModel, Run};
use crate::error::Result;
use crate::outcome::{OutcomeStatus, Scheme, SolveOutcome};
use crate::state::{initial_allocation, ScaState};
use crate::surrogate::Modes;

/// Feasible starting point of the relaxed SCA.
#[derive(Debug, Clone)]
pub struct Start {
    pub state: ScaState,
    pub phase1_iterations: usize,
    /// False when phase 1 could not meet the QoS targets; the instance is
    /// then reported infeasible.
    pub feasible: bool,
}

pub fn initialize(net: &NetworkRealization, params: &SystemParams) -> Result<Start> {
    let model = JointModel {
        net,
        params,
        modes: Modes::Relaxed,
    };
    let p1 = phase_one(&model, initial_allocation(net))?;
    Ok(Start {
        state: p1.state,
        phase1_iterations: p1.iterations,
        feasible: p1.feasible,
    })
}

pub(crate) fn outcome_from_run(scheme: Scheme, run: Run, wall_time: f64) -> SolveOutcome {
    let objective = run.assessment.sum_phi();
    SolveOutcome {
        scheme,
        relaxed_allocation: run.state.iterate.clone(),
        allocation: run.state.iterate,
        omega: run.state.omega,
        objective_sum_he: objective,
        relaxed_objective: objective,
        history: run.history,
        status: run.status,
        metrics: run.assessment.report,
        iterations: run.iterations,
        phase1_iterations: run.phase1_iterations,
        flips: Vec::new(),
        wall_time,
        log: run.log,
    }
}

/// Relaxed SCA from the heuristic start.
pub fn sca_solve(net: &NetworkRealization, params: &SystemParams) -> Result<SolveOutcome> {
    sca_solve_from(net, params, initial_allocation(net))
}

/// Relaxed SCA from a given start (phase 1 runs if it misses a QoS target).
pub fn sca_solve_from(net: &NetworkRealization, params: &SystemParams, start: Allocation) -> Result<SolveOutcome> {
    let clock = Instant::now();
    let model = JointModel {
        net,
        params,
        modes: Modes::Relaxed,
    };
    let run = run(&model, start, params.sca_tol)?;
    Ok(outcome_from_run(Scheme::Proposed, run, clock.elapsed().as_secs_f64()))
}

fn infeasible_like(relaxed: &SolveOutcome) -> SolveOutcome {
    SolveOutcome {
        status: OutcomeStatus::Infeasible,
        ..relaxed.clone()
    }
}

/// Thresholds the relaxed modes at 1/2, re-optimizes powers with the modes
/// fixed and, while that is infeasible, flips the not-yet-flipped AP whose
/// relaxed `a` is closest to 1/2 toward the mode that relieves the violated
/// constraint class (information mode for SE, energy mode for harvesting).
pub fn round_modes(relaxed: &SolveOutcome, net: &NetworkRealization, params: &SystemParams) -> Result<SolveOutcome> {
    let clock = Instant::now();
    if !relaxed.status.is_solved() {
        return Ok(infeasible_like(relaxed));
    }
    let ra = &relaxed.relaxed_allocation.a;
    let m_aps = ra.len();
    let mut modes: Vec<bool> = ra.iter().map(|&a| a >= 0.5).collect();
    let mut flips = Vec::new();
    let mut log = relaxed.log.clone();
    let mut iterations = relaxed.iterations;
    let mut phase1_iterations = relaxed.phase1_iterations;
    loop {
        let a: Vec<f64> = modes.iter().map(|&i| f64::from(u8::from(i))).collect();
        let out = benchmark2_solve(net, params, &a)?;
        iterations += out.iterations;
        phase1_iterations += out.phase1_iterations;
        log.push(format!("round a = {a:?}: {}", out.status.name()));
        log.extend(out.log.iter().cloned());
        if out.status.is_solved() || flips.len() >= m_aps {
            let status = if out.status.is_solved() { out.status } else { OutcomeStatus::Infeasible };
            return Ok(SolveOutcome {
                scheme: Scheme::Proposed,
                relaxed_allocation: relaxed.relaxed_allocation.clone(),
                relaxed_objective: relaxed.relaxed_objective,
                status,
                iterations,
                phase1_iterations,
                flips,
                wall_time: relaxed.wall_time + clock.elapsed().as_secs_f64(),
                log,
                ..out
            });
        }
        let se_bad = out.metrics.feasible_se.iter().any(|&f| !f);
        let he_bad = out.metrics.feasible_he.iter().any(|&f| !f);
        let pick = (0..m_aps)
            .filter(|m| !flips.contains(m))
            .filter(|&m| (se_bad && !modes[m]) || (he_bad && modes[m]))
            .min_by(|&x, &y| (ra[x] - 0.5).abs().total_cmp(&(ra[y] - 0.5).abs()).then(x.cmp(&y)));
        let Some(m) = pick else {
            return Ok(SolveOutcome {
                scheme: Scheme::Proposed,
                relaxed_allocation: relaxed.relaxed_allocation.clone(),
                relaxed_objective: relaxed.relaxed_objective,
                status: OutcomeStatus::Infeasible,
                iterations,
                phase1_iterations,
                flips,
                wall_time: relaxed.wall_time + clock.elapsed().as_secs_f64(),
                log,
                ..out
            });
        };
        modes[m] = !modes[m];
        flips.push(m);
    }
}

/// Relaxed and rounded outcomes of the proposed scheme.
#[derive(Debug, Clone)]
pub struct ProposedOutcome {
    pub relaxed: SolveOutcome,
    pub rounded: SolveOutcome,
}

/// Relaxed SCA followed by rounding. When the rounded point beats the
/// relaxed one (the relaxation stopped at a weaker stationary point), the
/// relaxed SCA is restarted from the rounded allocation and rounded again.
pub fn proposed(net: &NetworkRealization, params: &SystemParams) -> Result<ProposedOutcome> {
    const RESTARTS: usize = 3;
    let mut relaxed = sca_solve(net, params)?;
    let mut rounded = round_modes(&relaxed, net, params)?;
    for _ in 0..RESTARTS {
        if !(rounded.is_feasible() && rounded.objective_sum_he > relaxed.objective_sum_he) {
            break;
        }
        let again = sca_solve_from(net, params, rounded.allocation.clone())?;
        if !again.status.is_solved() || again.objective_sum_he < rounded.objective_sum_he {
            break;
        }
        let again_rounded = round_modes(&again, net, params)?;
        relaxed = again;
        if again_rounded.is_feasible() && again_rounded.objective_sum_he > rounded.objective_sum_he {
            rounded = again_rounded;
        } else {
            rounded.relaxed_allocation = relaxed.relaxed_allocation.clone();
            rounded.relaxed_objective = relaxed.objective_sum_he;
        }
    }
    Ok(ProposedOutcome { relaxed, rounded })
}
