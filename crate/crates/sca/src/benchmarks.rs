//! Reference schemes: random modes at full power, random modes with power
//! control, orthogonal time sharing, and exhaustive mode enumeration.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use swipt_core::metrics::{evaluate, evaluate_orthogonal};
use swipt_core::seed::{rng_from, STREAM_MODES};
use swipt_core::{Allocation, NetworkRealization, SystemParams};

use crate::engine::{run, JointModel, OrthogonalEnergy, OrthogonalSe};
use crate::error::{Result, ScaError};
use crate::outcome::{OutcomeStatus, Scheme, SolveOutcome};
use crate::proposed::outcome_from_run;
use crate::surrogate::Modes;

/// Largest `M` accepted by [`brute_force_oracle`].
pub const ORACLE_MAX_APS: usize = 12;

fn full_power(a: &[f64], k_d: usize, l: usize) -> Allocation {
    let mut alloc = Allocation::uniform(a, k_d, l);
    if k_d == 0 {
        alloc.eta_i = DMatrix::zeros(a.len(), 0);
    }
    if l == 0 {
        alloc.eta_e = DMatrix::zeros(a.len(), 0);
    }
    alloc
}

/// Random binary modes, every AP at full power split evenly over its users.
/// If the draw leaves one mode empty while both user types exist, one
/// uniformly chosen AP is flipped.
pub fn benchmark1(net: &NetworkRealization, params: &SystemParams, seed: u64) -> Result<SolveOutcome> {
    let clock = Instant::now();
    let m_aps = net.num_aps();
    let (k_d, l) = (net.num_ius(), net.num_eus());
    let mut rng = rng_from(net.seed, &[STREAM_MODES, seed]);
    let mut a: Vec<f64> = (0..m_aps).map(|_| f64::from(u8::from(rng.random_bool(0.5)))).collect();
    let n_info = a.iter().filter(|&&x| x == 1.0).count();
    if k_d > 0 && l > 0 && m_aps > 1 && (n_info == 0 || n_info == m_aps) {
        let m = rng.random_range(0..m_aps);
        a[m] = 1.0 - a[m];
    }
    let alloc = full_power(&a, k_d, l);
    let metrics = evaluate(&alloc, net, params)?;
    let model = swipt_core::EhModel::from_params(params);
    let omega = metrics
        .q_per_eu
        .iter()
        .map(|&q| swipt_core::metrics::logistic_psi(q, &model))
        .collect();
    let sum = metrics.sum_phi();
    Ok(SolveOutcome {
        scheme: Scheme::Benchmark1,
        relaxed_allocation: alloc.clone(),
        allocation: alloc,
        omega,
        objective_sum_he: sum,
        relaxed_objective: sum,
        history: vec![sum],
        status: OutcomeStatus::Converged,
        metrics,
        iterations: 0,
        phase1_iterations: 0,
        flips: Vec::new(),
        wall_time: clock.elapsed().as_secs_f64(),
        log: Vec::new(),
    })
}

fn check_binary(a: &[f64], net: &NetworkRealization) -> Result<Vec<bool>> {
    if a.len() != net.num_aps() {
        return Err(ScaError::InvalidModes(format!("{} modes for {} APs", a.len(), net.num_aps())));
    }
    a.iter()
        .map(|&x| match x {
            1.0 => Ok(true),
            0.0 => Ok(false),
            _ => Err(ScaError::InvalidModes(format!("mode {x} is not binary"))),
        })
        .collect()
}

/// Power control by SCA with the modes fixed to `a_fixed`; power variables
/// of the unused mode are removed from the program.
pub fn benchmark2_solve(net: &NetworkRealization, params: &SystemParams, a_fixed: &[f64]) -> Result<SolveOutcome> {
    let clock = Instant::now();
    let modes = check_binary(a_fixed, net)?;
    let model = JointModel {
        net,
        params,
        modes: Modes::Fixed(modes),
    };
    let start = full_power(a_fixed, net.num_ius(), net.num_eus());
    let run = run(&model, start, params.sca_tol)?;
    Ok(outcome_from_run(Scheme::Benchmark2, run, clock.elapsed().as_secs_f64()))
}

/// Orthogonal time sharing: the energy half maximizes sum harvested power
/// and the information half only has to meet the doubled SE target. The two
/// halves are independent SCA runs.
pub fn benchmark3_solve(net: &NetworkRealization, params: &SystemParams) -> Result<SolveOutcome> {
    let clock = Instant::now();
    let (m_aps, k_d, l) = (net.num_aps(), net.num_ius(), net.num_eus());
    let ones = vec![1.0; m_aps];
    let energy_start = Allocation {
        a: ones.clone(),
        eta_i: DMatrix::zeros(m_aps, k_d),
        eta_e: DMatrix::from_element(m_aps, l, 1.0 / l.max(1) as f64),
    };
    let info_start = Allocation {
        a: ones.clone(),
        eta_i: DMatrix::from_element(m_aps, k_d, 1.0 / k_d.max(1) as f64),
        eta_e: DMatrix::zeros(m_aps, l),
    };
    let energy = run(&OrthogonalEnergy { net, params }, energy_start, params.sca_tol)?;
    let info = run(&OrthogonalSe { net, params }, info_start, params.sca_tol)?;
    let alloc = Allocation {
        a: ones,
        eta_i: info.state.iterate.eta_i.clone(),
        eta_e: energy.state.iterate.eta_e.clone(),
    };
    let metrics = evaluate_orthogonal(&alloc.eta_i, &alloc.eta_e, net, params);
    let status = match (energy.status, info.status) {
        (OutcomeStatus::Infeasible, _) | (_, OutcomeStatus::Infeasible) => OutcomeStatus::Infeasible,
        (OutcomeStatus::Numerical, _) | (_, OutcomeStatus::Numerical) => OutcomeStatus::Numerical,
        (OutcomeStatus::MaxIter, _) | (_, OutcomeStatus::MaxIter) => OutcomeStatus::MaxIter,
        _ => OutcomeStatus::Converged,
    };
    let sum = metrics.sum_phi();
    let mut log = energy.log;
    log.extend(info.log.into_iter().map(|s| format!("info {s}")));
    Ok(SolveOutcome {
        scheme: Scheme::Benchmark3,
        relaxed_allocation: alloc.clone(),
        allocation: alloc,
        omega: energy.state.omega,
        objective_sum_he: sum,
        relaxed_objective: sum,
        history: energy.history,
        status,
        metrics,
        iterations: energy.iterations + info.iterations,
        phase1_iterations: energy.phase1_iterations + info.phase1_iterations,
        flips: Vec::new(),
        wall_time: clock.elapsed().as_secs_f64(),
        log,
    })
}

/// Best [`benchmark2_solve`] outcome over every binary mode vector with at
/// least one AP per mode (for each user type present).
pub fn brute_force_oracle(net: &NetworkRealization, params: &SystemParams) -> Result<SolveOutcome> {
    let clock = Instant::now();
    let m_aps = net.num_aps();
    if m_aps > ORACLE_MAX_APS {
        return Err(ScaError::TooManyAps {
            m: m_aps,
            limit: ORACLE_MAX_APS,
        });
    }
    let (k_d, l) = (net.num_ius(), net.num_eus());
    let mut best: Option<SolveOutcome> = None;
    let mut fallback: Option<SolveOutcome> = None;
    let mut iterations = 0;
    let mut phase1_iterations = 0;
    for mask in 0u32..(1 << m_aps) {
        let n_info = mask.count_ones() as usize;
        if (k_d > 0 && n_info == 0) || (l > 0 && n_info == m_aps) {
            continue;
        }
        let a: Vec<f64> = (0..m_aps).map(|m| f64::from((mask >> m) & 1)).collect();
        let out = benchmark2_solve(net, params, &a)?;
        iterations += out.iterations;
        phase1_iterations += out.phase1_iterations;
        if out.is_feasible() {
            if best.as_ref().is_none_or(|b| out.objective_sum_he > b.objective_sum_he) {
                best = Some(out);
            }
        } else if fallback.is_none() {
            fallback = Some(out);
        }
    }
    let mut out = match (best, fallback) {
        (Some(b), _) => b,
        (None, Some(f)) => SolveOutcome {
            status: OutcomeStatus::Infeasible,
            ..f
        },
        (None, None) => {
            return Err(ScaError::InvalidModes("no mode vector has an AP for each user type".into()));
        }
    };
    out.scheme = Scheme::Oracle;
    out.iterations = iterations;
    out.phase1_iterations = phase1_iterations;
    out.wall_time = clock.elapsed().as_secs_f64();
    Ok(out)
}
