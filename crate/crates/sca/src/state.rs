//! SCA iterate and the expression holders its surrogates expand around.

use nalgebra::DMatrix;
use swipt_core::metrics::{harvested_energy_phi, logistic_psi, q_closed_form};
use swipt_core::{Allocation, EhModel, NetworkRealization, SystemParams};

/// Interior margin of `omega` relative to `phi`, keeping both logarithms of
/// the logistic inverse finite.
pub const OMEGA_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ScaState {
    pub iterate: Allocation,
    /// Logistic outputs `Psi(Q_l)` in watts, clamped into the open domain.
    pub omega: Vec<f64>,
    /// Harvested power `Phi_l` in watts.
    pub phi: Vec<f64>,
    /// Received energy `Q_l` in watt-symbols.
    pub q_energy: Vec<f64>,
    /// `[M x L]` expression holders `u_ml`.
    pub u: DMatrix<f64>,
    /// `q_k = sum_m sqrt(gamma_mk a_m eta_mk)`.
    pub q: Vec<f64>,
    /// `z_m = a_m + eta_m^I - eta_m^E`.
    pub z: Vec<f64>,
    /// `sum_l omega_l`.
    pub objective: f64,
    pub iteration: usize,
}

impl ScaState {
    /// State of an iterate whose received energies are already known.
    pub fn with_energy(
        iterate: Allocation,
        q_energy: Vec<f64>,
        net: &NetworkRealization,
        params: &SystemParams,
        iteration: usize,
    ) -> Self {
        let model = EhModel::from_params(params);
        let omega: Vec<f64> = q_energy.iter().map(|&q| clamp_omega(logistic_psi(q, &model), &model)).collect();
        let phi = q_energy.iter().map(|&q| harvested_energy_phi(q, &model)).collect();
        let u = expression_u(&iterate, net, params);
        let q = coherent_q(&iterate, net);
        let z = mode_balance_z(&iterate);
        ScaState {
            objective: omega.iter().sum(),
            iterate,
            omega,
            phi,
            q_energy,
            u,
            q,
            z,
            iteration,
        }
    }

    /// State under simultaneous information and energy transmission.
    pub fn new(iterate: Allocation, net: &NetworkRealization, params: &SystemParams, iteration: usize) -> Self {
        let q_energy = q_closed_form(&iterate, net, params);
        ScaState::with_energy(iterate, q_energy, net, params, iteration)
    }

    pub fn sum_phi(&self) -> f64 {
        self.phi.iter().sum()
    }
}

pub fn clamp_omega(psi: f64, model: &EhModel) -> f64 {
    let eps = OMEGA_MARGIN * model.phi;
    psi.clamp(eps, model.phi - eps)
}

/// `u_ml = beta_ml eta_m^I - (N - K_d + 1) gamma_ml eta_ml^E - beta_ml sum_{l' != l} eta_ml'^E`.
pub fn expression_u(alloc: &Allocation, net: &NetworkRealization, params: &SystemParams) -> DMatrix<f64> {
    let gain = (params.n - params.k_d + 1) as f64;
    DMatrix::from_fn(net.num_aps(), net.num_eus(), |m, l| {
        let beta = net.beta_eu[(m, l)];
        let own = alloc.eta_e[(m, l)];
        let others = alloc.energy_power(m) - own;
        beta * alloc.info_power(m) - gain * net.gamma_eu[(m, l)] * own - beta * others
    })
}

pub fn coherent_q(alloc: &Allocation, net: &NetworkRealization) -> Vec<f64> {
    (0..net.num_ius())
        .map(|k| {
            (0..net.num_aps())
                .map(|m| (net.gamma_iu[(m, k)] * alloc.a[m] * alloc.eta_i[(m, k)]).max(0.0).sqrt())
                .sum()
        })
        .collect()
}

pub fn mode_balance_z(alloc: &Allocation) -> Vec<f64> {
    (0..alloc.num_aps())
        .map(|m| alloc.a[m] + alloc.info_power(m) - alloc.energy_power(m))
        .collect()
}

/// Heuristic interior start: an AP leans toward information mode
/// (`a = 0.75`) when its strongest link is to an IU and toward energy mode
/// (`a = 0.25`) otherwise, then splits `a` evenly over the IUs and `1 - a`
/// evenly over the EUs.
pub fn initial_allocation(net: &NetworkRealization) -> Allocation {
    let (m, k, l) = (net.num_aps(), net.num_ius(), net.num_eus());
    let a: Vec<f64> = (0..m)
        .map(|ap| {
            let best_iu = net.beta_iu.row(ap).iter().copied().fold(0.0, f64::max);
            let best_eu = net.beta_eu.row(ap).iter().copied().fold(0.0, f64::max);
            if k > 0 && (l == 0 || best_iu > best_eu) {
                0.75
            } else {
                0.25
            }
        })
        .collect();
    let eta_i = DMatrix::from_fn(m, k, |i, _| a[i] / k as f64);
    let eta_e = DMatrix::from_fn(m, l, |i, _| (1.0 - a[i]) / l as f64);
    Allocation { a, eta_i, eta_e }
}
