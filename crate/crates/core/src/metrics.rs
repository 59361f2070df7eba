//! Closed-form downlink metrics under protective partial zero-forcing.
//!
//! Information APs use local PZF, energy APs use PMRT (MRT projected onto
//! the orthogonal complement of the IU channel estimates). Received energy
//! is reported in watt-symbols: the normalized downlink energy times
//! `(tau_c - tau) * noise_power`. The energy-harvesting model takes that
//! quantity directly as its input.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NetworkRealization;
use crate::params::SystemParams;

/// Mode vector and power coefficients.
///
/// `a[m] = 1` makes AP `m` an information AP and `a[m] = 0` an energy AP.
/// During optimization `a` is relaxed to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub a: Vec<f64>,
    /// `[M x K_d]` information power fractions.
    pub eta_i: DMatrix<f64>,
    /// `[M x L]` energy power fractions.
    pub eta_e: DMatrix<f64>,
}

impl Allocation {
    pub fn zeros(m: usize, k_d: usize, l: usize) -> Self {
        Allocation {
            a: vec![0.0; m],
            eta_i: DMatrix::zeros(m, k_d),
            eta_e: DMatrix::zeros(m, l),
        }
    }

    /// Full-power equal split for a given mode vector: every information AP
    /// gives `1/K_d` to each IU and every energy AP `1/L` to each EU.
    pub fn uniform(a: &[f64], k_d: usize, l: usize) -> Self {
        let m = a.len();
        let eta_i = DMatrix::from_fn(m, k_d, |i, _| a[i] / k_d as f64);
        let eta_e = DMatrix::from_fn(m, l, |i, _| (1.0 - a[i]) / l as f64);
        Allocation {
            a: a.to_vec(),
            eta_i,
            eta_e,
        }
    }

    pub fn num_aps(&self) -> usize {
        self.a.len()
    }

    /// `sum_k eta_i[m, k]`.
    pub fn info_power(&self, m: usize) -> f64 {
        self.eta_i.row(m).sum()
    }

    /// `sum_l eta_e[m, l]`.
    pub fn energy_power(&self, m: usize) -> f64 {
        self.eta_e.row(m).sum()
    }

    pub fn is_binary(&self) -> bool {
        self.a.iter().all(|&x| x == 0.0 || x == 1.0)
    }

    /// Largest violation of `sum_k eta_i <= a`, `sum_l eta_e <= 1 - a`,
    /// `0 <= a <= 1` and nonnegativity.
    pub fn power_violation(&self) -> f64 {
        let mut worst = 0f64;
        for m in 0..self.num_aps() {
            let a = self.a[m];
            worst = worst
                .max(self.info_power(m) - a)
                .max(self.energy_power(m) - (1.0 - a))
                .max(-a)
                .max(a - 1.0);
        }
        let neg = self
            .eta_i
            .iter()
            .chain(self.eta_e.iter())
            .fold(0f64, |w, &x| w.max(-x));
        worst.max(neg)
    }

    pub fn check(&self, net: &NetworkRealization, tol: f64) -> Result<()> {
        let (m, k, l) = (net.num_aps(), net.num_ius(), net.num_eus());
        if self.a.len() != m || self.eta_i.shape() != (m, k) || self.eta_e.shape() != (m, l) {
            return Err(Error::Dimension(format!(
                "allocation shapes a={}, eta_i={:?}, eta_e={:?} do not match M={m}, K_d={k}, L={l}",
                self.a.len(),
                self.eta_i.shape(),
                self.eta_e.shape()
            )));
        }
        let v = self.power_violation();
        if v > tol {
            return Err(Error::Domain(format!("power constraints violated by {v:e}")));
        }
        Ok(())
    }
}

/// Sigmoidal energy-harvesting circuit model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EhModel {
    pub xi: f64,
    pub chi: f64,
    pub phi: f64,
    /// `1 / (1 + exp(xi chi))`, the logistic output at zero input divided by `phi`.
    pub omega: f64,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl EhModel {
    pub fn new(xi: f64, chi: f64, phi: f64) -> Self {
        EhModel {
            xi,
            chi,
            phi,
            omega: 1.0 / (1.0 + (xi * chi).exp()),
        }
    }

    pub fn from_params(params: &SystemParams) -> Self {
        EhModel::new(params.xi, params.chi, params.phi)
    }

    /// Logistic output for the target of harvested power `gamma`:
    /// `Phi >= gamma` is equivalent to `Psi >= gamma (1 - Omega) + phi Omega`.
    pub fn psi_target(&self, gamma: f64) -> f64 {
        gamma * (1.0 - self.omega) + self.phi * self.omega
    }

    /// Inverse of [`EhModel::psi_target`].
    pub fn phi_from_psi(&self, psi: f64) -> f64 {
        ((psi - self.phi * self.omega) / (1.0 - self.omega)).max(0.0)
    }
}

/// Logistic function `phi / (1 + exp(-xi (q - chi)))`.
pub fn logistic_psi(q: f64, model: &EhModel) -> f64 {
    model.phi * sigmoid(model.xi * (q - model.chi))
}

/// Harvested power `(Psi(q) - phi Omega) / (1 - Omega)`, clipped at zero.
///
/// Evaluated as a difference of sigmoids through `expm1`, so small inputs do
/// not cancel against the `phi Omega` floor.
pub fn harvested_energy_phi(q: f64, model: &EhModel) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return model.phi;
    }
    // sigma(x) - sigma(y) = sigma(x) sigma(-y) (1 - e^{-(x - y)}), with x - y = xi q
    let x = model.xi * (q - model.chi);
    let y = -model.xi * model.chi;
    let diff = sigmoid(x) * sigmoid(-y) * -(-model.xi * q).exp_m1();
    (model.phi * diff / (1.0 - model.omega)).max(0.0)
}

/// Inverse logistic `chi - ln((phi - psi) / psi) / xi`, defined on `(0, phi)`.
pub fn inverse_logistic_f(psi: f64, model: &EhModel) -> Result<f64> {
    if !(psi > 0.0 && psi < model.phi) {
        return Err(Error::Domain(format!(
            "logistic inverse needs 0 < psi < {}, got {psi}",
            model.phi
        )));
    }
    Ok(model.chi - ((model.phi - psi) / psi).ln() / model.xi)
}

fn check_shapes(alloc: &Allocation, net: &NetworkRealization) -> Result<()> {
    alloc.check(net, f64::INFINITY)
}

/// Effective SINR of every IU under PZF/PMRT.
pub fn sinr_closed_form(
    alloc: &Allocation,
    net: &NetworkRealization,
    params: &SystemParams,
) -> Result<Vec<f64>> {
    check_shapes(alloc, net)?;
    const NEG_TOL: f64 = 1e-12;
    let m = net.num_aps();
    let rho = params.rho();
    let dof = params.n as f64 - params.k_d as f64;
    for ap in 0..m {
        let a = alloc.a[ap];
        let bad = a < -NEG_TOL
            || 1.0 - a < -NEG_TOL
            || alloc.eta_i.row(ap).iter().any(|&e| a * e < -NEG_TOL)
            || alloc.eta_e.row(ap).iter().any(|&e| (1.0 - a) * e < -NEG_TOL);
        if bad {
            return Err(Error::Domain(format!("negative mode-power product at AP {ap}")));
        }
    }
    let sinr = (0..net.num_ius())
        .map(|k| {
            let mut coherent = 0.0;
            let mut leak = 0.0;
            for ap in 0..m {
                let a = alloc.a[ap].clamp(0.0, 1.0);
                let err = net.beta_iu[(ap, k)] - net.gamma_iu[(ap, k)];
                coherent += (a * alloc.eta_i[(ap, k)] * net.gamma_iu[(ap, k)]).max(0.0).sqrt();
                leak += err * (a * alloc.info_power(ap) + (1.0 - a) * alloc.energy_power(ap));
            }
            rho * dof * coherent * coherent / (rho * leak + 1.0)
        })
        .collect();
    Ok(sinr)
}

/// Spectral efficiency `(1 - tau/tau_c) log2(1 + SINR)` in bit/s/Hz.
pub fn se_per_iu(sinr: &[f64], params: &SystemParams) -> Vec<f64> {
    let prelog = params.prelog();
    sinr.iter().map(|s| prelog * s.max(0.0).ln_1p() / std::f64::consts::LN_2).collect()
}

/// Average received energy of every EU in watt-symbols.
pub fn q_closed_form(alloc: &Allocation, net: &NetworkRealization, params: &SystemParams) -> Vec<f64> {
    let rho = params.rho();
    let gain = (params.n - params.k_d + 1) as f64;
    (0..net.num_eus())
        .map(|l| params.energy_scale() * (rho * normalized_energy_terms(alloc, net, l, gain) + 1.0))
        .collect()
}

fn normalized_energy_terms(alloc: &Allocation, net: &NetworkRealization, l: usize, gain: f64) -> f64 {
    (0..net.num_aps())
        .map(|m| {
            let a = alloc.a[m];
            let own = alloc.eta_e[(m, l)];
            let others = alloc.energy_power(m) - own;
            let beta = net.beta_eu[(m, l)];
            (1.0 - a) * (gain * own * net.gamma_eu[(m, l)] + others * beta)
                + a * alloc.info_power(m) * beta
        })
        .sum()
}

/// SE with all APs sending information for half of the downlink phase.
pub fn benchmark3_se(eta_i: &DMatrix<f64>, net: &NetworkRealization, params: &SystemParams) -> Vec<f64> {
    let rho = params.rho();
    let dof = (params.n - params.k_d) as f64;
    let prelog = 0.5 * params.prelog();
    (0..net.num_ius())
        .map(|k| {
            let mut coherent = 0.0;
            let mut leak = 0.0;
            for m in 0..net.num_aps() {
                coherent += (eta_i[(m, k)] * net.gamma_iu[(m, k)]).max(0.0).sqrt();
                leak += eta_i.row(m).sum() * (net.beta_iu[(m, k)] - net.gamma_iu[(m, k)]);
            }
            let sinr = rho * dof * coherent * coherent / (rho * leak + 1.0);
            prelog * sinr.ln_1p() / std::f64::consts::LN_2
        })
        .collect()
}

/// Received energy with all APs sending unprojected MRT energy beams for
/// half of the downlink phase.
pub fn benchmark3_q(eta_e: &DMatrix<f64>, net: &NetworkRealization, params: &SystemParams) -> Vec<f64> {
    let rho = params.rho();
    let gain = (params.n + 1) as f64;
    let scale = 0.5 * params.energy_scale();
    (0..net.num_eus())
        .map(|l| {
            let terms: f64 = (0..net.num_aps())
                .map(|m| {
                    let own = eta_e[(m, l)];
                    let others = eta_e.row(m).sum() - own;
                    gain * own * net.gamma_eu[(m, l)] + others * net.beta_eu[(m, l)]
                })
                .sum();
            scale * (rho * terms + 1.0)
        })
        .collect()
}

/// Every reported metric of one allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub se_per_iu: Vec<f64>,
    pub q_per_eu: Vec<f64>,
    pub phi_per_eu: Vec<f64>,
    pub feasible_se: Vec<bool>,
    pub feasible_he: Vec<bool>,
}

/// Absolute slack used when flagging QoS feasibility of reported metrics.
pub const SE_FEASIBILITY_TOL: f64 = 1e-6;
pub const HE_FEASIBILITY_TOL: f64 = 1e-9;

impl MetricsReport {
    pub fn from_parts(se_per_iu: Vec<f64>, q_per_eu: Vec<f64>, params: &SystemParams) -> Self {
        let model = EhModel::from_params(params);
        let phi_per_eu: Vec<f64> = q_per_eu.iter().map(|&q| harvested_energy_phi(q, &model)).collect();
        let feasible_se = se_per_iu
            .iter()
            .map(|&s| s >= params.se_target - SE_FEASIBILITY_TOL)
            .collect();
        let feasible_he = phi_per_eu
            .iter()
            .zip(&params.he_targets)
            .map(|(&p, &t)| p >= t - HE_FEASIBILITY_TOL)
            .collect();
        MetricsReport {
            se_per_iu,
            q_per_eu,
            phi_per_eu,
            feasible_se,
            feasible_he,
        }
    }

    pub fn sum_phi(&self) -> f64 {
        self.phi_per_eu.iter().sum()
    }

    pub fn min_se(&self) -> f64 {
        self.se_per_iu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn all_feasible(&self) -> bool {
        self.feasible_se.iter().chain(self.feasible_he.iter()).all(|&f| f)
    }
}

/// Closed-form metrics of an allocation under simultaneous transmission.
pub fn evaluate(alloc: &Allocation, net: &NetworkRealization, params: &SystemParams) -> Result<MetricsReport> {
    let sinr = sinr_closed_form(alloc, net, params)?;
    let se = se_per_iu(&sinr, params);
    let q = q_closed_form(alloc, net, params);
    Ok(MetricsReport::from_parts(se, q, params))
}

/// Closed-form metrics of the orthogonal (time-split) transmission scheme.
pub fn evaluate_orthogonal(
    eta_i: &DMatrix<f64>,
    eta_e: &DMatrix<f64>,
    net: &NetworkRealization,
    params: &SystemParams,
) -> MetricsReport {
    MetricsReport::from_parts(benchmark3_se(eta_i, net, params), benchmark3_q(eta_e, net, params), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tiny_net(beta_iu: &[f64], gamma_iu: &[f64], beta_eu: &[f64], gamma_eu: &[f64]) -> NetworkRealization {
        let m = beta_iu.len().max(beta_eu.len());
        let k = if beta_iu.is_empty() { 0 } else { 1 };
        let l = if beta_eu.is_empty() { 0 } else { 1 };
        NetworkRealization {
            ap_positions: vec![[0.0, 0.0]; m],
            iu_positions: vec![[1.0, 0.0]; k],
            eu_positions: vec![[2.0, 0.0]; l],
            beta_iu: DMatrix::from_column_slice(m, k, beta_iu),
            beta_eu: DMatrix::from_column_slice(m, l, beta_eu),
            gamma_iu: DMatrix::from_column_slice(m, k, gamma_iu),
            gamma_eu: DMatrix::from_column_slice(m, l, gamma_eu),
            seed: 0,
        }
    }

    fn unit_params(n: usize, k_d: usize, l: usize) -> SystemParams {
        let mut p = SystemParams::reference(1, n, k_d, l);
        p.p_ap = 1.0;
        p.noise_power = 1.0;
        p
    }

    fn reference_eh() -> EhModel {
        EhModel::new(150.0, 0.014, 0.024)
    }

    #[test]
    fn zero_power_zero_sinr() {
        let p = SystemParams::reference(6, 10, 3, 5);
        let net = NetworkRealization::generate(&p, 5).unwrap();
        let alloc = Allocation::zeros(6, 3, 5);
        assert!(sinr_closed_form(&alloc, &net, &p).unwrap().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn single_ap_perfect_csi_sinr() {
        let p = unit_params(2, 1, 0);
        let beta = 0.37;
        let net = tiny_net(&[beta], &[beta], &[], &[]);
        let alloc = Allocation {
            a: vec![1.0],
            eta_i: DMatrix::from_element(1, 1, 1.0),
            eta_e: DMatrix::zeros(1, 0),
        };
        let sinr = sinr_closed_form(&alloc, &net, &p).unwrap();
        assert!((sinr[0] - beta).abs() < 1e-15);
    }

    #[test]
    fn perfect_csi_removes_interference() {
        let p = SystemParams::reference(6, 10, 3, 5);
        let net = NetworkRealization::generate(&p, 8).unwrap().with_perfect_csi();
        let a = [1.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        let alloc = Allocation::uniform(&a, 3, 5);
        let sinr = sinr_closed_form(&alloc, &net, &p).unwrap();
        for (k, s) in sinr.iter().enumerate() {
            let coherent: f64 = (0..6)
                .map(|m| (a[m] * alloc.eta_i[(m, k)] * net.gamma_iu[(m, k)]).sqrt())
                .sum();
            let expected = p.rho() * 7.0 * coherent * coherent;
            assert!((s / expected - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_products_rejected() {
        let p = SystemParams::reference(2, 10, 3, 5);
        let net = NetworkRealization::generate(&p, 1).unwrap();
        let mut alloc = Allocation::uniform(&[1.0, 0.0], 3, 5);
        alloc.eta_i[(0, 1)] = -0.1;
        assert!(matches!(sinr_closed_form(&alloc, &net, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn se_examples() {
        let mut p = SystemParams::reference(1, 10, 3, 5);
        assert_eq!(se_per_iu(&[0.0], &p), vec![0.0]);
        p.tau_c = 200;
        p.tau = 8;
        assert!((se_per_iu(&[1.0], &p)[0] - 0.96).abs() < 1e-15);
    }

    #[test]
    fn q_noise_floor() {
        let p = SystemParams::reference(6, 10, 3, 5);
        let net = NetworkRealization::generate(&p, 2).unwrap();
        let q = q_closed_form(&Allocation::zeros(6, 3, 5), &net, &p);
        for v in q {
            assert!((v - p.energy_scale()).abs() <= 1e-15 * v);
        }
    }

    #[test]
    fn q_hand_example() {
        let mut p = unit_params(2, 1, 1);
        p.tau_c = 10;
        p.tau = 2;
        let net = tiny_net(&[0.9], &[0.8], &[0.7], &[0.5]);
        let alloc = Allocation {
            a: vec![0.0],
            eta_i: DMatrix::zeros(1, 1),
            eta_e: DMatrix::from_element(1, 1, 1.0),
        };
        assert!((q_closed_form(&alloc, &net, &p)[0] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn q_affine_in_power() {
        let p = SystemParams::reference(6, 10, 3, 5);
        let net = NetworkRealization::generate(&p, 3).unwrap();
        let alloc = Allocation::uniform(&[1.0, 0.0, 0.0, 1.0, 0.0, 1.0], 3, 5);
        let mut half = alloc.clone();
        half.eta_i *= 0.5;
        half.eta_e *= 0.5;
        let floor = p.energy_scale();
        let full = q_closed_form(&alloc, &net, &p);
        let halved = q_closed_form(&half, &net, &p);
        for (f, h) in full.iter().zip(&halved) {
            assert!(((f - floor) / (h - floor) - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eh_examples() {
        let eh = reference_eh();
        assert!((logistic_psi(0.014, &eh) - 0.012).abs() < 1e-15);
        assert!((logistic_psi(0.0, &eh) - eh.phi * eh.omega).abs() < 1e-15);
        assert!((logistic_psi(1e3, &eh) - 0.024).abs() < 1e-15);
        assert!((eh.omega - 1.0 / (1.0 + 2.1f64.exp())).abs() < 1e-16);
        assert!((eh.omega - 0.1091).abs() < 5e-5);
        assert_eq!(harvested_energy_phi(0.0, &eh), 0.0);
        assert!((harvested_energy_phi(10.0, &eh) - eh.phi).abs() < 1e-15);
        // expm1 form agrees with the direct formula where both are accurate
        for q in [1e-3, 0.01, 0.014, 0.05] {
            let direct = (logistic_psi(q, &eh) - eh.phi * eh.omega) / (1.0 - eh.omega);
            assert!((harvested_energy_phi(q, &eh) / direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_examples() {
        let eh = reference_eh();
        assert!((inverse_logistic_f(0.012, &eh).unwrap() - 0.014).abs() < 1e-17);
        let q = 0.02;
        assert!((inverse_logistic_f(logistic_psi(q, &eh), &eh).unwrap() - q).abs() < 1e-14);
        assert!(inverse_logistic_f(0.024 * (1.0 - 1e-15), &eh).unwrap() > 0.2);
        assert!(inverse_logistic_f(0.0, &eh).is_err());
        assert!(inverse_logistic_f(0.024, &eh).is_err());
        assert!(inverse_logistic_f(-1.0, &eh).is_err());
    }

    #[test]
    fn psi_target_maps_to_phi() {
        let eh = reference_eh();
        let target = 100e-6;
        let psi = eh.psi_target(target);
        let q = inverse_logistic_f(psi, &eh).unwrap();
        assert!((harvested_energy_phi(q, &eh) - target).abs() < 1e-15);
        assert!((eh.phi_from_psi(psi) - target).abs() < 1e-18);
    }

    #[test]
    fn benchmark3_se_is_half_of_simultaneous() {
        let mut p = SystemParams::reference(6, 10, 3, 0);
        p.he_targets.clear();
        let net = NetworkRealization::generate(&p, 11).unwrap();
        let alloc = Allocation::uniform(&[1.0; 6], 3, 0);
        let full = se_per_iu(&sinr_closed_form(&alloc, &net, &p).unwrap(), &p);
        let half = benchmark3_se(&alloc.eta_i, &net, &p);
        for (f, h) in full.iter().zip(&half) {
            assert!((h / f - 0.5).abs() < 1e-12);
        }
        assert!(benchmark3_se(&DMatrix::zeros(6, 3), &net, &p).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn benchmark3_se_single_ap() {
        let p = unit_params(2, 1, 0);
        let beta = 0.37;
        let net = tiny_net(&[beta], &[beta], &[], &[]);
        let se = benchmark3_se(&DMatrix::from_element(1, 1, 1.0), &net, &p);
        let expected = 0.5 * p.prelog() * (1.0 + beta).log2();
        assert!((se[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn benchmark3_q_examples() {
        let mut p = unit_params(2, 1, 1);
        p.tau_c = 10;
        p.tau = 2;
        let net = tiny_net(&[0.9], &[0.8], &[0.7], &[0.5]);
        let q = benchmark3_q(&DMatrix::from_element(1, 1, 1.0), &net, &p);
        assert!((q[0] - 10.0).abs() < 1e-12);
        let floor = benchmark3_q(&DMatrix::zeros(1, 1), &net, &p);
        assert!((floor[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn benchmark3_q_without_ius_matches_half_of_simultaneous() {
        let mut p = SystemParams::reference(4, 6, 0, 2);
        p.tau = 2;
        let net = NetworkRealization::generate(&p, 4).unwrap();
        let alloc = Allocation::uniform(&[0.0; 4], 0, 2);
        let full = q_closed_form(&alloc, &net, &p);
        let half = benchmark3_q(&alloc.eta_e, &net, &p);
        for (f, h) in full.iter().zip(&half) {
            assert!((h / f - 0.5).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn logistic_roundtrip(q in 0.0f64..0.08) {
            let eh = reference_eh();
            let back = inverse_logistic_f(logistic_psi(q, &eh), &eh).unwrap();
            prop_assert!((back - q).abs() <= 1e-10 * q.max(eh.chi));
        }

        #[test]
        fn phi_psi_q_order_agree(q1 in 0.0f64..0.1, q2 in 0.0f64..0.1) {
            let eh = reference_eh();
            let by_q = q1 >= q2;
            prop_assert_eq!(by_q, logistic_psi(q1, &eh) >= logistic_psi(q2, &eh));
            prop_assert_eq!(by_q, harvested_energy_phi(q1, &eh) >= harvested_energy_phi(q2, &eh));
        }

        #[test]
        fn scaling_power_never_increases_q(seed in 0u64..50, s in 0.0f64..1.0) {
            let p = SystemParams::reference(4, 10, 3, 5);
            let net = NetworkRealization::generate(&p, seed).unwrap();
            let alloc = Allocation::uniform(&[1.0, 0.0, 1.0, 0.0], 3, 5);
            let mut scaled = alloc.clone();
            scaled.eta_i *= s;
            scaled.eta_e *= s;
            let q0 = q_closed_form(&alloc, &net, &p);
            let q1 = q_closed_form(&scaled, &net, &p);
            for (a, b) in q0.iter().zip(&q1) {
                prop_assert!(*b <= *a * (1.0 + 1e-15));
            }
        }
    }
}
