//! Monte-Carlo estimation of the hardening-bound SE and average received
//! energy with explicitly constructed PZF / PMRT precoders.
//!
//! Channel estimates and estimation errors are drawn from their MMSE
//! marginals, `g_hat ~ CN(0, gamma I)` and `g_err ~ CN(0, (beta - gamma) I)`,
//! which is distributionally identical to running the orthogonal pilot phase.
//! Each trial owns a sub-seed derived from `(net.seed, base seed, trial)`,
//! and per-trial statistics are reduced in trial order, so results do not
//! depend on the number of worker threads.

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{se_per_iu, Allocation};
use crate::network::NetworkRealization;
use crate::params::SystemParams;
use crate::seed::{self, rng_from};

pub type CMatrix = DMatrix<Complex64>;

/// Small-scale fading of one trial; one `[N x users]` matrix per AP.
#[derive(Debug, Clone)]
pub struct ChannelDraw {
    pub g_hat_iu: Vec<CMatrix>,
    pub g_err_iu: Vec<CMatrix>,
    pub g_hat_eu: Vec<CMatrix>,
    pub g_err_eu: Vec<CMatrix>,
    pub seed: u64,
}

impl ChannelDraw {
    pub fn true_iu(&self, m: usize) -> CMatrix {
        &self.g_hat_iu[m] + &self.g_err_iu[m]
    }

    pub fn true_eu(&self, m: usize) -> CMatrix {
        &self.g_hat_eu[m] + &self.g_err_eu[m]
    }
}

fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let s = (0.5 * variance.max(0.0)).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn draw_block(rng: &mut impl Rng, n: usize, variances: impl Iterator<Item = f64>) -> CMatrix {
    let vars: Vec<f64> = variances.collect();
    let mut out = CMatrix::zeros(n, vars.len());
    for (j, &v) in vars.iter().enumerate() {
        for i in 0..n {
            out[(i, j)] = complex_gaussian(rng, v);
        }
    }
    out
}

/// Draw estimates and errors for every AP.
pub fn draw_channels(net: &NetworkRealization, n_antennas: usize, trial_seed: u64) -> ChannelDraw {
    let mut rng = rng_from(net.seed, &[seed::STREAM_CHANNEL, trial_seed]);
    let m = net.num_aps();
    let mut draw = ChannelDraw {
        g_hat_iu: Vec::with_capacity(m),
        g_err_iu: Vec::with_capacity(m),
        g_hat_eu: Vec::with_capacity(m),
        g_err_eu: Vec::with_capacity(m),
        seed: trial_seed,
    };
    for ap in 0..m {
        let g_iu = net.gamma_iu.row(ap);
        let b_iu = net.beta_iu.row(ap);
        let g_eu = net.gamma_eu.row(ap);
        let b_eu = net.beta_eu.row(ap);
        draw.g_hat_iu.push(draw_block(&mut rng, n_antennas, g_iu.iter().copied()));
        draw.g_err_iu.push(draw_block(
            &mut rng,
            n_antennas,
            b_iu.iter().zip(g_iu.iter()).map(|(b, g)| b - g),
        ));
        draw.g_hat_eu.push(draw_block(&mut rng, n_antennas, g_eu.iter().copied()));
        draw.g_err_eu.push(draw_block(
            &mut rng,
            n_antennas,
            b_eu.iter().zip(g_eu.iter()).map(|(b, g)| b - g),
        ));
    }
    draw
}

/// `(G^H G)^{-1} G^H` via Cholesky, with trace-scaled jitter on failure.
fn pseudo_inverse_factor(g: &CMatrix, ap: usize) -> Result<CMatrix> {
    let k = g.ncols();
    let gram = g.adjoint() * g;
    let chol = Cholesky::new(gram.clone()).or_else(|| {
        let trace: f64 = (0..k).map(|i| gram[(i, i)].re).sum();
        let jitter = 1e-12 * trace / k as f64;
        let mut reg = gram;
        for i in 0..k {
            reg[(i, i)] += Complex64::new(jitter, 0.0);
        }
        Cholesky::new(reg)
    });
    let chol = chol.ok_or(Error::RankDeficient { ap })?;
    Ok(chol.solve(&g.adjoint()))
}

/// Projection onto the orthogonal complement of the IU estimate columns.
pub fn projection_matrix(g_hat_iu_m: &CMatrix) -> Result<CMatrix> {
    let n = g_hat_iu_m.nrows();
    if g_hat_iu_m.ncols() == 0 {
        return Ok(CMatrix::identity(n, n));
    }
    let pinv = pseudo_inverse_factor(g_hat_iu_m, 0)?;
    Ok(CMatrix::identity(n, n) - g_hat_iu_m * pinv)
}

/// PZF precoders `sqrt((N - K_d) gamma_k) G (G^H G)^{-1} e_k`, one column per IU.
pub fn build_pzf(g_hat_iu_m: &CMatrix, gamma_row: &[f64]) -> Result<CMatrix> {
    let (n, k) = g_hat_iu_m.shape();
    if k == 0 {
        return Ok(CMatrix::zeros(n, 0));
    }
    if n <= k {
        return Err(Error::Domain(format!("PZF needs N > K_d, got N={n}, K_d={k}")));
    }
    let pinv = pseudo_inverse_factor(g_hat_iu_m, 0)?;
    // G (G^H G)^{-1} = pinv^H since the Gram matrix is Hermitian
    let mut w = pinv.adjoint();
    for (j, &gamma) in gamma_row.iter().enumerate() {
        let alpha = ((n - k) as f64 * gamma).sqrt();
        w.column_mut(j).scale_mut(alpha);
    }
    Ok(w)
}

/// PMRT precoders `B g_hat_l / sqrt((N - K_d) gamma_l)`, one column per EU.
pub fn build_pmrt(g_hat_eu_m: &CMatrix, g_hat_iu_m: &CMatrix, gamma_row: &[f64]) -> Result<CMatrix> {
    let (n, k) = g_hat_iu_m.shape();
    if n <= k {
        return Err(Error::Domain(format!("PMRT needs N > K_d, got N={n}, K_d={k}")));
    }
    let b = projection_matrix(g_hat_iu_m)?;
    let mut w = b * g_hat_eu_m;
    for (j, &gamma) in gamma_row.iter().enumerate() {
        let alpha = if gamma > 0.0 {
            1.0 / ((n - k) as f64 * gamma).sqrt()
        } else {
            0.0
        };
        w.column_mut(j).scale_mut(alpha);
    }
    Ok(w)
}

/// Precoders of every AP for one trial. Both sets are built for every AP so
/// that relaxed (fractional) modes can be evaluated too.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub w_i: Vec<CMatrix>,
    pub w_e: Vec<CMatrix>,
}

pub fn build_precoders(draw: &ChannelDraw, net: &NetworkRealization) -> Result<PrecoderSet> {
    let m = net.num_aps();
    let mut w_i = Vec::with_capacity(m);
    let mut w_e = Vec::with_capacity(m);
    for ap in 0..m {
        let gi: Vec<f64> = net.gamma_iu.row(ap).iter().copied().collect();
        let ge: Vec<f64> = net.gamma_eu.row(ap).iter().copied().collect();
        let tag = |e: Error| match e {
            Error::RankDeficient { .. } => Error::RankDeficient { ap },
            other => other,
        };
        w_i.push(build_pzf(&draw.g_hat_iu[ap], &gi).map_err(tag)?);
        w_e.push(build_pmrt(&draw.g_hat_eu[ap], &draw.g_hat_iu[ap], &ge).map_err(tag)?);
    }
    Ok(PrecoderSet { w_i, w_e })
}

const MAX_REDRAWS: u64 = 16;

/// Draw a trial and its precoders, redrawing on rank deficiency.
fn draw_trial(net: &NetworkRealization, n: usize, base_seed: u64, trial: u64) -> Result<(ChannelDraw, PrecoderSet)> {
    let mut last = None;
    for attempt in 0..MAX_REDRAWS {
        let trial_seed = seed::derive_seed(base_seed, &[trial, attempt]);
        let draw = draw_channels(net, n, trial_seed);
        match build_precoders(&draw, net) {
            Ok(w) => return Ok((draw, w)),
            Err(e @ Error::RankDeficient { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn power_weights(alloc: &Allocation, rho: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let ci = DMatrix::from_fn(alloc.eta_i.nrows(), alloc.eta_i.ncols(), |m, k| {
        (rho * alloc.a[m].clamp(0.0, 1.0) * alloc.eta_i[(m, k)].max(0.0)).sqrt()
    });
    let ce = DMatrix::from_fn(alloc.eta_e.nrows(), alloc.eta_e.ncols(), |m, l| {
        (rho * (1.0 - alloc.a[m].clamp(0.0, 1.0)) * alloc.eta_e[(m, l)].max(0.0)).sqrt()
    });
    (ci, ce)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn mean_and_var(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mut acc = Accumulator::default();
    values.clone().for_each(|v| acc.add(v));
    let mean = acc.total() / n as f64;
    let mut sq = Accumulator::default();
    values.for_each(|v| sq.add((v - mean) * (v - mean)));
    let var = if n > 1 { sq.total() / (n - 1) as f64 } else { 0.0 };
    (mean, var)
}

/// Per-trial effective gains seen by IU `k`.
struct SeTrial {
    /// `sum_m sqrt(rho a eta_mk) g_mk^H w_mk`, one entry per IU.
    desired: Vec<Complex64>,
    /// `|IUI_kk'|^2` flattened `[k][k']`, zero on the diagonal.
    iui: Vec<f64>,
    /// `|EUI_kl|^2` flattened `[k][l]`.
    eui: Vec<f64>,
}

fn se_trial(alloc: &Allocation, net: &NetworkRealization, draw: &ChannelDraw, w: &PrecoderSet, rho: f64) -> SeTrial {
    let (k_d, l) = (net.num_ius(), net.num_eus());
    let (ci, ce) = power_weights(alloc, rho);
    let mut to_iu = CMatrix::zeros(k_d, k_d);
    let mut to_eu = CMatrix::zeros(k_d, l);
    for m in 0..net.num_aps() {
        let g = draw.true_iu(m);
        let gi = g.adjoint() * &w.w_i[m];
        let ge = g.adjoint() * &w.w_e[m];
        for k in 0..k_d {
            for j in 0..k_d {
                to_iu[(k, j)] += gi[(k, j)] * ci[(m, j)];
            }
            for j in 0..l {
                to_eu[(k, j)] += ge[(k, j)] * ce[(m, j)];
            }
        }
    }
    let desired = (0..k_d).map(|k| to_iu[(k, k)]).collect();
    let iui = (0..k_d)
        .flat_map(|k| (0..k_d).map(move |j| (k, j)))
        .map(|(k, j)| if k == j { 0.0 } else { to_iu[(k, j)].norm_sqr() })
        .collect();
    let eui = to_eu.transpose().iter().map(|c| c.norm_sqr()).collect();
    SeTrial { desired, iui, eui }
}

/// Empirical hardening-bound terms and SE of every IU.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalSe {
    pub n_trials: usize,
    /// `|DS_k|^2`.
    pub desired_power: Vec<f64>,
    /// `E|BU_k|^2`.
    pub gain_uncertainty: Vec<f64>,
    /// `sum_{k' != k} E|IUI_kk'|^2`.
    pub inter_user: Vec<f64>,
    /// `E|EUI_kl|^2`, indexed `[k][l]`.
    pub energy_leakage: Vec<Vec<f64>>,
    pub sinr: Vec<f64>,
    pub se: Vec<f64>,
    /// Delta-method standard error of `se`; infinite for a single trial.
    pub se_std_err: Vec<f64>,
    /// Largest per-trial `|EUI_kl|^2` normalized by `rho (1 - a_m) eta_ml beta_mk` summed over APs.
    pub max_relative_leakage: f64,
}

pub fn empirical_se(
    alloc: &Allocation,
    net: &NetworkRealization,
    params: &SystemParams,
    n_trials: usize,
    base_seed: u64,
) -> Result<EmpiricalSe> {
    alloc.check(net, f64::INFINITY)?;
    if n_trials == 0 {
        return Err(Error::Domain("n_trials must be at least 1".into()));
    }
    let rho = params.rho();
    let (k_d, l) = (net.num_ius(), net.num_eus());
    let trials: Vec<SeTrial> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let (draw, w) = draw_trial(net, params.n, base_seed, t)?;
            Ok(se_trial(alloc, net, &draw, &w, rho))
        })
        .collect::<Result<_>>()?;

    // scale of the unprojected energy leakage toward each IU, per EU
    let leak_scale: Vec<f64> = (0..k_d * l)
        .map(|idx| {
            let (k, j) = (idx / l.max(1), idx % l.max(1));
            (0..net.num_aps())
                .map(|m| rho * (1.0 - alloc.a[m]) * alloc.eta_e[(m, j)] * net.beta_iu[(m, k)])
                .sum::<f64>()
        })
        .collect();
    let max_relative_leakage = trials
        .iter()
        .flat_map(|t| t.eui.iter().zip(&leak_scale).map(|(v, s)| if *s > 0.0 { v / s } else { 0.0 }))
        .fold(0.0, f64::max);

    let n = n_trials;
    let mut out = EmpiricalSe {
        n_trials,
        desired_power: Vec::with_capacity(k_d),
        gain_uncertainty: Vec::with_capacity(k_d),
        inter_user: Vec::with_capacity(k_d),
        energy_leakage: Vec::with_capacity(k_d),
        sinr: Vec::with_capacity(k_d),
        se: Vec::new(),
        se_std_err: Vec::with_capacity(k_d),
        max_relative_leakage,
    };
    for k in 0..k_d {
        let (mean_re, var_re) = mean_and_var(trials.iter().map(|t| t.desired[k].re), n);
        let (mean_im, var_im) = mean_and_var(trials.iter().map(|t| t.desired[k].im), n);
        let ds = mean_re * mean_re + mean_im * mean_im;
        let bu = var_re + var_im;
        let (iui, iui_var) = mean_and_var(
            trials.iter().map(|t| t.iui[k * k_d..(k + 1) * k_d].iter().sum::<f64>()),
            n,
        );
        let leak: Vec<f64> = (0..l)
            .map(|j| mean_and_var(trials.iter().map(|t| t.eui[k * l + j]), n).0)
            .collect();
        let (eui_total, eui_var) =
            mean_and_var(trials.iter().map(|t| t.eui[k * l..(k + 1) * l].iter().sum::<f64>()), n);
        let denom = bu + iui + eui_total + 1.0;
        let sinr = ds / denom;

        let se_err = if n > 1 {
            let nf = n as f64;
            let ds_err = 2.0 * ds.sqrt() * (bu / nf).sqrt();
            let denom_err = ((2.0 * bu * bu / (nf - 1.0)) + (iui_var + eui_var) / nf).sqrt();
            let sinr_err = sinr * ((ds_err / ds.max(f64::MIN_POSITIVE)).powi(2) + (denom_err / denom).powi(2)).sqrt();
            params.prelog() / std::f64::consts::LN_2 * sinr_err / (1.0 + sinr)
        } else {
            f64::INFINITY
        };

        out.desired_power.push(ds);
        out.gain_uncertainty.push(bu);
        out.inter_user.push(iui);
        out.energy_leakage.push(leak);
        out.sinr.push(sinr);
        out.se_std_err.push(se_err);
    }
    out.se = se_per_iu(&out.sinr, params);
    Ok(out)
}

/// Sample mean and standard error per EU, in watt-symbols.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalEnergy {
    pub n_trials: usize,
    pub q: Vec<f64>,
    pub std_err: Vec<f64>,
}

pub fn empirical_energy(
    alloc: &Allocation,
    net: &NetworkRealization,
    params: &SystemParams,
    n_trials: usize,
    base_seed: u64,
) -> Result<EmpiricalEnergy> {
    alloc.check(net, f64::INFINITY)?;
    if n_trials == 0 {
        return Err(Error::Domain("n_trials must be at least 1".into()));
    }
    let rho = params.rho();
    let l = net.num_eus();
    let (ci, ce) = power_weights(alloc, rho);
    let trials: Vec<Vec<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let (draw, w) = draw_trial(net, params.n, base_seed, t)?;
            let mut energy = vec![0.0; l];
            for m in 0..net.num_aps() {
                let g = draw.true_eu(m);
                let gi = g.adjoint() * &w.w_i[m];
                let ge = g.adjoint() * &w.w_e[m];
                for (j, e) in energy.iter_mut().enumerate() {
                    for k in 0..gi.ncols() {
                        *e += ci[(m, k)].powi(2) * gi[(j, k)].norm_sqr();
                    }
                    for s in 0..ge.ncols() {
                        *e += ce[(m, s)].powi(2) * ge[(j, s)].norm_sqr();
                    }
                }
            }
            Ok(energy)
        })
        .collect::<Result<_>>()?;
    let scale = params.energy_scale();
    let mut q = Vec::with_capacity(l);
    let mut std_err = Vec::with_capacity(l);
    for j in 0..l {
        let (mean, var) = mean_and_var(trials.iter().map(|e| e[j]), n_trials);
        q.push(scale * (mean + 1.0));
        std_err.push(if n_trials > 1 {
            scale * (var / n_trials as f64).sqrt()
        } else {
            f64::INFINITY
        });
    }
    Ok(EmpiricalEnergy { n_trials, q, std_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{q_closed_form, sinr_closed_form};

    fn setup() -> (SystemParams, NetworkRealization) {
        let p = SystemParams::reference(6, 10, 3, 5);
        let net = NetworkRealization::generate(&p, 21).unwrap();
        (p, net)
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn perfect_estimation_has_no_error() {
        let (p, net) = setup();
        let draw = draw_channels(&net.with_perfect_csi(), p.n, 3);
        assert!(draw.g_err_iu.iter().chain(&draw.g_err_eu).all(|m| max_abs(m) == 0.0));
    }

    #[test]
    fn draws_are_deterministic() {
        let (p, net) = setup();
        let a = draw_channels(&net, p.n, 9);
        let b = draw_channels(&net, p.n, 9);
        assert_eq!(a.g_hat_iu, b.g_hat_iu);
        assert_eq!(a.g_err_eu, b.g_err_eu);
        assert_ne!(a.g_hat_iu, draw_channels(&net, p.n, 10).g_hat_iu);
    }

    #[test]
    fn estimate_variance_matches_gamma() {
        let (p, net) = setup();
        let trials = 10_000;
        let mut acc = 0.0;
        let mut cross = Complex64::new(0.0, 0.0);
        for t in 0..trials {
            let d = draw_channels(&net, p.n, t);
            acc += d.g_hat_iu[0].column(0).norm_squared() / p.n as f64;
            cross += (d.g_hat_iu[0].column(0).adjoint() * d.g_err_iu[0].column(0))[(0, 0)];
        }
        let gamma = net.gamma_iu[(0, 0)];
        let rel = acc / trials as f64 / gamma - 1.0;
        assert!(rel.abs() < 0.03, "relative error {rel}");
        let err_sd = (gamma * (net.beta_iu[(0, 0)] - gamma) * p.n as f64).sqrt();
        assert!(cross.norm() / trials as f64 <= 5.0 * err_sd / (trials as f64).sqrt());
    }

    #[test]
    fn pzf_zero_forces_and_normalizes() {
        let (p, net) = setup();
        let d = draw_channels(&net, p.n, 1);
        let gi: Vec<f64> = net.gamma_iu.row(2).iter().copied().collect();
        let w = build_pzf(&d.g_hat_iu[2], &gi).unwrap();
        let gains = d.g_hat_iu[2].adjoint() * &w;
        for k in 0..3 {
            let alpha = ((p.n - p.k_d) as f64 * gi[k]).sqrt();
            assert!((gains[(k, k)] - Complex64::new(alpha, 0.0)).norm() <= 1e-9 * alpha);
            for j in (0..3).filter(|&j| j != k) {
                assert!(gains[(j, k)].norm() <= 1e-9 * alpha);
            }
        }
    }

    #[test]
    fn pzf_single_user_is_mrt_direction() {
        let g = CMatrix::from_fn(4, 1, |i, _| Complex64::new(i as f64 + 1.0, 0.5 - i as f64));
        let w = build_pzf(&g, &[2.0]).unwrap();
        let cos = (g.adjoint() * &w)[(0, 0)].norm() / (g.norm() * w.norm());
        assert!((cos - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmrt_is_protected() {
        let (p, net) = setup();
        let d = draw_channels(&net, p.n, 4);
        for m in 0..p.m {
            let ge: Vec<f64> = net.gamma_eu.row(m).iter().copied().collect();
            let w = build_pmrt(&d.g_hat_eu[m], &d.g_hat_iu[m], &ge).unwrap();
            let leak = d.g_hat_iu[m].adjoint() * &w;
            let scale = d.g_hat_iu[m].norm() * w.norm();
            assert!(max_abs(&leak) <= 1e-12 * scale);
            let b = projection_matrix(&d.g_hat_iu[m]).unwrap();
            assert!(max_abs(&(&b * &b - &b)) <= 1e-9);
        }
    }

    #[test]
    fn pmrt_without_ius_is_mrt() {
        let g = CMatrix::from_fn(5, 2, |i, j| Complex64::new(i as f64 - j as f64, 1.0 + j as f64));
        let w = build_pmrt(&g, &CMatrix::zeros(5, 0), &[1.0, 4.0]).unwrap();
        let expected = CMatrix::from_fn(5, 2, |i, j| g[(i, j)] / (5.0 * [1.0f64, 4.0][j]).sqrt());
        assert!(max_abs(&(w - expected)) < 1e-15);
    }

    #[test]
    fn pmrt_normalization() {
        let (p, net) = setup();
        let trials = 10_000;
        let mut acc = 0.0;
        for t in 0..trials {
            let d = draw_channels(&net, p.n, t);
            let ge: Vec<f64> = net.gamma_eu.row(1).iter().copied().collect();
            let w = build_pmrt(&d.g_hat_eu[1], &d.g_hat_iu[1], &ge).unwrap();
            acc += w.column(0).norm_squared();
        }
        let mean = acc / trials as f64;
        assert!((mean - 1.0).abs() < 0.03, "mean {mean}");
    }

    #[test]
    fn perfect_csi_kills_energy_leakage() {
        let (p, net) = setup();
        let net = net.with_perfect_csi();
        let alloc = Allocation::uniform(&[1.0, 0.0, 1.0, 0.0, 0.0, 1.0], 3, 5);
        let est = empirical_se(&alloc, &net, &p, 200, 1).unwrap();
        assert!(est.max_relative_leakage <= 1e-12, "{}", est.max_relative_leakage);
    }

    #[test]
    fn single_trial_is_finite() {
        let (p, net) = setup();
        let alloc = Allocation::uniform(&[1.0, 0.0, 1.0, 0.0, 0.0, 1.0], 3, 5);
        let est = empirical_se(&alloc, &net, &p, 1, 1).unwrap();
        assert!(est.se.iter().all(|s| s.is_finite()));
        assert!(est.se_std_err.iter().all(|s| *s == f64::INFINITY));
        let e = empirical_energy(&alloc, &net, &p, 1, 1).unwrap();
        assert!(e.q.iter().all(|q| q.is_finite()));
        assert!(empirical_se(&alloc, &net, &p, 0, 1).is_err());
    }

    #[test]
    fn zero_power_energy_is_noise_floor() {
        let (p, net) = setup();
        let e = empirical_energy(&Allocation::zeros(6, 3, 5), &net, &p, 50, 2).unwrap();
        for q in e.q {
            assert_eq!(q, p.energy_scale());
        }
    }

    #[test]
    fn coherent_mrt_moment() {
        // K_d = 0, one energy AP serving one EU: E|g^H w|^2 = (N + 1) gamma + (beta - gamma)
        let mut p = SystemParams::reference(1, 8, 0, 1);
        p.tau = 1;
        let net = NetworkRealization::generate(&p, 6).unwrap();
        let alloc = Allocation::uniform(&[0.0], 0, 1);
        let trials = 20_000;
        let e = empirical_energy(&alloc, &net, &p, trials, 5).unwrap();
        let (b, g) = (net.beta_eu[(0, 0)], net.gamma_eu[(0, 0)]);
        let expected = p.energy_scale() * (p.rho() * (9.0 * g + b - g) + 1.0);
        let err = (e.q[0] - expected).abs();
        assert!(err <= 4.0 * e.std_err[0], "err {err} vs se {}", e.std_err[0]);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (p, net) = setup();
        let alloc = Allocation::uniform(&[1.0, 0.0, 1.0, 0.0, 0.0, 1.0], 3, 5);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| empirical_se(&alloc, &net, &p, 300, 4).unwrap());
        let parallel = empirical_se(&alloc, &net, &p, 300, 4).unwrap();
        assert_eq!(serial.se, parallel.se);
    }

    #[test]
    fn errors_shrink_with_trials() {
        let (p, net) = setup();
        let alloc = Allocation::uniform(&[1.0, 0.0, 1.0, 0.0, 0.0, 1.0], 3, 5);
        let closed = q_closed_form(&alloc, &net, &p);
        let sinr = sinr_closed_form(&alloc, &net, &p).unwrap();
        let closed_se = se_per_iu(&sinr, &p);
        let rel_err = |n: usize| {
            let e = empirical_energy(&alloc, &net, &p, n, 77).unwrap();
            let s = empirical_se(&alloc, &net, &p, n, 77).unwrap();
            let qe = e.q.iter().zip(&closed).map(|(a, b)| (a / b - 1.0).abs()).fold(0.0, f64::max);
            let se = s.se.iter().zip(&closed_se).map(|(a, b)| (a / b - 1.0).abs()).fold(0.0, f64::max);
            qe.max(se)
        };
        let (e2, e3, e4) = (rel_err(100), rel_err(1_000), rel_err(10_000));
        assert!(e2 > e3 && e3 > e4, "{e2} {e3} {e4}");
    }
}
