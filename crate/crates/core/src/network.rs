//! Random network drops and large-scale channel statistics.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ShadowingModel, SystemParams};
use crate::seed::{self, rng_from};

/// Distances below this are clamped before evaluating the path-loss law.
pub const MIN_DISTANCE_M: f64 = 1.0;

pub type Position = [f64; 2];

/// Node positions of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub area_side: f64,
    pub aps: Vec<Position>,
    pub ius: Vec<Position>,
    pub eus: Vec<Position>,
    pub seed: u64,
}

impl Topology {
    /// User positions with the IUs first, then the EUs.
    pub fn users(&self) -> impl Iterator<Item = &Position> {
        self.ius.iter().chain(self.eus.iter())
    }
}

/// One random drop with every large-scale quantity filled in.
///
/// Matrices are indexed `[(ap, user)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub ap_positions: Vec<Position>,
    pub iu_positions: Vec<Position>,
    pub eu_positions: Vec<Position>,
    pub beta_iu: DMatrix<f64>,
    pub beta_eu: DMatrix<f64>,
    pub gamma_iu: DMatrix<f64>,
    pub gamma_eu: DMatrix<f64>,
    pub seed: u64,
}

/// Distance on the torus obtained by wrapping the square's edges.
pub fn torus_distance(p: &Position, q: &Position, side: f64) -> f64 {
    let wrap = |d: f64| {
        let d = d.abs() % side;
        d.min(side - d)
    };
    wrap(p[0] - q[0]).hypot(wrap(p[1] - q[1]))
}

/// Path loss in dB at `distance` meters, clamped at [`MIN_DISTANCE_M`].
pub fn path_loss_db(distance: f64) -> f64 {
    -30.5 - 36.7 * distance.max(MIN_DISTANCE_M).log10()
}

pub fn generate_topology(params: &SystemParams, seed: u64) -> Topology {
    let mut rng = rng_from(seed, &[seed::STREAM_TOPOLOGY]);
    let side = params.area_side;
    let mut draw = |n: usize| -> Vec<Position> {
        (0..n)
            .map(|_| {
                let x: f64 = rng.random::<f64>() * side;
                let y: f64 = rng.random::<f64>() * side;
                // random::<f64>() is in [0, 1); the product can only round up to side
                [if x < side { x } else { 0.0 }, if y < side { y } else { 0.0 }]
            })
            .collect()
    };
    let aps = draw(params.m);
    let ius = draw(params.k_d);
    let eus = draw(params.l);
    Topology {
        area_side: side,
        aps,
        ius,
        eus,
        seed,
    }
}

fn gaussian_field(
    points: &[&Position],
    side: f64,
    decorrelation_m: f64,
    rng: &mut impl Rng,
) -> DVector<f64> {
    let n = points.len();
    let white = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    if n == 0 {
        return white;
    }
    let cov = DMatrix::from_fn(n, n, |i, j| {
        2f64.powf(-torus_distance(points[i], points[j], side) / decorrelation_m)
    });
    // co-located points make the covariance singular, so use a symmetric
    // square root instead of a Cholesky factor
    let eig = cov.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    root * white
}

/// Shadowing in dB, shape `[M x (K_d + L)]` with IU columns first.
pub fn draw_shadowing(topology: &Topology, params: &SystemParams, seed: u64) -> DMatrix<f64> {
    let m = topology.aps.len();
    let users: Vec<&Position> = topology.users().collect();
    let k = users.len();
    let sigma = params.shadow_sigma_db;
    let mut rng = rng_from(seed, &[seed::STREAM_SHADOWING]);
    if sigma == 0.0 {
        return DMatrix::zeros(m, k);
    }
    match params.shadowing {
        ShadowingModel::Independent => {
            DMatrix::from_fn(m, k, |_, _| sigma * rng.sample::<f64, _>(StandardNormal))
        }
        ShadowingModel::Correlated {
            delta,
            decorrelation_m,
        } => {
            let aps: Vec<&Position> = topology.aps.iter().collect();
            let ap_field = gaussian_field(&aps, topology.area_side, decorrelation_m, &mut rng);
            let ue_field = gaussian_field(&users, topology.area_side, decorrelation_m, &mut rng);
            let (wa, wb) = (delta.sqrt(), (1.0 - delta).sqrt());
            DMatrix::from_fn(m, k, |i, j| sigma * (wa * ap_field[i] + wb * ue_field[j]))
        }
    }
}

/// Large-scale fading `beta = 10^(PL/10) 10^(F/10)` for every link.
/// The estimation variances are left at zero; see [`estimation_variances`].
pub fn compute_large_scale(
    topology: &Topology,
    shadowing: &DMatrix<f64>,
    params: &SystemParams,
) -> Result<NetworkRealization> {
    let m = topology.aps.len();
    let (k, l) = (topology.ius.len(), topology.eus.len());
    if shadowing.nrows() != m || shadowing.ncols() != k + l {
        return Err(Error::Dimension(format!(
            "shadowing is {}x{}, expected {}x{}",
            shadowing.nrows(),
            shadowing.ncols(),
            m,
            k + l
        )));
    }
    let beta = |ap: &Position, user: &Position, f_db: f64| {
        let d = torus_distance(ap, user, params.area_side);
        10f64.powf((path_loss_db(d) + f_db) / 10.0)
    };
    let beta_iu = DMatrix::from_fn(m, k, |i, j| beta(&topology.aps[i], &topology.ius[j], shadowing[(i, j)]));
    let beta_eu = DMatrix::from_fn(m, l, |i, j| {
        beta(&topology.aps[i], &topology.eus[j], shadowing[(i, k + j)])
    });
    Ok(NetworkRealization {
        ap_positions: topology.aps.clone(),
        iu_positions: topology.ius.clone(),
        eu_positions: topology.eus.clone(),
        gamma_iu: DMatrix::zeros(m, k),
        gamma_eu: DMatrix::zeros(m, l),
        beta_iu,
        beta_eu,
        seed: topology.seed,
    })
}

/// MMSE estimate variance `tau rho_t beta^2 / (tau rho_t beta + 1)`.
pub fn mmse_variance(beta: f64, tau_rho_t: f64) -> f64 {
    let snr = tau_rho_t * beta;
    if snr.is_infinite() {
        return beta;
    }
    beta * (snr / (snr + 1.0))
}

pub fn estimation_variances(mut net: NetworkRealization, params: &SystemParams) -> NetworkRealization {
    let tau_rho_t = params.tau as f64 * params.rho_t();
    net.gamma_iu = net.beta_iu.map(|b| mmse_variance(b, tau_rho_t));
    net.gamma_eu = net.beta_eu.map(|b| mmse_variance(b, tau_rho_t));
    net
}

impl NetworkRealization {
    /// Full drop pipeline: topology, shadowing, large-scale fading, estimation.
    pub fn generate(params: &SystemParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let topology = generate_topology(params, seed);
        let shadowing = draw_shadowing(&topology, params, seed);
        let net = compute_large_scale(&topology, &shadowing, params)?;
        Ok(estimation_variances(net, params))
    }

    pub fn num_aps(&self) -> usize {
        self.beta_iu.nrows()
    }

    pub fn num_ius(&self) -> usize {
        self.beta_iu.ncols()
    }

    pub fn num_eus(&self) -> usize {
        self.beta_eu.ncols()
    }

    /// Copy with `gamma = beta` on every link (error-free channel estimates).
    pub fn with_perfect_csi(&self) -> Self {
        NetworkRealization {
            gamma_iu: self.beta_iu.clone(),
            gamma_eu: self.beta_eu.clone(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RealizationRecord::from(self)).expect("realization serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: RealizationRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        record.try_into()
    }
}

/// Row-major text representation used for replay files.
#[derive(Serialize, Deserialize)]
struct RealizationRecord {
    format: String,
    seed: u64,
    ap_positions: Vec<Position>,
    iu_positions: Vec<Position>,
    eu_positions: Vec<Position>,
    beta_iu: Vec<Vec<f64>>,
    beta_eu: Vec<Vec<f64>>,
    gamma_iu: Vec<Vec<f64>>,
    gamma_eu: Vec<Vec<f64>>,
}

const RECORD_FORMAT: &str = "swipt-realization/1";

fn rows(mat: &DMatrix<f64>) -> Vec<Vec<f64>> {
    mat.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], nrows: usize, ncols: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Dimension(format!("{name} must be {nrows}x{ncols}")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

impl From<&NetworkRealization> for RealizationRecord {
    fn from(net: &NetworkRealization) -> Self {
        RealizationRecord {
            format: RECORD_FORMAT.to_string(),
            seed: net.seed,
            ap_positions: net.ap_positions.clone(),
            iu_positions: net.iu_positions.clone(),
            eu_positions: net.eu_positions.clone(),
            beta_iu: rows(&net.beta_iu),
            beta_eu: rows(&net.beta_eu),
            gamma_iu: rows(&net.gamma_iu),
            gamma_eu: rows(&net.gamma_eu),
        }
    }
}

impl TryFrom<RealizationRecord> for NetworkRealization {
    type Error = Error;

    fn try_from(r: RealizationRecord) -> Result<Self> {
        if r.format != RECORD_FORMAT {
            return Err(Error::Parse(format!("unsupported format tag {:?}", r.format)));
        }
        let (m, k, l) = (r.ap_positions.len(), r.iu_positions.len(), r.eu_positions.len());
        Ok(NetworkRealization {
            beta_iu: from_rows(&r.beta_iu, m, k, "beta_iu")?,
            beta_eu: from_rows(&r.beta_eu, m, l, "beta_eu")?,
            gamma_iu: from_rows(&r.gamma_iu, m, k, "gamma_iu")?,
            gamma_eu: from_rows(&r.gamma_eu, m, l, "gamma_eu")?,
            ap_positions: r.ap_positions,
            iu_positions: r.iu_positions,
            eu_positions: r.eu_positions,
            seed: r.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> SystemParams {
        SystemParams::reference(20, 10, 3, 5)
    }

    #[test]
    fn topology_fits_square() {
        let t = generate_topology(&params(), 1);
        assert_eq!(t.aps.len() + t.ius.len() + t.eus.len(), 28);
        for p in t.aps.iter().chain(t.users()) {
            assert!((0.0..500.0).contains(&p[0]) && (0.0..500.0).contains(&p[1]));
        }
    }

    #[test]
    fn topology_is_deterministic() {
        assert_eq!(generate_topology(&params(), 1), generate_topology(&params(), 1));
        assert_ne!(generate_topology(&params(), 1), generate_topology(&params(), 2));
    }

    #[test]
    fn wraparound_distance() {
        let d = torus_distance(&[0.0, 1.0], &[0.0, 499.0], 500.0);
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_values() {
        assert!((path_loss_db(1.0) + 30.5).abs() < 1e-12);
        assert!((path_loss_db(10.0) + 67.2).abs() < 1e-12);
        assert!((path_loss_db(100.0) + 103.9).abs() < 1e-12);
        assert_eq!(path_loss_db(0.01), path_loss_db(1.0));
    }

    fn single_link(d: f64, f_db: f64) -> f64 {
        let p = SystemParams::reference(1, 2, 1, 0);
        let topo = Topology {
            area_side: 500.0,
            aps: vec![[0.0, 0.0]],
            ius: vec![[d, 0.0]],
            eus: vec![],
            seed: 0,
        };
        let f = DMatrix::from_element(1, 1, f_db);
        compute_large_scale(&topo, &f, &p).unwrap().beta_iu[(0, 0)]
    }

    #[test]
    fn large_scale_values() {
        assert!((single_link(1.0, 0.0) / 10f64.powf(-3.05) - 1.0).abs() < 1e-12);
        let ratio = single_link(20.0, 0.0) / single_link(10.0, 0.0);
        assert!((ratio / 2f64.powf(-3.67) - 1.0).abs() < 1e-12);
        let up = single_link(37.0, 4.0) / single_link(37.0, 0.0);
        assert!((up / 10f64.powf(0.4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shadowing_dimension_mismatch() {
        let p = params();
        let t = generate_topology(&p, 3);
        let f = DMatrix::zeros(3, 3);
        assert!(matches!(compute_large_scale(&t, &f, &p), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_sigma_gives_zero_shadowing() {
        let mut p = params();
        p.shadow_sigma_db = 0.0;
        let t = generate_topology(&p, 4);
        assert!(draw_shadowing(&t, &p, 4).iter().all(|&f| f == 0.0));
        p.shadowing = ShadowingModel::correlated_default();
        assert!(draw_shadowing(&t, &p, 4).iter().all(|&f| f == 0.0));
    }

    #[test]
    fn shadowing_variance() {
        // 10^5 samples of a 4 dB log-normal: sample variance within 16 +- 0.5
        let p = SystemParams::reference(500, 10, 100, 100);
        let mut samples = Vec::new();
        for s in 0..1 {
            let t = generate_topology(&p, s);
            samples.extend(draw_shadowing(&t, &p, s).iter().copied());
        }
        let n = samples.len() as f64;
        assert_eq!(samples.len(), 100_000);
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - 16.0).abs() < 0.5, "variance {var}");
    }

    #[test]
    fn correlated_shadowing_colocated_users() {
        let mut p = SystemParams::reference(4, 10, 2, 0);
        p.shadowing = ShadowingModel::correlated_default();
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        let mut marginal = Vec::new();
        for s in 0..4000u64 {
            let mut t = generate_topology(&p, s);
            t.ius[1] = t.ius[0];
            let f = draw_shadowing(&t, &p, s);
            let (x, y) = (f[(0, 0)], f[(0, 1)]);
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            marginal.push(x);
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!((corr - 1.0).abs() < 1e-9, "corr {corr}");
        let var = marginal.iter().map(|x| x * x).sum::<f64>() / marginal.len() as f64;
        assert!((var - 16.0).abs() < 1.5, "variance {var}");
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(mmse_variance(0.0, 1e4), 0.0);
        assert!((mmse_variance(1e-4, 1e4) - 5e-5).abs() < 1e-18);
        assert_eq!(mmse_variance(3e-7, f64::INFINITY), 3e-7);
        let b = 2e-3;
        assert!((mmse_variance(b, 1e30) / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn realization_replay_is_exact() {
        let net = NetworkRealization::generate(&SystemParams::reference(6, 10, 3, 5), 99).unwrap();
        let text = net.to_json();
        assert_eq!(NetworkRealization::from_json(&text).unwrap(), net);
        assert_eq!(net.to_json(), text);
    }

    proptest! {
        #[test]
        fn gamma_bounded_and_monotone(b1 in 1e-14f64..1e-1, b2 in 1e-14f64..1e-1, snr in 1e-3f64..1e14) {
            let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
            let (g_lo, g_hi) = (mmse_variance(lo, snr), mmse_variance(hi, snr));
            prop_assert!(g_lo <= g_hi);
            prop_assert!(g_lo >= 0.0 && g_lo <= lo);
            prop_assert!(mmse_variance(lo, snr) <= mmse_variance(lo, snr * 2.0));
        }

        #[test]
        fn torus_distance_is_a_metric(
            a in prop::array::uniform2(0.0f64..500.0),
            b in prop::array::uniform2(0.0f64..500.0),
            c in prop::array::uniform2(0.0f64..500.0),
        ) {
            let d = |p: &Position, q: &Position| torus_distance(p, q, 500.0);
            prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-12);
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
            prop_assert!(d(&a, &a) == 0.0);
            prop_assert!(d(&a, &b) <= 500.0 * std::f64::consts::FRAC_1_SQRT_2 + 1e-9);
        }

        #[test]
        fn realization_invariants(seed in 0u64..1000) {
            let p = SystemParams::reference(5, 10, 3, 5);
            let net = NetworkRealization::generate(&p, seed).unwrap();
            prop_assert_eq!(&net, &NetworkRealization::generate(&p, seed).unwrap());
            for (b, g) in net.beta_iu.iter().zip(net.gamma_iu.iter())
                .chain(net.beta_eu.iter().zip(net.gamma_eu.iter())) {
                prop_assert!(*b > 0.0);
                prop_assert!(*g >= 0.0 && g / b < 1.0);
            }
        }
    }
}
