#![allow(dead_code)]

use nalgebra::DMatrix;
use swipt_core::network::{estimation_variances, path_loss_db};
use swipt_core::{NetworkRealization, SystemParams};

/// Reference constants with `N = 10` and the given targets.
pub fn params(m: usize, k_d: usize, l: usize, he_target: f64) -> SystemParams {
    SystemParams::reference(m, 10, k_d, l).with_he_target(he_target)
}

pub fn drop(params: &SystemParams, seed: u64) -> NetworkRealization {
    NetworkRealization::generate(params, seed).unwrap()
}

/// Drop without shadowing from explicit AP-user distances (metres).
pub fn drop_from_distances(params: &SystemParams, d_iu: &[&[f64]], d_eu: &[&[f64]]) -> NetworkRealization {
    let m = d_iu.len().max(d_eu.len());
    let gain = |d: f64| 10f64.powf(path_loss_db(d) / 10.0);
    let beta = |d: &[&[f64]], cols: usize| DMatrix::from_fn(m, cols, |i, j| gain(d[i][j]));
    let k = d_iu.first().map_or(0, |r| r.len());
    let l = d_eu.first().map_or(0, |r| r.len());
    let net = NetworkRealization {
        ap_positions: vec![[0.0, 0.0]; m],
        iu_positions: vec![[0.0, 0.0]; k],
        eu_positions: vec![[0.0, 0.0]; l],
        beta_iu: beta(d_iu, k),
        beta_eu: beta(d_eu, l),
        gamma_iu: DMatrix::zeros(m, k),
        gamma_eu: DMatrix::zeros(m, l),
        seed: 0,
    };
    estimation_variances(net, params)
}
