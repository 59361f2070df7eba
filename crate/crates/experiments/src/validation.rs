//! Closed-form metrics against Monte-Carlo estimates on one drop.

use std::path::Path;

use serde::{Deserialize, Serialize};
use swipt_core::metrics::evaluate;
use swipt_core::montecarlo::{empirical_energy, empirical_se};
use swipt_core::seed::{derive_seed, STREAM_CHANNEL};
use swipt_core::{Allocation, NetworkRealization, SystemParams};
use swipt_sca::benchmark1;

use crate::error::Result;

pub const VALIDATION_SCHEMA: &str = "# swipt validation v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    /// `se` (bit/s/Hz), `q` (W) or `eui_perfect_csi` (largest per-trial
    /// leakage relative to its unprotected scale).
    pub quantity: String,
    pub user: usize,
    pub closed_form: f64,
    pub empirical: f64,
    pub rel_err: f64,
    pub std_err: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub allocation: Allocation,
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn max_rel_err(&self, quantity: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| r.rel_err)
            .fold(0.0, f64::max)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        std::io::Write::write_all(&mut file, format!("{VALIDATION_SCHEMA}\n").as_bytes())?;
        let mut w = csv::Writer::from_writer(file);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Random binary modes (at least one AP per mode) at full uniform power on
/// the drop `seed`; compares per-IU SE and per-EU received energy with their
/// empirical counterparts and checks that energy beams leave no residue at
/// the IUs under perfect CSI.
pub fn run_validation(params: &SystemParams, n_trials: usize, seed: u64) -> Result<ValidationReport> {
    let net = NetworkRealization::generate(params, seed)?;
    let alloc = benchmark1(&net, params, 0)?.allocation;
    let closed = evaluate(&alloc, &net, params)?;
    let mc_seed = derive_seed(seed, &[STREAM_CHANNEL]);
    let se = empirical_se(&alloc, &net, params, n_trials, mc_seed)?;
    let energy = empirical_energy(&alloc, &net, params, n_trials, mc_seed)?;
    let perfect = empirical_se(&alloc, &net.with_perfect_csi(), params, n_trials, mc_seed)?;

    let rel = |c: f64, e: f64| (e - c).abs() / c.abs();
    let mut rows = Vec::new();
    for (k, (&c, &e)) in closed.se_per_iu.iter().zip(&se.se).enumerate() {
        rows.push(ValidationRow {
            quantity: "se".into(),
            user: k,
            closed_form: c,
            empirical: e,
            rel_err: rel(c, e),
            std_err: se.se_std_err[k],
            n_trials,
        });
    }
    for (l, (&c, &e)) in closed.q_per_eu.iter().zip(&energy.q).enumerate() {
        rows.push(ValidationRow {
            quantity: "q".into(),
            user: l,
            closed_form: c,
            empirical: e,
            rel_err: rel(c, e),
            std_err: energy.std_err[l],
            n_trials,
        });
    }
    rows.push(ValidationRow {
        quantity: "eui_perfect_csi".into(),
        user: 0,
        closed_form: 0.0,
        empirical: perfect.max_relative_leakage,
        rel_err: perfect.max_relative_leakage,
        std_err: 0.0,
        n_trials,
    });
    Ok(ValidationReport { allocation: alloc, rows })
}
