//! Sweep runner: every sweep point times every drop, each scheme on the same
//! drop.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use swipt_core::seed::derive_seed;
use swipt_core::{NetworkRealization, SystemParams};
use swipt_sca::{
    benchmark1, benchmark2_solve, benchmark3_solve, brute_force_oracle, proposed, Scheme, SolveOutcome,
};

use crate::config::ExperimentSpec;
use crate::error::Result;

/// First line of `results.csv`.
pub const RESULTS_SCHEMA: &str = "# swipt results v1";
/// First line of `aggregates.csv`.
pub const AGGREGATES_SCHEMA: &str = "# swipt aggregates v1";

/// One scheme on one drop. Wall time is kept out so that files are
/// reproducible byte for byte; it goes to `run.log`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep_value: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub scheme: String,
    pub drop: usize,
    pub drop_seed: u64,
    pub status: String,
    pub feasible: bool,
    #[serde(rename = "sum_phi_uW")]
    pub sum_phi_uw: f64,
    #[serde(rename = "relaxed_sum_phi_uW")]
    pub relaxed_sum_phi_uw: f64,
    pub min_se_bps_hz: f64,
    /// Per-IU SE, `;`-separated.
    pub se_bps_hz: String,
    /// Per-user QoS flags as `0`/`1` strings, IUs then EUs.
    pub feasible_se: String,
    pub feasible_he: String,
    pub iterations: usize,
    pub phase1_iterations: usize,
    pub flips: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub sweep_value: usize,
    pub scheme: String,
    pub n_drops: usize,
    pub n_feasible: usize,
    pub feasibility_rate: f64,
    /// Mean over feasible drops; NaN when none is feasible.
    #[serde(rename = "mean_sum_phi_uW")]
    pub mean_sum_phi_uw: f64,
    /// Standard error of that mean; 0 for a single feasible drop.
    #[serde(rename = "stderr_sum_phi_uW")]
    pub stderr_sum_phi_uw: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub name: String,
    pub note: String,
    pub sweep_label: String,
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<Aggregate>,
    pub log: Vec<String>,
}

fn flags(v: &[bool]) -> String {
    v.iter().map(|&f| if f { '1' } else { '0' }).collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn row_from(value: usize, params: &SystemParams, drop: usize, seed: u64, out: &SolveOutcome) -> ResultRow {
    let se = &out.metrics.se_per_iu;
    ResultRow {
        sweep_value: value,
        m: params.m,
        n: params.n,
        scheme: out.scheme.name().into(),
        drop,
        drop_seed: seed,
        status: out.status.name().into(),
        feasible: out.is_feasible(),
        sum_phi_uw: out.objective_sum_he * 1e6,
        relaxed_sum_phi_uw: out.relaxed_objective * 1e6,
        min_se_bps_hz: if se.is_empty() { f64::NAN } else { out.metrics.min_se() },
        se_bps_hz: join(se),
        feasible_se: flags(&out.metrics.feasible_se),
        feasible_he: flags(&out.metrics.feasible_he),
        iterations: out.iterations,
        phase1_iterations: out.phase1_iterations,
        flips: join(&out.flips),
    }
}

fn error_row(value: usize, params: &SystemParams, scheme: Scheme, drop: usize, seed: u64) -> ResultRow {
    ResultRow {
        sweep_value: value,
        m: params.m,
        n: params.n,
        scheme: scheme.name().into(),
        drop,
        drop_seed: seed,
        status: "error".into(),
        feasible: false,
        sum_phi_uw: f64::NAN,
        relaxed_sum_phi_uw: f64::NAN,
        min_se_bps_hz: f64::NAN,
        se_bps_hz: String::new(),
        feasible_se: String::new(),
        feasible_he: String::new(),
        iterations: 0,
        phase1_iterations: 0,
        flips: String::new(),
    }
}

/// Runs one scheme; benchmark 2 reuses benchmark 1's random modes.
pub fn run_scheme(scheme: Scheme, net: &NetworkRealization, params: &SystemParams) -> swipt_sca::Result<SolveOutcome> {
    match scheme {
        Scheme::Proposed => proposed(net, params).map(|p| p.rounded),
        Scheme::Benchmark1 => benchmark1(net, params, 0),
        Scheme::Benchmark2 => {
            let modes = benchmark1(net, params, 0)?.allocation.a;
            benchmark2_solve(net, params, &modes)
        }
        Scheme::Benchmark3 => benchmark3_solve(net, params),
        Scheme::Oracle => brute_force_oracle(net, params),
    }
}

struct DropRun {
    rows: Vec<ResultRow>,
    log: String,
}

fn run_drop(spec: &ExperimentSpec, point: usize, value: usize, params: &SystemParams, drop: usize) -> Result<DropRun> {
    let seed = derive_seed(spec.master_seed, &[point as u64, drop as u64]);
    let net = NetworkRealization::generate(params, seed)?;
    let mut rows = Vec::with_capacity(spec.schemes.len());
    let mut log = String::new();
    for &scheme in &spec.schemes {
        let clock = Instant::now();
        let result = run_scheme(scheme, &net, params);
        let wall = clock.elapsed().as_secs_f64();
        let _ = write!(log, "point {value} drop {drop} seed {seed} {}: ", scheme.name());
        match result {
            Ok(out) => {
                let _ = writeln!(
                    log,
                    "{} sum_phi {:.6e} W iterations {} wall {wall:.3} s",
                    out.status.name(),
                    out.objective_sum_he,
                    out.iterations
                );
                rows.push(row_from(value, params, drop, seed, &out));
            }
            Err(e) => {
                let _ = writeln!(log, "error: {e} wall {wall:.3} s");
                rows.push(error_row(value, params, scheme, drop, seed));
            }
        }
    }
    Ok(DropRun { rows, log })
}

/// Runs every (sweep point, drop) pair on the current rayon pool. Drop seeds
/// are `derive_seed(master_seed, [point index, drop index])`, so appending
/// sweep points or drops leaves existing ones untouched. Rows come back
/// ordered by point, then scheme (spec order), then drop.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<SweepResult> {
    let points = spec.points()?;
    let jobs: Vec<(usize, usize, &SystemParams, usize)> = points
        .iter()
        .enumerate()
        .flat_map(|(pi, (v, p))| (0..spec.n_drops).map(move |d| (pi, *v, p, d)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(pi, v, p, d)| run_drop(spec, pi, v, p, d))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(runs.len() * spec.schemes.len());
    let mut log = Vec::with_capacity(runs.len());
    for ((pi, _, _, _), run) in jobs.iter().zip(runs) {
        log.push(run.log);
        rows.extend(run.rows.into_iter().map(|r| (*pi, r)));
    }
    let order = |s: &str| spec.schemes.iter().position(|x| x.name() == s).unwrap_or(usize::MAX);
    rows.sort_by_key(|(pi, r)| (*pi, order(&r.scheme), r.drop));
    let rows: Vec<ResultRow> = rows.into_iter().map(|(_, r)| r).collect();
    let aggregates = aggregate(&rows);
    Ok(SweepResult {
        name: spec.name.clone(),
        note: spec.note.clone(),
        sweep_label: spec.sweep_label().into(),
        rows,
        aggregates,
        log,
    })
}

/// Mean and standard error of the sum harvested power over feasible drops,
/// per (sweep value, scheme), in row order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|a| a.sweep_value == r.sweep_value && a.scheme == r.scheme) {
            Some(i) => i,
            None => {
                out.push(Aggregate {
                    sweep_value: r.sweep_value,
                    scheme: r.scheme.clone(),
                    n_drops: 0,
                    n_feasible: 0,
                    feasibility_rate: 0.0,
                    mean_sum_phi_uw: f64::NAN,
                    stderr_sum_phi_uw: f64::NAN,
                });
                values.push(Vec::new());
                out.len() - 1
            }
        };
        out[idx].n_drops += 1;
        if r.feasible {
            values[idx].push(r.sum_phi_uw);
        }
    }
    for (a, v) in out.iter_mut().zip(&values) {
        a.n_feasible = v.len();
        a.feasibility_rate = v.len() as f64 / a.n_drops as f64;
        if v.is_empty() {
            continue;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        a.mean_sum_phi_uw = mean;
        a.stderr_sum_phi_uw = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
    }
    out
}

fn write_csv<T: Serialize>(path: &Path, schema: &str, note: &str, records: &[T]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    writeln!(file, "{schema}")?;
    if !note.is_empty() {
        writeln!(file, "# {}", note.replace('\n', " "))?;
    }
    let mut w = csv::Writer::from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_results(path: &Path, result: &SweepResult) -> Result<()> {
    write_csv(path, RESULTS_SCHEMA, &result.note, &result.rows)
}

pub fn write_aggregates(path: &Path, result: &SweepResult) -> Result<()> {
    write_csv(path, AGGREGATES_SCHEMA, &result.note, &result.aggregates)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    read_csv(path)
}

pub fn read_aggregates(path: &Path) -> Result<Vec<Aggregate>> {
    read_csv(path)
}

/// Writes `results.csv`, `aggregates.csv`, `run.log` and, when some point
/// has a feasible drop, `plot.svg` into `dir`.
pub fn write_outputs(dir: &Path, result: &SweepResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_results(&dir.join("results.csv"), result)?;
    write_aggregates(&dir.join("aggregates.csv"), result)?;
    let mut log = format!("experiment {}\n", result.name);
    if !result.note.is_empty() {
        let _ = writeln!(log, "note: {}", result.note);
    }
    for chunk in &result.log {
        log.push_str(chunk);
    }
    fs::write(dir.join("run.log"), log)?;
    let title = if result.note.is_empty() {
        result.name.clone()
    } else {
        format!("{} ({})", result.name, result.note)
    };
    match crate::plot::render_plot(&result.aggregates, &crate::plot::PlotStyle::new(&title, &result.sweep_label)) {
        Ok(svg) => fs::write(dir.join("plot.svg"), svg)?,
        Err(crate::error::ExperimentError::EmptyPlot(why)) => {
            let mut f = fs::OpenOptions::new().append(true).open(dir.join("run.log"))?;
            writeln!(f, "plot.svg not written: {why}")?;
        }
        Err(e) => return Err(e),
    }
    Ok(())
}
