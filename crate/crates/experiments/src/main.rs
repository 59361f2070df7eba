use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swipt_experiments::sweep::read_aggregates;
use swipt_experiments::{
    render_plot, run_experiment, run_oracle_gap, run_validation, write_outputs, ExperimentSpec, PlotStyle, Result,
};

#[derive(Parser)]
#[command(name = "swipt", about = "Sweeps, validation and plots for SWIPT AP mode selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment spec (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the spec's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to the spec's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form SE and received energy against Monte-Carlo estimates.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Channel trials (defaults to the spec's `n_mc_trials`).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Runs every scheme on every sweep point and drop.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Overrides the spec's number of drops per sweep point
        #[arg(long)]
        drops: Option<usize>,
    },
    /// Redraws `plot.svg` from an existing `aggregates.csv`.
    Plot {
        #[command(flatten)]
        common: Common,
    },
    /// Proposed scheme against exhaustive mode enumeration.
    OracleGap {
        #[command(flatten)]
        common: Common,
        /// Overrides the spec's number of drops per sweep point
        #[arg(long)]
        drops: Option<usize>,
    },
}

fn load(common: &Common, drops: Option<usize>) -> Result<(ExperimentSpec, PathBuf)> {
    let mut spec = ExperimentSpec::load(&common.config)?;
    if let Some(s) = common.seed {
        spec.master_seed = s;
    }
    if let Some(d) = drops {
        spec.n_drops = d;
    }
    spec.validate()?;
    let out = common.out.clone().unwrap_or_else(|| spec.output_dir.clone());
    std::fs::create_dir_all(&out)?;
    Ok((spec, out))
}

fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

fn validate(common: &Common, trials: Option<usize>) -> Result<()> {
    let (spec, out) = load(common, None)?;
    let n_trials = trials.unwrap_or(spec.n_mc_trials).max(1);
    let report = pool(common.threads).install(|| run_validation(&spec.base, n_trials, spec.master_seed))?;
    report.write_csv(&out.join("validation.csv"))?;
    for r in &report.rows {
        println!(
            "{:<16} {:>2} closed {:.6e} empirical {:.6e} rel_err {:.3e}",
            r.quantity, r.user, r.closed_form, r.empirical, r.rel_err
        );
    }
    Ok(())
}

fn sweep(common: &Common, drops: Option<usize>) -> Result<()> {
    let (spec, out) = load(common, drops)?;
    let result = pool(common.threads).install(|| run_experiment(&spec))?;
    write_outputs(&out, &result)?;
    for a in &result.aggregates {
        println!(
            "{:>3} {:<10} feasible {:>3}/{:<3} mean {:.6} uW stderr {:.6}",
            a.sweep_value, a.scheme, a.n_feasible, a.n_drops, a.mean_sum_phi_uw, a.stderr_sum_phi_uw
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn plot(common: &Common) -> Result<()> {
    let (spec, out) = load(common, None)?;
    let aggregates = read_aggregates(&out.join("aggregates.csv"))?;
    let title = if spec.note.is_empty() { spec.name.clone() } else { format!("{} ({})", spec.name, spec.note) };
    let svg = render_plot(&aggregates, &PlotStyle::new(&title, spec.sweep_label()))?;
    let path = out.join("plot.svg");
    std::fs::write(&path, svg)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn oracle_gap(common: &Common, drops: Option<usize>) -> Result<()> {
    let (spec, out) = load(common, drops)?;
    let rows = pool(common.threads).install(|| run_oracle_gap(&spec))?;
    swipt_experiments::oracle_gap::write_gap_csv(&out.join("oracle_gap.csv"), &spec.note, &rows)?;
    for r in &rows {
        println!(
            "M {:>2} drop {:>2}: oracle {:.6e} relaxed {:.6e} rounded {:.6e} ratio {:.4}",
            r.m, r.drop, r.oracle_uw, r.relaxed_uw, r.rounded_uw, r.rounded_ratio
        );
    }
    println!("wrote {}", Path::new(&out).join("oracle_gap.csv").display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { common, trials } => validate(common, *trials),
        Command::Sweep { common, drops } => sweep(common, *drops),
        Command::Plot { common } => plot(common),
        Command::OracleGap { common, drops } => oracle_gap(common, *drops),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
