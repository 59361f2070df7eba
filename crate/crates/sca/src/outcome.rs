use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use swipt_core::{Allocation, MetricsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Proposed,
    Benchmark1,
    Benchmark2,
    Benchmark3,
    Oracle,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Proposed,
        Scheme::Benchmark1,
        Scheme::Benchmark2,
        Scheme::Benchmark3,
        Scheme::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Benchmark1 => "benchmark1",
            Scheme::Benchmark2 => "benchmark2",
            Scheme::Benchmark3 => "benchmark3",
            Scheme::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Scheme::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Converged,
    MaxIter,
    Infeasible,
    /// Two consecutive unusable solver results; the best iterate is kept.
    Numerical,
}

impl OutcomeStatus {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeStatus::Converged => "converged",
            OutcomeStatus::MaxIter => "max_iter",
            OutcomeStatus::Infeasible => "infeasible",
            OutcomeStatus::Numerical => "numerical",
        }
    }

    /// Whether the outcome carries a usable allocation. A numerical stop
    /// keeps the best accepted iterate, which meets every QoS target.
    pub fn is_solved(self) -> bool {
        matches!(self, OutcomeStatus::Converged | OutcomeStatus::MaxIter | OutcomeStatus::Numerical)
    }
}

/// Result of one optimization run.
///
/// For the orthogonal scheme `allocation.a` is all ones; `eta_i` and
/// `eta_e` then hold the coefficients of the information and energy halves,
/// each with its own unit budget.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub scheme: Scheme,
    pub allocation: Allocation,
    pub relaxed_allocation: Allocation,
    /// Logistic outputs `Psi(Q_l)` of the final allocation (W).
    pub omega: Vec<f64>,
    pub objective_sum_he: f64,
    /// Objective of the continuous relaxation; equals `objective_sum_he` for
    /// schemes without relaxation.
    pub relaxed_objective: f64,
    /// Sum harvested power (W) per accepted iterate.
    pub history: Vec<f64>,
    pub status: OutcomeStatus,
    pub metrics: MetricsReport,
    pub iterations: usize,
    pub phase1_iterations: usize,
    /// APs whose mode was flipped during rounding repair, in order.
    pub flips: Vec<usize>,
    pub wall_time: f64,
    pub log: Vec<String>,
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status.is_solved() && self.metrics.all_feasible()
    }

    pub fn csv_header() -> &'static str {
        "scheme,status,sum_phi_uW,relaxed_sum_phi_uW,min_se_bps_hz,feasible,iterations,phase1_iterations,flips"
    }

    /// One CSV row; wall time is left out so rows are reproducible.
    pub fn csv_row(&self) -> String {
        let flips: Vec<String> = self.flips.iter().map(|f| f.to_string()).collect();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.scheme.name(),
            self.status.name(),
            self.objective_sum_he * 1e6,
            self.relaxed_objective * 1e6,
            if self.metrics.se_per_iu.is_empty() { f64::NAN } else { self.metrics.min_se() },
            self.is_feasible(),
            self.iterations,
            self.phase1_iterations,
            flips.join(";"),
        )
    }

    pub fn text_log(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scheme {} status {}", self.scheme.name(), self.status.name());
        let _ = writeln!(
            out,
            "sum_phi {:.9e} W relaxed {:.9e} W wall {:.3} s",
            self.objective_sum_he, self.relaxed_objective, self.wall_time
        );
        let _ = writeln!(out, "a = {:?}", self.allocation.a);
        if self.relaxed_allocation.a != self.allocation.a {
            let _ = writeln!(out, "relaxed a = {:?}", self.relaxed_allocation.a);
        }
        if !self.flips.is_empty() {
            let _ = writeln!(out, "flips = {:?}", self.flips);
        }
        for (i, h) in self.history.iter().enumerate() {
            let _ = writeln!(out, "history {i} {h:.12e}");
        }
        for line in &self.log {
            let _ = writeln!(out, "{line}");
        }
        out
    }
}
