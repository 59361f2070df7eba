//! Joint AP mode selection and power control for SWIPT cell-free massive
//! MIMO by successive convex approximation (SCA).
//!
//! The mixed-integer problem "maximize the sum harvested power subject to
//! per-IU SE and per-EU harvested-power targets" is relaxed to `a in [0, 1]`.
//! Each SCA step solves a conic inner approximation built around the
//! current iterate ([`surrogate`]), so every accepted iterate stays feasible
//! and the objective never decreases. The relaxed modes are then rounded
//! ([`proposed::round_modes`]).
//!
//! [`benchmarks`] holds the comparison schemes and an exhaustive oracle over
//! binary mode vectors.

pub mod benchmarks;
mod engine;
pub mod error;
pub mod outcome;
pub mod proposed;
pub mod state;
pub mod surrogate;

pub use benchmarks::{benchmark1, benchmark2_solve, benchmark3_solve, brute_force_oracle, ORACLE_MAX_APS};
pub use engine::{Assessment, MAX_ITERATIONS};
pub use error::{Result, ScaError};
pub use outcome::{OutcomeStatus, Scheme, SolveOutcome};
pub use proposed::{initialize, proposed, round_modes, sca_solve, sca_solve_from, ProposedOutcome, Start};
pub use state::{initial_allocation, ScaState};
pub use surrogate::{build_program, build_subproblem, Layout, Modes, Subproblem};
