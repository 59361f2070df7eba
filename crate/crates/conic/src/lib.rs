//! Conic programs over nonnegative, second-order, rotated second-order and
//! exponential cones, solved by a primal-dual interior-point method.
//!
//! The interior-point iterations run in the Clarabel crate. This crate owns
//! the program representation, the cone lowering, the text dump format, and
//! an independent KKT checker that judges any returned point from the
//! program data alone.

pub mod dump;
pub mod error;
pub mod kkt;
pub mod program;
pub mod solver;
pub mod suite;

pub use dump::{dump, parse_dump};
pub use error::{ConicError, Result};
pub use kkt::{check_kkt, kkt_residuals, KktResiduals};
pub use program::{Affine, ConeBlock, ConeKind, ConicProgram};
pub use solver::{solve, solve_with, ConicSolution, SolveOptions, SolveStatus, DEFAULT_MAX_ITER, DEFAULT_TOL};
