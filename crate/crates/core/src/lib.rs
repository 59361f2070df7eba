//! Physical layer of a SWIPT cell-free massive MIMO network.
//!
//! Access points (APs) with `N` antennas each serve `K_d` information users
//! (IUs) and `L` energy users (EUs). Every AP is either an information AP
//! running local partial zero-forcing (PZF) or an energy AP running
//! protective maximum-ratio transmission (PMRT), selected by the mode vector
//! `a` of an [`Allocation`].
//!
//! * [`network`] draws random drops and computes large-scale fading and
//!   MMSE estimation variances.
//! * [`metrics`] evaluates the closed-form SINR / spectral efficiency,
//!   average received energy and the non-linear energy-harvesting model.
//! * [`montecarlo`] builds the precoders explicitly over small-scale fading
//!   draws and estimates the same quantities empirically.

pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod network;
pub mod params;
pub mod seed;

pub use error::{Error, Result};
pub use metrics::{Allocation, EhModel, MetricsReport};
pub use network::NetworkRealization;
pub use params::{ShadowingModel, SystemParams};
