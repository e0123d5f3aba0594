//! Dedicated RF charging of wearables from small base stations (SBSs).
//!
//! The crate is organised bottom-up:
//!
//! - [`linkbudget`]: dBm conversions, Friis propagation, energy radius,
//!   regulatory power limits and the linear-array off-axis factor.
//! - [`feasibility`]: per-band / per-antenna-mode feasibility tables
//!   (energy radius, harvested power, replenishment, positive range,
//!   support time).
//! - [`deployment`]: torus geometry and fixed-count Strauss placement of SBSs.
//! - [`mobility`]: fractional Gaussian noise, Lévy steps and speed-normalised
//!   user trajectories.
//! - [`charging`]: beam scheduling, per-user received power and battery steps.
//! - [`simengine`]: the time-stepped Monte Carlo engine, ANDOT, energy CDFs
//!   and parameter sweeps.
//! - [`config`] and [`cli`]: flat key-value scenario files and the
//!   `feasibility` / `simulate` / `sweep` front end.
//!
//! The `examples/` directory holds one runnable program per capability.

// Guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charging;
pub mod cli;
pub mod config;
pub mod deployment;
pub mod error;
pub mod feasibility;
pub mod linkbudget;
pub mod mobility;
pub mod seeds;
pub mod simengine;

pub use error::{Error, Result};
