//! Downlink system-level simulator for base-station switching (BSS) with
//! coordinated multi-point joint transmission (CoMP).
//!
//! The pipeline per realization is: [`geometry`] drops users on a 49-BS
//! wraparound layout, [`channel`] draws link gains, [`evaluate`] computes
//! SINRs for a BSS pattern and runs the closed-form α-fair [`scheduler`],
//! [`bss`] picks a pattern and [`metrics`] summarizes the outcome.
//! [`campaign`] drives Monte-Carlo sweeps over all of it.

pub mod bss;
pub mod campaign;
pub mod channel;
pub mod comp;
pub mod error;
pub mod evaluate;
pub mod figures;
pub mod geometry;
pub mod mcs;
pub mod metrics;
pub mod par;
pub mod scheduler;
pub mod seed;

pub use error::{Error, Result};
