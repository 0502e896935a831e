//! Scenario files, seed sweeps, CSV export and run comparison for the
//! `trustroute` simulator core.

pub mod aggregate;
pub mod config;
pub mod error;
pub mod format;
pub mod output;
pub mod runner;

pub use error::{Error, Result};
