//! Command-line front end: scenario files, protocol commands and reports.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod selftest;

pub use error::CliError;
pub use report::{Format, RunReport};
pub use scenario::{Overrides, Scenario};
