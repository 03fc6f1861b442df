//! Scenario runner around `tbc-core`: configuration, the wide-domain
//! reference solver, output files and the command line.

pub mod config;
pub mod oracle;
pub mod output;
pub mod runner;

pub use config::{validate, Config, Report, Scenario};
pub use runner::{run, Check, RunSummary};
