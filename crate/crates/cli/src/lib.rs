//! Scenario files in, plot-ready tables out.
//!
//! A scenario names one experiment plus the model it runs on. [`run_scenario`]
//! validates it, runs the engines and returns the table and a summary of the
//! relevant invariant checks; [`table::emit`] writes them as CSV or JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod scenario;
pub mod table;

use std::path::{Path, PathBuf};

pub use error::{CliError, Result};
pub use experiments::Report;
pub use scenario::Scenario;
pub use table::{Format, Summary, Table};

/// Environment variable consulted for the output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "COUPLER_OUT_DIR";

pub fn run_scenario(scenario: &Scenario) -> Result<Report> {
    experiments::run(scenario)
}

/// Load, run and emit in one go. Nothing is written unless the run succeeds.
pub fn run_file(path: &Path, out_dir: &Path, format: Format) -> Result<(Report, Vec<PathBuf>)> {
    let scenario = Scenario::load(path)?;
    let report = run_scenario(&scenario)?;
    let written = table::emit(out_dir, &scenario.resolved(), &report.table, &report.summary, format)?;
    Ok((report, written))
}
