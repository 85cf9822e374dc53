//! Experiment runner: configuration, the experiment registry, run records
//! written as CSV and JSON, and verdict reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;
pub mod report;
mod run;

pub use config::{Context, ExperimentConfig, Params, DEFAULT_SEED};
pub use error::{HarnessError, Result};
pub use experiments::{by_criterion, find, of_module, registry, Experiment, Module, Outcome};
pub use record::{Check, Estimate, RunRecord, Table, Tolerance, Verdict, RECORD_SCHEMA, ROWS_SCHEMA};
pub use report::{report, Report, ReportRow, REPORT_SCHEMA};
pub use run::{read_rows, resolve, run_experiment, CODE_VERSION};
