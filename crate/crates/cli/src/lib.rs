//! Config-driven runs of the martinwalk verification suites and Monte Carlo experiments.
//!
//! A run is `parse_config` → [`run`] → [`emit`]. The JSON report is canonical:
//! keys are sorted and identical config documents give identical bytes, at
//! any worker count.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{parse_config, parse_config_with, Command, Format, Mode, Overrides, RunConfig};
pub use report::{emit_csv, emit_json, Record, RecordMode, Report, Table};

/// Failures that stop a run before a report exists.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("run failed: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Runtime(_) => EXIT_CHECK_FAILED,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// A finished report with its exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub status: i32,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let report = suites::run_suite(config)?;
    let status = if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome { report, status })
}

pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => emit_json(report),
        Format::Csv => emit_csv(report),
    }
}

/// Parses, runs and renders in one step; the bytes are what the binary writes.
pub fn run_document(text: &str, overrides: &Overrides) -> Result<(Vec<u8>, i32), CliError> {
    let config = parse_config_with(text, overrides)?;
    let outcome = run(&config)?;
    Ok((emit(&outcome.report, config.format), outcome.status))
}
