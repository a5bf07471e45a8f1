//! Experiment orchestration for the spanning-tree toolkit: configuration,
//! seeding, replica fan-out, snapshot handling, and CSV/JSON emission.
//!
//! Every stochastic experiment takes an explicit seed; replica `i` always
//! runs on random stream `i`, and aggregation is performed in replica
//! order, so results depend on the seed but not on the thread count.

pub mod config;
pub mod experiments;
pub mod output;

use std::process::ExitCode;

pub use config::{ExperimentConfig, ExperimentKind};

/// Build identifier embedded in every output file.
pub fn build_ident() -> String {
    format!("ust {}", env!("CARGO_PKG_VERSION"))
}

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Bad arguments or malformed input files (exit 2).
    Usage(String),
    /// The requested statistic is dominated by window truncation (exit 3).
    Truncation(String),
    /// A structural invariant was violated (exit 4).
    Integrity(String),
}

impl RunError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            RunError::Usage(_) => ExitCode::from(2),
            RunError::Truncation(_) => ExitCode::from(3),
            RunError::Integrity(_) => ExitCode::from(4),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Usage(m) | RunError::Truncation(m) | RunError::Integrity(m) => m,
        }
    }
}

impl From<ust_core::Error> for RunError {
    fn from(e: ust_core::Error) -> Self {
        use ust_core::Error::*;
        match e {
            Truncated(m) => RunError::Truncation(m),
            Integrity(m) => RunError::Integrity(m),
            other => RunError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Usage(format!("io error: {e}"))
    }
}

/// Runs one experiment to completion, writing its artifacts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<output::Summary, RunError> {
    let start = std::time::Instant::now();
    let mut summary = match cfg.kind {
        ExperimentKind::Gen => experiments::gen::run(cfg)?,
        ExperimentKind::LerwExponent => experiments::lerw::run(cfg)?,
        ExperimentKind::Volume => experiments::volume::run(cfg)?,
        ExperimentKind::WalkDw => experiments::walk_dw::run(cfg)?,
        ExperimentKind::HeatDs => experiments::heat_ds::run(cfg)?,
        ExperimentKind::MetricCompare => experiments::metric_compare::run(cfg)?,
        ExperimentKind::GhDistance => experiments::gh_distance::run(cfg)?,
        ExperimentKind::CountSt => experiments::count_st::run(cfg)?,
        ExperimentKind::Range => experiments::range::run(cfg)?,
    };
    summary.runtime_s = start.elapsed().as_secs_f64();
    output::write_summary(cfg, &summary)?;
    Ok(summary)
}

/// Loads a snapshot file, checking both parse and structural validity, and
/// returns the tree (the round-trip half of `gen`).
pub fn snapshot_roundtrip(path: &std::path::Path) -> Result<ust_core::wilson::SpanningTree, RunError> {
    let text = std::fs::read_to_string(path)?;
    let tree = ust_core::snapshot::load(&text)?;
    tree.validate().map_err(RunError::from)?;
    Ok(tree)
}
