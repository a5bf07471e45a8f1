//! `count-st`: exact spanning-tree count of a grid graph via the
//! matrix-tree determinant.

use serde_json::json;
use ust_core::graph::{count_spanning_trees, SmallGraph};

use crate::output::Summary;
use crate::{ExperimentConfig, RunError};

pub fn run(cfg: &ExperimentConfig) -> Result<Summary, RunError> {
    if cfg.rows < 1 || cfg.cols < 1 {
        return Err(RunError::Usage("rows and cols must be positive".into()));
    }
    let count = count_spanning_trees(&SmallGraph::grid(cfg.rows, cfg.cols))?;
    let as_f64: f64 = count.to_string().parse().unwrap_or(f64::INFINITY);
    let exact_in_f64 = count.bits() <= 53;
    Ok(Summary::new(cfg, as_f64, 0.0, 1)
        .with("count_exact", json!(count.to_string()))
        .with("estimate_is_exact", json!(exact_in_f64)))
}
