//! `range`: per-edge crossing counts of one walk at the requested step
//! counts — the data layer behind walk-range pictures.

use serde_json::json;
use ust_core::rng::RandomSource;
use ust_core::walk::walk_range_profile;
use ust_core::wilson::sample_ust;

use crate::output::{write_csv, Summary};
use crate::{ExperimentConfig, RunError};

pub fn run(cfg: &ExperimentConfig) -> Result<Summary, RunError> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    if cfg.steps.is_empty() {
        return Err(RunError::Usage("need at least one snapshot step count".into()));
    }
    let mut rng = RandomSource::new(seed, 0);
    let tree = sample_ust(cfg.side, cfg.margin, &mut rng)?;
    let snaps = walk_range_profile(&tree, &cfg.steps, &mut rng)?;

    // Edges incident to the wired class are drawn through their boundary
    // crossing point.
    let mut rows = Vec::new();
    for snap in &snaps {
        for &(child, count) in &snap.edges {
            let v = tree
                .point_of(child)
                .or_else(|| tree.wired_crossing(child))
                .expect("vertex embeds or crosses the boundary");
            let p = tree
                .point_of(tree.parent(child))
                .or_else(|| tree.wired_crossing(child))
                .expect("parent embeds or crosses the boundary");
            rows.push(format!("{},{},{},{},{},{}", v.x, v.y, p.x, p.y, count, snap.steps));
        }
    }
    write_csv(cfg, "walk_range.csv", "x,y,px,py,crossings,snapshot_steps", rows)?;

    let final_edges = snaps.last().map_or(0, |s| s.edges.len());
    Ok(Summary::new(cfg, final_edges as f64, 0.0, 1)
        .with("snapshots", json!(cfg.steps)))
}
