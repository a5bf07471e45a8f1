//! `gh-distance`: the measured-rooted-spatial-tree distance machinery on
//! two independently sampled, rescaled trees.

use serde_json::json;
use ust_core::lattice::Point;
use ust_core::rng::RandomSource;
use ust_core::spatial::{delta_c_surrogate, delta_distance, from_spanning_tree, save_mst};
use ust_core::wilson::{sample_ust, SpanningTree};

use crate::output::Summary;
use crate::{ExperimentConfig, RunError};

/// Origin plus `n - 1` distinct random window vertices.
fn sample_points(tree: &SpanningTree, n: usize, rng: &mut RandomSource) -> Vec<u32> {
    let side = tree.window_side();
    let origin = tree.id_of(Point::ORIGIN);
    let mut pts = vec![origin];
    while pts.len() < n {
        let p = Point::new(
            rng.next_below((2 * side + 1) as u32) as i32 - side,
            rng.next_below((2 * side + 1) as u32) as i32 - side,
        );
        let id = tree.id_of(p);
        if !pts.contains(&id) {
            pts.push(id);
        }
    }
    pts
}

pub fn run(cfg: &ExperimentConfig) -> Result<Summary, RunError> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    if cfg.points < 1 || cfg.points > 16 {
        return Err(RunError::Usage("points must lie in 1..=16".into()));
    }

    let t0 = sample_ust(cfg.side, cfg.margin, &mut RandomSource::new(seed, 0))?;
    let t1 = sample_ust(cfg.side, cfg.margin, &mut RandomSource::new(seed, 1))?;
    let mut pick = RandomSource::new(seed, 2);
    let delta = 1.0 / f64::from(cfg.side);
    let a = from_spanning_tree::<f64>(&t0, delta, Some(&sample_points(&t0, cfg.points, &mut pick)))?;
    let b = from_spanning_tree::<f64>(&t1, delta, Some(&sample_points(&t1, cfg.points, &mut pick)))?;

    std::fs::create_dir_all(&cfg.out)?;
    std::fs::write(cfg.out.join("gh_a.mst"), save_mst(&a))?;
    std::fs::write(cfg.out.join("gh_b.mst"), save_mst(&b))?;

    let dc = delta_c_surrogate(&a, &b, cfg.budget)?;
    let dd = delta_distance(&a, &b, cfg.rmax, cfg.grid, cfg.budget)?;

    Ok(Summary::new(cfg, dd.value, 0.0, 2)
        .with("dc_upper", json!(dc.upper))
        .with("dc_lower", json!(dc.lower))
        .with("dc_exhaustive", json!(dc.exhaustive))
        .with("dc_witness_pairs", json!(dc.witness.pairs.len()))
        .with("truncation_error", json!(dd.truncation_error))
        .with("delta_exhaustive", json!(dd.exhaustive)))
}
