//! `metric-compare`: regression of the intrinsic metric against the
//! Schramm metric over stratified vertex pairs of sampled trees.

use serde_json::json;
use ust_core::lattice::Point;
use ust_core::metrics::{schramm_distance, tree_dist};
use ust_core::wilson::sample_ust;
use ust_core::Error;

use crate::config::run_replicas;
use crate::output::{write_csv, Summary};
use crate::{ExperimentConfig, RunError};

pub fn run(cfg: &ExperimentConfig) -> Result<Summary, RunError> {
    cfg.validate()?;
    // Pair separations stratified over dyadic scales from 8 (above the
    // lattice regime) up to side/2, so the regression sees a wide abscissa
    // range.
    let mut scales = Vec::new();
    let mut s = 8i32;
    while s <= cfg.side / 2 {
        scales.push(s);
        s *= 2;
    }
    if scales.len() < 3 {
        return Err(RunError::Usage("side too small for the scale grid".into()));
    }

    let results = run_replicas(cfg, cfg.trees, |_, mut rng| -> Result<_, Error> {
        let tree = sample_ust(cfg.side, cfg.margin, &mut rng)?;
        let half = cfg.side / 2;
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        let mut skipped = 0usize;
        for &scale in &scales {
            for _ in 0..cfg.pairs_per_scale {
                let x = Point::new(
                    rng.next_below((2 * half + 1) as u32) as i32 - half,
                    rng.next_below((2 * half + 1) as u32) as i32 - half,
                );
                // Offset with Chebyshev norm exactly `scale`.
                let t = rng.next_below((2 * scale + 1) as u32) as i32 - scale;
                let (dx, dy) = match rng.next_below(4) {
                    0 => (scale, t),
                    1 => (-scale, t),
                    2 => (t, scale),
                    _ => (t, -scale),
                };
                let y = Point::new(x.x + dx, x.y + dy);
                if y.linf() > cfg.side {
                    skipped += 1;
                    continue;
                }
                let (a, b) = (tree.id_of(x), tree.id_of(y));
                match schramm_distance(&tree, a, b) {
                    Ok(ds) if ds.squared() > 0 => {
                        let du = tree_dist(&tree, a, b)?;
                        pairs.push((ds.value(), f64::from(du)));
                    }
                    Ok(_) => skipped += 1,
                    Err(Error::Truncated(_)) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((pairs, skipped))
    })?;
    let results: Vec<(Vec<(f64, f64)>, usize)> =
        results.into_iter().collect::<Result<_, _>>().map_err(RunError::from)?;

    let mut all: Vec<(f64, f64, f64)> = Vec::new();
    let mut skipped = 0usize;
    for (pairs, sk) in &results {
        skipped += sk;
        all.extend(pairs.iter().map(|&(ds, du)| (ds, du, 1.0)));
    }
    if all.len() * 2 < cfg.trees * cfg.pairs_per_scale * scales.len() {
        return Err(RunError::Truncation(format!(
            "metric comparison kept only {} of {} pairs",
            all.len(),
            cfg.trees * cfg.pairs_per_scale * scales.len()
        )));
    }

    let fit = ust_core::estimators::loglog_fit(&all).map_err(RunError::from)?;

    write_csv(
        cfg,
        "metric_pairs.csv",
        "schramm,intrinsic",
        all.iter().map(|&(ds, du, _)| format!("{ds},{du}")),
    )?;

    Ok(Summary::new(cfg, fit.slope, fit.stderr_slope, all.len())
        .with("r_squared", json!(fit.r_squared))
        .with("skipped_pairs", json!(skipped)))
}
