//! `volume`: intrinsic ball volume exponent from origin-ball profiles over
//! independently sampled trees, with window-truncated balls excluded.

use serde_json::json;
use ust_core::lattice::Point;
use ust_core::metrics::{ball_volume_profile, ClipPolicy};
use ust_core::wilson::sample_ust;

use crate::config::run_replicas;
use crate::experiments::{aggregate, dyadic_grid, windowed_fit};
use crate::output::{write_csv, Summary};
use crate::{ExperimentConfig, RunError};

pub fn run(cfg: &ExperimentConfig) -> Result<Summary, RunError> {
    cfg.validate()?;
    let radii = dyadic_grid(cfg.rmin, cfg.rmax);
    if radii.len() < 3 {
        return Err(RunError::Usage("need at least 3 dyadic radii".into()));
    }
    if cfg.trees < 4 {
        return Err(RunError::Usage("need at least 4 trees".into()));
    }

    let results = run_replicas(cfg, cfg.trees, |_, mut rng| -> Result<_, ust_core::Error> {
        let tree = sample_ust(cfg.side, cfg.margin, &mut rng)?;
        let profile =
            ball_volume_profile(&tree, tree.id_of(Point::ORIGIN), cfg.rmax as u32, ClipPolicy::Window)?;
        Ok(radii
            .iter()
            .map(|&r| {
                if profile.is_truncated_at(r) {
                    None
                } else {
                    profile.volume_at(r).map(|v| v as f64)
                }
            })
            .collect::<Vec<Option<f64>>>())
    })?;
    let samples: Vec<Vec<Option<f64>>> =
        results.into_iter().collect::<Result<_, _>>().map_err(RunError::from)?;

    // Truncation-domination gate per radius.
    let mut excluded_per_radius = Vec::with_capacity(radii.len());
    for (k, &r) in radii.iter().enumerate() {
        let missing = samples.iter().filter(|row| row[k].is_none()).count();
        excluded_per_radius.push(missing);
        if missing * 2 > cfg.trees {
            return Err(RunError::Truncation(format!(
                "ball volume at radius {r}: {missing} of {} trees window-clipped",
                cfg.trees
            )));
        }
    }

    let agg = aggregate(&radii, &samples, cfg.require_seed()?)?;
    let (fit, excluded) = windowed_fit(&agg.rows)?;

    write_csv(
        cfg,
        "ball_volumes.csv",
        "r,mean,stderr,n,excluded",
        agg.rows
            .iter()
            .zip(agg.n_per_row.iter().zip(&excluded_per_radius))
            .map(|(&(r, m, se), (&n, &ex))| format!("{r},{m},{se},{n},{ex}")),
    )?;
    // Per-tree measurements in the module's fixed statistics schema.
    write_csv(
        cfg,
        "ball_stats.csv",
        ust_core::metrics::STAT_CSV_HEADER,
        samples.iter().flat_map(|row| {
            radii.iter().zip(row).map(|(&r, v)| {
                ust_core::metrics::stat_csv_row(
                    "ball_volume",
                    Point::ORIGIN,
                    r,
                    v.unwrap_or(f64::NAN),
                    v.is_none(),
                )
            })
        }),
    )?;

    Ok(Summary::new(cfg, fit.slope, fit.stderr_slope, cfg.trees)
        .with("split_z", json!(agg.split_z))
        .with("r_squared", json!(fit.r_squared))
        .with("excluded_radii", json!(excluded))
        .with("excluded_per_radius", json!(excluded_per_radius)))
}
