//! `lerw-exponent`: growth exponent of the loop-erased walk from mean path
//! lengths at dyadic radii.

use serde_json::json;
use ust_core::wilson::lerw_to_radius;

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
    if cfg.samples < 4 {
        return Err(RunError::Usage("need at least 4 samples".into()));
    }

    // Replica i draws one walk length per radius on stream i.
    let results = run_replicas(cfg, cfg.samples, |_, mut rng| {
        radii
            .iter()
            .map(|&r| {
                lerw_to_radius(r, cfg.margin, &mut rng)
                    .map(|path| Some((path.len() - 1) as f64))
            })
            .collect::<Result<Vec<Option<f64>>, _>>()
    })?;
    let samples: Vec<Vec<Option<f64>>> =
        results.into_iter().collect::<Result<_, _>>().map_err(RunError::from)?;

    let agg = aggregate(&radii, &samples, cfg.require_seed()?)?;
    let (fit, excluded) = windowed_fit(&agg.rows)?;

    write_csv(
        cfg,
        "lerw_lengths.csv",
        "r,mean,stderr,n",
        agg.rows
            .iter()
            .zip(&agg.n_per_row)
            .map(|(&(r, m, se), &n)| format!("{r},{m},{se},{n}")),
    )?;

    Ok(Summary::new(cfg, fit.slope, fit.stderr_slope, cfg.samples)
        .with("split_z", json!(agg.split_z))
        .with("r_squared", json!(fit.r_squared))
        .with("excluded_radii", json!(excluded)))
}
