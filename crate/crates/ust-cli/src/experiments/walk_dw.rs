//! `walk-dw`: walk dimension from mean exit times of intrinsic balls, with
//! the displacement exponent as a cross-check.

use serde_json::json;
use ust_core::metrics::{intrinsic_ball, ClipPolicy};
use ust_core::walk::{exit_time_from_ball, srw_on_tree, WalkOutcome};
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
    let times = dyadic_grid(128.0, cfg.tmax as f64);

    struct TreeResult {
        exit_means: Vec<Option<f64>>,
        depth_means: Vec<Option<f64>>,
    }

    let results = run_replicas(cfg, cfg.trees, |_, mut rng| -> Result<_, ust_core::Error> {
        let tree = sample_ust(cfg.side, cfg.margin, &mut rng)?;

        // Exit times: mean over this tree's walks, per radius; radii whose
        // ball is window-clipped are skipped for this tree.
        let mut exit_means = Vec::with_capacity(radii.len());
        for &r in &radii {
            let ball = intrinsic_ball(&tree, tree.root(), r, ClipPolicy::Window)?;
            if ball.truncated {
                exit_means.push(None);
                continue;
            }
            let taus = exit_time_from_ball(&tree, r, &mut rng, cfg.walks)?;
            let mean = taus.iter().map(|&t| t as f64).sum::<f64>() / taus.len() as f64;
            exit_means.push(Some(mean));
        }

        // Displacement: depth of the walk at dyadic times, averaged over
        // this tree's walks; walks that leave the window are dropped.
        let mut depth_acc = vec![0.0f64; times.len()];
        let mut depth_n = 0usize;
        for _ in 0..cfg.walks {
            let trace = srw_on_tree(&tree, tree.root(), cfg.tmax, &mut rng)?;
            if trace.outcome != WalkOutcome::Completed {
                continue;
            }
            for (k, &t) in times.iter().enumerate() {
                depth_acc[k] += f64::from(tree.depth(trace.positions[t as usize]));
            }
            depth_n += 1;
        }
        let depth_means = times
            .iter()
            .enumerate()
            .map(|(k, _)| {
                if depth_n == 0 {
                    None
                } else {
                    Some(depth_acc[k] / depth_n as f64)
                }
            })
            .collect();

        Ok(TreeResult { exit_means, depth_means })
    })?;
    let results: Vec<TreeResult> =
        results.into_iter().collect::<Result<_, _>>().map_err(RunError::from)?;

    let exit_samples: Vec<Vec<Option<f64>>> =
        results.iter().map(|r| r.exit_means.clone()).collect();
    for (k, &r) in radii.iter().enumerate() {
        let missing = exit_samples.iter().filter(|row| row[k].is_none()).count();
        if missing * 2 > cfg.trees {
            return Err(RunError::Truncation(format!(
                "exit-time ball at radius {r}: {missing} of {} trees window-clipped",
                cfg.trees
            )));
        }
    }
    let seed = cfg.require_seed()?;
    let agg = aggregate(&radii, &exit_samples, seed)?;
    let (fit, excluded) = windowed_fit(&agg.rows)?;

    let depth_samples: Vec<Vec<Option<f64>>> =
        results.iter().map(|r| r.depth_means.clone()).collect();
    let dagg = aggregate(&times, &depth_samples, seed ^ 0x64)?;
    let (dfit, _) = windowed_fit(&dagg.rows)?;

    write_csv(
        cfg,
        "exit_times.csv",
        "r,mean,stderr,n",
        agg.rows
            .iter()
            .zip(&agg.n_per_row)
            .map(|(&(r, m, se), &n)| format!("{r},{m},{se},{n}")),
    )?;
    write_csv(
        cfg,
        "displacement.csv",
        "t,mean_depth,stderr,n",
        dagg.rows
            .iter()
            .zip(&dagg.n_per_row)
            .map(|(&(t, m, se), &n)| format!("{t},{m},{se},{n}")),
    )?;

    Ok(Summary::new(cfg, fit.slope, fit.stderr_slope, cfg.trees * cfg.walks)
        .with("split_z", json!(agg.split_z))
        .with("excluded_radii", json!(excluded))
        .with("displacement_exponent", json!(dfit.slope))
        .with("displacement_stderr", json!(dfit.stderr_slope))
        .with("displacement_split_z", json!(dagg.split_z)))
}
