//! The named experiments. Each takes a resolved [`crate::ExperimentConfig`],
//! writes its CSV artifacts, and returns the JSON summary.

pub mod count_st;
pub mod gen;
pub mod gh_distance;
pub mod heat_ds;
pub mod lerw;
pub mod metric_compare;
pub mod range;
pub mod volume;
pub mod walk_dw;

use ust_core::estimators::{bootstrap_stderr, mean_and_stderr, split_sample_check};
use ust_core::rng::RandomSource;

use crate::RunError;

/// Powers of two from `lo` to `hi` inclusive.
pub(crate) fn dyadic_grid(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = lo;
    while r <= hi * (1.0 + 1e-12) {
        out.push(r);
        r *= 2.0;
    }
    out
}

/// Per-abscissa aggregation of replica samples: means, bootstrap standard
/// errors, and the split-half discrepancy gate.
pub(crate) struct Aggregated {
    /// (x, mean, stderr) rows ready for the weighted fit.
    pub rows: Vec<(f64, f64, f64)>,
    /// Largest standardized first-half/second-half discrepancy.
    pub split_z: f64,
    pub n_per_row: Vec<usize>,
}

/// Aggregates `samples[replica][abscissa]` (entries may be missing for
/// truncated replicas). Bootstrap errors use dedicated streams of `seed`
/// offset far from the replica streams.
pub(crate) fn aggregate(
    xs: &[f64],
    samples: &[Vec<Option<f64>>],
    seed: u64,
) -> Result<Aggregated, RunError> {
    let mut rows = Vec::with_capacity(xs.len());
    let mut n_per_row = Vec::with_capacity(xs.len());
    let mut half_a = Vec::with_capacity(xs.len());
    let mut half_b = Vec::with_capacity(xs.len());
    let mid = samples.len() / 2;
    for (k, &x) in xs.iter().enumerate() {
        let vals: Vec<f64> = samples.iter().filter_map(|row| row[k]).collect();
        if vals.len() < 2 {
            return Err(RunError::Truncation(format!(
                "abscissa {x}: only {} usable samples",
                vals.len()
            )));
        }
        let (mean, _) = mean_and_stderr(&vals);
        let mut boot_rng = RandomSource::new(seed ^ 0x626f_6f74, k as u64);
        let se = bootstrap_stderr(&vals, 1000, &mut boot_rng);
        rows.push((x, mean, se.max(f64::MIN_POSITIVE)));
        n_per_row.push(vals.len());

        let a: Vec<f64> = samples[..mid].iter().filter_map(|row| row[k]).collect();
        let b: Vec<f64> = samples[mid..].iter().filter_map(|row| row[k]).collect();
        half_a.push(mean_and_stderr(&a));
        half_b.push(mean_and_stderr(&b));
    }
    let split_z = split_sample_check(&half_a, &half_b).map_err(RunError::from)?;
    Ok(Aggregated { rows, split_z, n_per_row })
}

/// Fit rows `(x, mean, stderr)` with inverse-variance weights on the log
/// scale and the small-abscissa exclusion rule.
pub(crate) fn windowed_fit(
    rows: &[(f64, f64, f64)],
) -> Result<(ust_core::Fit, Vec<f64>), RunError> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|&(x, mean, se)| {
            let w = if se > 0.0 { (mean / se).powi(2) } else { 1.0 };
            (x, mean, w)
        })
        .collect();
    ust_core::estimators::loglog_fit_windowed(&pts).map_err(RunError::from)
}
