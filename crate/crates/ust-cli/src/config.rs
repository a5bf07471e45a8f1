//! Experiment configuration: the nine named experiments, their parameters,
//! defaults, and the flat `key=value` config-file layer (command-line flags
//! override file values).

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Gen,
    LerwExponent,
    Volume,
    WalkDw,
    HeatDs,
    MetricCompare,
    GhDistance,
    CountSt,
    Range,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Gen => "gen",
            ExperimentKind::LerwExponent => "lerw-exponent",
            ExperimentKind::Volume => "volume",
            ExperimentKind::WalkDw => "walk-dw",
            ExperimentKind::HeatDs => "heat-ds",
            ExperimentKind::MetricCompare => "metric-compare",
            ExperimentKind::GhDistance => "gh-distance",
            ExperimentKind::CountSt => "count-st",
            ExperimentKind::Range => "range",
        }
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Explicit seed; stochastic experiments refuse to run without one.
    pub seed: Option<u64>,
    pub threads: usize,
    pub out: PathBuf,

    pub side: i32,
    pub margin: f64,
    pub samples: usize,
    pub trees: usize,
    pub walks: usize,
    pub rmin: f64,
    pub rmax: f64,
    pub tmax: u64,
    pub laziness: f64,
    pub support_radius: u32,
    pub points: usize,
    pub grid: f64,
    pub budget: usize,
    pub pairs_per_scale: usize,
    pub rows: usize,
    pub cols: usize,
    pub steps: Vec<u64>,
}

impl ExperimentConfig {
    /// Defaults for one experiment; the seed must be supplied explicitly
    /// for every stochastic experiment (no silent entropy).
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut cfg = ExperimentConfig {
            kind,
            seed: None,
            threads: 1,
            out: PathBuf::from("."),
            side: 64,
            margin: 2.0,
            samples: 2000,
            trees: 50,
            walks: 20,
            rmin: 16.0,
            rmax: 256.0,
            tmax: 1 << 14,
            laziness: 0.5,
            support_radius: 800,
            points: 12,
            grid: 0.05,
            budget: 4000,
            pairs_per_scale: 120,
            rows: 3,
            cols: 3,
            steps: vec![5000, 50000],
        };
        match kind {
            ExperimentKind::Gen => cfg.side = 64,
            ExperimentKind::LerwExponent => cfg.margin = 4.0,
            ExperimentKind::Volume => {
                cfg.side = 512;
                cfg.trees = 200;
                cfg.rmax = 512.0;
            }
            ExperimentKind::WalkDw => {
                cfg.side = 192;
                cfg.trees = 25;
                cfg.rmax = 128.0;
                cfg.tmax = 1 << 15;
            }
            ExperimentKind::HeatDs => {
                cfg.side = 320;
                cfg.margin = 1.6;
                cfg.trees = 50;
            }
            ExperimentKind::MetricCompare => {
                cfg.side = 256;
                cfg.trees = 20;
            }
            ExperimentKind::GhDistance => {
                cfg.side = 64;
                cfg.rmax = 3.0;
            }
            ExperimentKind::Range => {
                // A walk-range picture runs on the whole wired box tree.
                cfg.side = 30;
                cfg.margin = 1.0;
            }
            ExperimentKind::CountSt => {}
        }
        cfg
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, RunError> {
            v.parse()
                .map_err(|_| RunError::Usage(format!("bad value '{v}' for {key}")))
        }
        match key {
            "seed" => self.seed = Some(parse(key, value)?),
            "threads" => self.threads = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "side" => self.side = parse(key, value)?,
            "margin" => self.margin = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "trees" => self.trees = parse(key, value)?,
            "walks" => self.walks = parse(key, value)?,
            "rmin" => self.rmin = parse(key, value)?,
            "rmax" => self.rmax = parse(key, value)?,
            "tmax" => self.tmax = parse(key, value)?,
            "laziness" => self.laziness = parse(key, value)?,
            "support-radius" => self.support_radius = parse(key, value)?,
            "points" => self.points = parse(key, value)?,
            "grid" => self.grid = parse(key, value)?,
            "budget" => self.budget = parse(key, value)?,
            "pairs-per-scale" => self.pairs_per_scale = parse(key, value)?,
            "rows" => self.rows = parse(key, value)?,
            "cols" => self.cols = parse(key, value)?,
            "steps" => {
                self.steps = value
                    .split(',')
                    .map(|s| parse::<u64>("steps", s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            _ => return Err(RunError::Usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Loads a flat `key=value` config file into this config (later CLI
    /// flags override these values).
    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<(), RunError> {
        let text = std::fs::read_to_string(path)?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                RunError::Usage(format!("config line {} is not key=value", i + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// The explicit seed, required for every stochastic experiment.
    pub fn require_seed(&self) -> Result<u64, RunError> {
        self.seed.ok_or_else(|| {
            RunError::Usage("this experiment is stochastic; pass an explicit --seed".into())
        })
    }

    /// Sanity checks shared by all experiments.
    pub fn validate(&self) -> Result<(), RunError> {
        if self.side < 1 {
            return Err(RunError::Usage("side must be positive".into()));
        }
        if !(self.laziness >= 0.0 && self.laziness < 1.0) {
            return Err(RunError::Usage("laziness must lie in [0, 1)".into()));
        }
        if self.margin < 1.0 {
            return Err(RunError::Usage("margin must be >= 1".into()));
        }
        if self.threads < 1 {
            return Err(RunError::Usage("threads must be >= 1".into()));
        }
        Ok(())
    }

    /// Flat key/value view echoed into every output artifact.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("experiment".into(), self.kind.name().into());
        if let Some(seed) = self.seed {
            m.insert("seed".into(), seed.to_string());
        }
        m.insert("threads".into(), self.threads.to_string());
        match self.kind {
            ExperimentKind::Gen => {
                m.insert("side".into(), self.side.to_string());
                m.insert("margin".into(), self.margin.to_string());
            }
            ExperimentKind::LerwExponent => {
                m.insert("rmin".into(), self.rmin.to_string());
                m.insert("rmax".into(), self.rmax.to_string());
                m.insert("samples".into(), self.samples.to_string());
                m.insert("margin".into(), self.margin.to_string());
            }
            ExperimentKind::Volume => {
                m.insert("side".into(), self.side.to_string());
                m.insert("margin".into(), self.margin.to_string());
                m.insert("trees".into(), self.trees.to_string());
                m.insert("rmin".into(), self.rmin.to_string());
                m.insert("rmax".into(), self.rmax.to_string());
            }
            ExperimentKind::WalkDw => {
                m.insert("side".into(), self.side.to_string());
                m.insert("margin".into(), self.margin.to_string());
                m.insert("trees".into(), self.trees.to_string());
                m.insert("walks".into(), self.walks.to_string());
                m.insert("rmin".into(), self.rmin.to_string());
                m.insert("rmax".into(), self.rmax.to_string());
                m.insert("tmax".into(), self.tmax.to_string());
            }
            ExperimentKind::HeatDs => {
                m.insert("side".into(), self.side.to_string());
                m.insert("margin".into(), self.margin.to_string());
                m.insert("trees".into(), self.trees.to_string());
                m.insert("tmax".into(), self.tmax.to_string());
                m.insert("laziness".into(), self.laziness.to_string());
                m.insert("support-radius".into(), self.support_radius.to_string());
            }
            ExperimentKind::MetricCompare => {
                m.insert("side".into(), self.side.to_string());
                m.insert("margin".into(), self.margin.to_string());
                m.insert("trees".into(), self.trees.to_string());
                m.insert("pairs-per-scale".into(), self.pairs_per_scale.to_string());
            }
            ExperimentKind::GhDistance => {
                m.insert("side".into(), self.side.to_string());
                m.insert("margin".into(), self.margin.to_string());
                m.insert("points".into(), self.points.to_string());
                m.insert("rmax".into(), self.rmax.to_string());
                m.insert("grid".into(), self.grid.to_string());
                m.insert("budget".into(), self.budget.to_string());
            }
            ExperimentKind::CountSt => {
                m.insert("rows".into(), self.rows.to_string());
                m.insert("cols".into(), self.cols.to_string());
            }
            ExperimentKind::Range => {
                m.insert("side".into(), self.side.to_string());
                m.insert("margin".into(), self.margin.to_string());
                m.insert(
                    "steps".into(),
                    self.steps
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                );
            }
        }
        m
    }
}

/// Deterministic replica fan-out: replica `i` always runs on stream `i` of
/// the experiment seed, and results come back in replica order regardless
/// of scheduling.
pub fn run_replicas<T, F>(cfg: &ExperimentConfig, n: usize, f: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(usize, ust_core::rng::RandomSource) -> T + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| RunError::Usage(format!("thread pool: {e}")))?;
    let seed = cfg.require_seed()?;
    Ok(pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| f(i, ust_core::rng::RandomSource::new(seed, i as u64)))
            .collect()
    }))
}
