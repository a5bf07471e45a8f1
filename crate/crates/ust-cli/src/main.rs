use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ust_cli::{run_experiment, ExperimentConfig, ExperimentKind, RunError};

/// Simulator and measurement harness for the two-dimensional uniform
/// spanning tree.
#[derive(Parser)]
#[command(name = "ust", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Flags shared by every experiment. Values resolve as defaults, then the
/// config file, then explicit flags.
#[derive(Args, Debug, Default)]
struct Common {
    /// Explicit RNG seed (required for stochastic experiments).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replica fan-out (results are thread-count
    /// independent).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one tree with wired boundary and write its snapshot.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Half-width of the trusted window.
        #[arg(long)]
        side: Option<i32>,
        /// Box half-width over window half-width.
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Growth exponent of the loop-erased walk (target 5/4).
    LerwExponent {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rmin: Option<f64>,
        #[arg(long)]
        rmax: Option<f64>,
        /// Walks per radius.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Intrinsic ball-volume exponent (target 8/5).
    Volume {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: Option<i32>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long)]
        rmin: Option<f64>,
        #[arg(long)]
        rmax: Option<f64>,
    },
    /// Walk dimension from exit times (target 13/5).
    WalkDw {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: Option<i32>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        trees: Option<usize>,
        /// Walks per tree and radius.
        #[arg(long)]
        walks: Option<usize>,
        #[arg(long)]
        rmin: Option<f64>,
        #[arg(long)]
        rmax: Option<f64>,
        /// Length of the displacement walks.
        #[arg(long)]
        tmax: Option<u64>,
    },
    /// Spectral dimension from return probabilities (target 16/13).
    HeatDs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: Option<i32>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long)]
        tmax: Option<u64>,
        #[arg(long)]
        laziness: Option<f64>,
        /// Intrinsic radius of the iterated support.
        #[arg(long)]
        support_radius: Option<u32>,
    },
    /// Intrinsic-vs-Schramm metric regression (target slope 5/4).
    MetricCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: Option<i32>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long)]
        pairs_per_scale: Option<usize>,
    },
    /// Spatial-tree distance between two sampled trees.
    GhDistance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: Option<i32>,
        #[arg(long)]
        margin: Option<f64>,
        /// Sample points per tree (at most 16).
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        rmax: Option<f64>,
        /// Quadrature refinement step.
        #[arg(long)]
        grid: Option<f64>,
        /// Correspondence-search budget.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Exact spanning-tree count of a grid graph.
    CountSt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
    },
    /// Per-edge crossing counts of one walk at snapshot step counts.
    Range {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: Option<i32>,
        #[arg(long)]
        margin: Option<f64>,
        /// Comma-separated ascending snapshot step counts.
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<u64>>,
    },
}

fn apply_common(cfg: &mut ExperimentConfig, common: &Common) -> Result<(), RunError> {
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = Some(seed);
    }
    if let Some(threads) = common.threads {
        cfg.threads = threads;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    Ok(())
}

macro_rules! set_opt {
    ($cfg:expr, $($field:ident),+) => {
        $(if let Some(v) = $field { $cfg.$field = v; })+
    };
}

fn resolve(cmd: Cmd) -> Result<ExperimentConfig, RunError> {
    match cmd {
        Cmd::Gen { common, side, margin } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::Gen);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, side, margin);
            Ok(cfg)
        }
        Cmd::LerwExponent { common, rmin, rmax, samples, margin } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::LerwExponent);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, rmin, rmax, samples, margin);
            Ok(cfg)
        }
        Cmd::Volume { common, side, margin, trees, rmin, rmax } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::Volume);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, side, margin, trees, rmin, rmax);
            Ok(cfg)
        }
        Cmd::WalkDw { common, side, margin, trees, walks, rmin, rmax, tmax } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::WalkDw);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, side, margin, trees, walks, rmin, rmax, tmax);
            Ok(cfg)
        }
        Cmd::HeatDs { common, side, margin, trees, tmax, laziness, support_radius } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::HeatDs);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, side, margin, trees, tmax, laziness, support_radius);
            Ok(cfg)
        }
        Cmd::MetricCompare { common, side, margin, trees, pairs_per_scale } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::MetricCompare);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, side, margin, trees, pairs_per_scale);
            Ok(cfg)
        }
        Cmd::GhDistance { common, side, margin, points, rmax, grid, budget } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::GhDistance);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, side, margin, points, rmax, grid, budget);
            Ok(cfg)
        }
        Cmd::CountSt { common, rows, cols } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::CountSt);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, rows, cols);
            Ok(cfg)
        }
        Cmd::Range { common, side, margin, steps } => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::Range);
            apply_common(&mut cfg, &common)?;
            set_opt!(cfg, side, margin, steps);
            Ok(cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(cli.cmd) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.exit_code();
        }
    };
    match run_experiment(&cfg) {
        Ok(summary) => {
            println!(
                "{}: estimate {:.6} (stderr {:.3e}, n = {}) in {:.2}s",
                summary.experiment,
                summary.estimate,
                summary.stderr,
                summary.n_samples,
                summary.runtime_s
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
