//! CSV and JSON artifact writers. Every file embeds the producing
//! configuration and the build identifier.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::{build_ident, ExperimentConfig, RunError};

/// JSON summary of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub params: std::collections::BTreeMap<String, String>,
    pub estimate: f64,
    pub stderr: f64,
    pub ci95: [f64; 2],
    pub n_samples: usize,
    pub seed: u64,
    pub runtime_s: f64,
    pub build: String,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl Summary {
    pub fn new(cfg: &ExperimentConfig, estimate: f64, stderr: f64, n_samples: usize) -> Self {
        Summary {
            experiment: cfg.kind.name().to_string(),
            params: cfg.echo(),
            estimate,
            stderr,
            ci95: [estimate - 1.96 * stderr, estimate + 1.96 * stderr],
            n_samples,
            seed: cfg.seed.unwrap_or(0),
            runtime_s: 0.0,
            build: build_ident(),
            extra: serde_json::Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: serde_json::Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

pub fn summary_path(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.join(format!("{}_summary.json", cfg.kind.name().replace('-', "_")))
}

pub fn write_summary(cfg: &ExperimentConfig, summary: &Summary) -> Result<(), RunError> {
    fs::create_dir_all(&cfg.out)?;
    let path = summary_path(cfg);
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| RunError::Usage(format!("json: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes a CSV file with `# key=value` config comment lines, the build
/// line, a fixed header, then the rows.
pub fn write_csv(
    cfg: &ExperimentConfig,
    name: &str,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<PathBuf, RunError> {
    fs::create_dir_all(&cfg.out)?;
    let path = cfg.out.join(name);
    let mut f = fs::File::create(&path)?;
    writeln!(f, "# build={}", build_ident())?;
    for (k, v) in cfg.echo() {
        writeln!(f, "# {k}={v}")?;
    }
    writeln!(f, "{header}")?;
    for row in rows {
        writeln!(f, "{row}")?;
    }
    Ok(path)
}
