//! `gen`: sample one tree, write its snapshot, and verify the round trip.

use serde_json::json;
use ust_core::rng::RandomSource;
use ust_core::{snapshot, wilson};

use crate::output::Summary;
use crate::{ExperimentConfig, RunError};

pub fn run(cfg: &ExperimentConfig) -> Result<Summary, RunError> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    let mut rng = RandomSource::new(seed, 0);
    let tree = wilson::sample_ust(cfg.side, cfg.margin, &mut rng)?;
    tree.validate()?;

    let text = snapshot::save(&tree);
    std::fs::create_dir_all(&cfg.out)?;
    let path = cfg.out.join(format!("ust_side{}_seed{}.ust", cfg.side, seed));
    std::fs::write(&path, &text)?;

    let reloaded = snapshot::load(&text)?;
    reloaded.validate()?;
    if snapshot::save(&reloaded) != text {
        return Err(RunError::Integrity("snapshot round trip is not byte-exact".into()));
    }

    Ok(
        Summary::new(cfg, tree.vertex_count() as f64, 0.0, 1)
            .with("snapshot", json!(path.to_string_lossy()))
            .with("bytes", json!(text.len())),
    )
}
