//! End-to-end orchestration: runs the stages in order against a run
//! directory, checkpoints progress in `manifest.json`, and skips work whose
//! artifacts are already committed.

pub mod artifacts;
mod manifest;
mod report;
pub(crate) mod stages;

use std::path::Path;
use std::time::Instant;

use crate::config::PipelineConfig;
use crate::error::Error;
use crate::Result;

pub use manifest::{RunManifest, StageRecord};

/// Stage names in execution order.
pub const STAGES: [&str; 9] = [
    "ingest",
    "subsample",
    "featurize",
    "recommend",
    "evaluate",
    "exclude",
    "eliminate",
    "regress",
    "report",
];

/// Runs every stage in order. With `force`, previous progress is discarded
/// and every artifact is rebuilt; otherwise completed stages are skipped and
/// a crashed run resumes at the first incomplete stage.
pub fn run_pipeline(cfg: &PipelineConfig, force: bool) -> Result<RunManifest> {
    let out = prepare_out_dir(cfg)?;
    let mut manifest = if force {
        RunManifest::default()
    } else {
        RunManifest::load_or_default(&out)?
    };
    for stage in STAGES {
        if manifest.is_completed(stage) {
            eprintln!("[{stage}] already complete, skipping");
            continue;
        }
        execute_stage(stage, cfg, &out, &mut manifest, force)?;
    }
    Ok(manifest)
}

/// Runs one named stage (re-running it even when already complete), for
/// stage-at-a-time invocations. Inputs of later stages must already exist or
/// the stage fails naming the missing artifact.
pub fn run_single_stage(cfg: &PipelineConfig, stage: &str, force: bool) -> Result<RunManifest> {
    if !STAGES.contains(&stage) {
        return Err(Error::Config(format!(
            "unknown stage {stage:?}; expected one of {}",
            STAGES.join(", ")
        )));
    }
    let out = prepare_out_dir(cfg)?;
    let mut manifest = RunManifest::load_or_default(&out)?;
    execute_stage(stage, cfg, &out, &mut manifest, force)?;
    Ok(manifest)
}

/// Creates the run directory and snapshots the effective configuration.
fn prepare_out_dir(cfg: &PipelineConfig) -> Result<std::path::PathBuf> {
    let out = cfg.run.out_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let snapshot = artifacts::config_snapshot(&out);
    std::fs::write(&snapshot, cfg.to_toml_string()).map_err(|e| Error::io(&snapshot, e))?;
    Ok(out)
}

fn execute_stage(
    stage: &str,
    cfg: &PipelineConfig,
    out: &Path,
    manifest: &mut RunManifest,
    force: bool,
) -> Result<()> {
    let started = Instant::now();
    match stage {
        "ingest" => stages::ingest(cfg, out)?,
        "subsample" => stages::subsample(cfg, out, manifest)?,
        "featurize" => stages::featurize(cfg, out, manifest)?,
        "recommend" => stages::recommend(cfg, out, manifest, force)?,
        "evaluate" => stages::evaluate(cfg, out, manifest)?,
        "exclude" => stages::exclude(out)?,
        "eliminate" => stages::eliminate(cfg, out)?,
        "regress" => stages::regress(cfg, out)?,
        "report" => report::report(cfg, out, manifest)?,
        other => return Err(Error::Config(format!("unknown stage {other:?}"))),
    }
    let wall_ms = started.elapsed().as_millis() as u64;
    manifest.mark_completed(stage, wall_ms);
    manifest.save(out)?;
    eprintln!("[{stage}] completed in {wall_ms} ms");
    Ok(())
}
