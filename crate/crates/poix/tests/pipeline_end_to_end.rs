//! Drives the whole staged pipeline over a small generated city and checks
//! resumability, determinism, and the missing-artifact diagnostics.

use std::path::Path;

use poix::config::PipelineConfig;
use poix::data::write_canonical_csv;
use poix::error::Error;
use poix::pipeline::{self, artifacts, RunManifest};
use poix::rec::ModelId;
use poix::subsample::Season;
use poix::synth::SynthParams;

fn tiny_city_config(dir: &Path) -> PipelineConfig {
    let params = SynthParams {
        users: 120,
        venues: 60,
        checkins: 4_000,
        visitor_fraction: 0.3,
        ..SynthParams::default()
    };
    let checkins = poix::synth::generate(&params, 11).expect("synth");
    let data_path = dir.join("data.csv");
    write_canonical_csv(&data_path, &checkins).expect("write input");

    let mut cfg = PipelineConfig::default();
    cfg.data.checkins = data_path;
    cfg.subsampling.k_cores = vec![2, 3];
    cfg.subsampling.drop_top_pcts = vec![0.01];
    cfg.subsampling.seasons = vec![Season::All, Season::Summer, Season::Winter];
    cfg.evaluation.cutoffs = vec![2, 5];
    cfg.evaluation.models = vec![ModelId::Random, ModelId::Pop];
    cfg.run.seed = 7;
    cfg.run.out_dir = dir.join("run");
    cfg.run.heatmap_bins = 10;
    cfg
}

#[test]
fn full_run_resumes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tiny_city_config(tmp.path());
    let out = cfg.run.out_dir.clone();

    let manifest = pipeline::run_pipeline(&cfg, false).expect("pipeline");
    for stage in pipeline::STAGES {
        assert!(manifest.is_completed(stage), "stage {stage} incomplete");
    }
    // 2 k-cores × 1 drop-top × 4 origins × 3 seasons.
    assert_eq!(manifest.subsample_keys.len(), 24);
    assert!(
        manifest.usable_keys().len() >= 12,
        "too many degenerate subsamples: {:?}",
        manifest.degenerate
    );

    // The major artifacts landed.
    for path in [
        artifacts::config_snapshot(&out),
        artifacts::city_csv(&out),
        artifacts::homes_csv(&out),
        artifacts::venues_csv(&out),
        artifacts::subsample_index_csv(&out),
        artifacts::evs_csv(&out),
        artifacts::metrics_csv(&out),
        artifacts::exclusion_csv(&out),
        artifacts::vif_report_csv(&out),
        artifacts::model_summary_csv(&out),
        artifacts::report_md(&out),
    ] {
        assert!(path.exists(), "missing artifact {}", path.display());
    }

    // Winner rows reference only configured models; Pop must be retained.
    let metrics = artifacts::read_metrics(&artifacts::metrics_csv(&out)).unwrap();
    assert!(!metrics.is_empty());
    assert!(metrics.iter().all(|r| matches!(r.model, ModelId::Random | ModelId::Pop)));
    let (_, retained) = artifacts::read_exclusion(&artifacts::exclusion_csv(&out)).unwrap();
    assert!(retained.contains(&ModelId::Pop));

    // At least one regression table exists and starts with the intercept.
    let summary = artifacts::read_model_summary(&artifacts::model_summary_csv(&out)).unwrap();
    assert!(!summary.is_empty());
    let first = &summary[0];
    let coefs = artifacts::read_regression(&artifacts::regression_csv(
        &out,
        first.model,
        &first.metric_tag,
        first.cutoff,
    ))
    .unwrap();
    assert_eq!(coefs[0].name, "(Intercept)");

    // A second run without force reuses every stage: wall times unchanged.
    let again = pipeline::run_pipeline(&cfg, false).expect("resume");
    for stage in pipeline::STAGES {
        assert_eq!(
            again.stages[stage].wall_ms, manifest.stages[stage].wall_ms,
            "stage {stage} re-ran on resume"
        );
    }

    // A forced rerun rebuilds everything and lands on identical numbers.
    let evs_before = std::fs::read(artifacts::evs_csv(&out)).unwrap();
    let metrics_before = std::fs::read(artifacts::metrics_csv(&out)).unwrap();
    let report_before = std::fs::read(artifacts::report_md(&out)).unwrap();
    pipeline::run_pipeline(&cfg, true).expect("forced rerun");
    assert_eq!(std::fs::read(artifacts::evs_csv(&out)).unwrap(), evs_before);
    assert_eq!(std::fs::read(artifacts::metrics_csv(&out)).unwrap(), metrics_before);
    assert_eq!(std::fs::read(artifacts::report_md(&out)).unwrap(), report_before);
}

#[test]
fn stages_fail_loudly_without_their_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = tiny_city_config(tmp.path());
    cfg.run.out_dir = tmp.path().join("empty-run");

    // featurize first needs the ingest venue table.
    let err = pipeline::run_single_stage(&cfg, "featurize", false).unwrap_err();
    match err {
        Error::MissingArtifact { stage, .. } => assert_eq!(stage, "ingest"),
        other => panic!("expected MissingArtifact, got {other:?}"),
    }

    let err = pipeline::run_single_stage(&cfg, "exclude", false).unwrap_err();
    match err {
        Error::MissingArtifact { stage, .. } => assert_eq!(stage, "evaluate"),
        other => panic!("expected MissingArtifact, got {other:?}"),
    }

    let err = pipeline::run_single_stage(&cfg, "no-such-stage", false).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn single_stage_reruns_one_stage_in_place() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tiny_city_config(tmp.path());
    let out = cfg.run.out_dir.clone();
    pipeline::run_pipeline(&cfg, false).expect("pipeline");

    let before = std::fs::read(artifacts::metrics_csv(&out)).unwrap();
    pipeline::run_single_stage(&cfg, "evaluate", false).expect("re-evaluate");
    let after = std::fs::read(artifacts::metrics_csv(&out)).unwrap();
    assert_eq!(before, after, "re-evaluation changed committed metrics");

    // The manifest on disk still shows all stages complete.
    let manifest = RunManifest::load_or_default(&out).unwrap();
    for stage in pipeline::STAGES {
        assert!(manifest.is_completed(stage));
    }
}
