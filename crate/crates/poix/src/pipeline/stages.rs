//! The pipeline stages proper. Each function reads only committed artifacts
//! from the run directory and writes its own, so any stage can be re-run in
//! isolation and a missing input names the stage that should produce it.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::config::{DataFormat, PipelineConfig};
use crate::data::{
    detect_homes, parse_canonical_csv, parse_tist2015, preprocess, write_canonical_csv, CheckIn,
    InteractionMatrix, UserHomeLabel, VenueCatalog, VenueInfo,
};
use crate::error::Error;
use crate::eval::{
    dedupe_test, dump_depth, evaluate_lists, exclusion_filter, job_seed, mean_ndcg5_per_model,
    EvalResult, TestItems,
};
use crate::explain::{eliminate_collinear, explain_all, normalize_design};
use crate::rec::{self, grid_for, ModelId};
use crate::subsample::{generate_grid, materialize, TestSet};
use crate::{ev, par, Result};

use super::artifacts::{self, IndexRow, SummaryRow, VifRow};
use super::manifest::RunManifest;

// ---------------------------------------------------------------------------
// ingest

/// Parses the raw input, removes residence noise and duplicates, labels user
/// origins from the global stream, and writes the city check-ins plus the
/// home-label and venue tables.
pub fn ingest(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let raw: Vec<CheckIn> = match cfg.data.format {
        DataFormat::Canonical => parse_canonical_csv(&cfg.data.checkins)?,
        DataFormat::Tist2015 => {
            let pois = cfg
                .data
                .pois
                .as_ref()
                .ok_or_else(|| Error::Config("tist2015 input needs `data.pois`".into()))?;
            let (rows, warnings) = parse_tist2015(&cfg.data.checkins, pois, &cfg.data, None)?;
            if warnings.missing_venue + warnings.bad_time > 0 {
                eprintln!(
                    "[ingest] dropped {} check-ins without venue metadata, {} with bad timestamps",
                    warnings.missing_venue, warnings.bad_time
                );
            }
            rows
        }
    };
    let global = preprocess(raw, &cfg.data.residence_category_names);

    // Origin labels need the user's whole trace, including visits far from
    // the target city, so detection runs before the bbox cut.
    let homes: Vec<UserHomeLabel> = {
        let map = detect_homes(&global, &cfg.data.target_city, &cfg.data.target_country);
        let mut v: Vec<UserHomeLabel> = map.into_values().collect();
        v.sort_by(|a, b| a.user_id.cmp(&b.user_id));
        v
    };

    let city: Vec<CheckIn> = global
        .into_iter()
        .filter(|c| cfg.data.bbox.contains(c.lat, c.lon))
        .collect();
    if city.is_empty() {
        return Err(Error::Insufficient(
            "no check-ins inside the target bounding box".into(),
        ));
    }

    let mut venues: BTreeMap<String, VenueInfo> = BTreeMap::new();
    for c in &city {
        venues.entry(c.venue_id.clone()).or_insert_with(|| VenueInfo {
            lat: c.lat,
            lon: c.lon,
            category: c.category.clone(),
            city: c.city.clone(),
        });
    }

    write_canonical_csv(&artifacts::city_csv(out), &city)?;
    artifacts::write_homes(&artifacts::homes_csv(out), &homes)?;
    artifacts::write_venues(&artifacts::venues_csv(out), &venues)?;
    eprintln!(
        "[ingest] {} city check-ins, {} venues, {} labeled users",
        city.len(),
        venues.len(),
        homes.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// subsample

/// Materializes the whole subsample grid in parallel and writes per-key
/// train/test splits plus the index table. Degenerate keys get an index row
/// but no split files.
pub fn subsample(cfg: &PipelineConfig, out: &Path, manifest: &mut RunManifest) -> Result<()> {
    let city_path = artifacts::city_csv(out);
    if !city_path.exists() {
        return Err(Error::MissingArtifact { path: city_path, stage: "ingest" });
    }
    let city = parse_canonical_csv(&city_path)?;
    let labels: HashMap<String, UserHomeLabel> = artifacts::read_homes(&artifacts::homes_csv(out))?
        .into_iter()
        .map(|h| (h.user_id.clone(), h))
        .collect();

    let specs = generate_grid(&cfg.subsampling);
    manifest.subsample_keys = specs.iter().map(|s| s.key()).collect();
    manifest.degenerate.clear();

    let subsamples = par::map_slice(&specs, |spec| materialize(*spec, &city, &labels));

    let mut index = Vec::with_capacity(subsamples.len());
    for s in &subsamples {
        let key = s.spec.key();
        index.push(IndexRow {
            key: key.clone(),
            origin: s.spec.origin.as_str().to_string(),
            season: s.spec.season.as_str().to_string(),
            k_core: s.spec.k_core,
            drop_top_pct: s.spec.drop_top_pct,
            degenerate: s.degenerate,
            users: s.full.n_users(),
            venues: s.full.n_items(),
            unique_visits: s.full.unique_count() as usize,
            raw_checkins: s.full.raw_count() as usize,
            test_users: s.test.len(),
        });
        if s.degenerate {
            manifest.add_degenerate(&key);
            continue;
        }
        write_train(&artifacts::train_csv(out, &key), &s.train)?;
        write_test(&artifacts::test_csv(out, &key), &s.test)?;
    }
    artifacts::write_subsample_index(&artifacts::subsample_index_csv(out), &index)?;
    eprintln!(
        "[subsample] {} subsamples materialized, {} degenerate",
        subsamples.len(),
        manifest.degenerate.len()
    );
    Ok(())
}

fn write_train(path: &Path, train: &InteractionMatrix) -> Result<()> {
    let triples = (0..train.n_users()).flat_map(|u| {
        train
            .raw_of(u)
            .iter()
            .map(move |e| (train.user_id(u), train.item_id(e.item as usize), e.ts))
    });
    artifacts::write_triples(path, triples)
}

fn write_test(path: &Path, test: &TestSet) -> Result<()> {
    let triples = test.iter().flat_map(|(user, items)| {
        items.iter().map(move |(venue, ts)| (user.as_str(), venue.as_str(), *ts))
    });
    artifacts::write_triples(path, triples)
}

fn load_train(out: &Path, key: &str) -> Result<(Vec<(String, String, i64)>, InteractionMatrix)> {
    let triples = artifacts::read_triples(&artifacts::train_csv(out, key), "subsample")?;
    let matrix =
        InteractionMatrix::from_events(triples.iter().map(|(u, v, t)| (u.as_str(), v.as_str(), *t)));
    Ok((triples, matrix))
}

fn load_test(out: &Path, key: &str) -> Result<TestSet> {
    let triples = artifacts::read_triples(&artifacts::test_csv(out, key), "subsample")?;
    let mut test: TestSet = BTreeMap::new();
    for (user, venue, ts) in triples {
        test.entry(user).or_default().push((venue, ts));
    }
    Ok(test)
}

/// Non-degenerate subsample keys in grid order. Usually straight from the
/// manifest; when the manifest was lost (stage-at-a-time runs in a copied
/// directory) the committed index provides the same list.
pub(super) fn usable_keys(out: &Path, manifest: &RunManifest) -> Result<Vec<String>> {
    if !manifest.subsample_keys.is_empty() {
        return Ok(manifest.usable_keys());
    }
    let index = artifacts::read_subsample_index(&artifacts::subsample_index_csv(out))?;
    Ok(index
        .into_iter()
        .filter(|r| !r.degenerate && !manifest.is_degenerate(&r.key))
        .map(|r| r.key)
        .collect())
}

// ---------------------------------------------------------------------------
// featurize

/// Computes the 32-trait vector of every usable subsample (in parallel) and
/// writes the trait matrix. Subsamples whose traits cannot be computed are
/// downgraded to degenerate with a warning instead of failing the run.
pub fn featurize(cfg: &PipelineConfig, out: &Path, manifest: &mut RunManifest) -> Result<()> {
    let catalog = VenueCatalog::from_rows(artifacts::read_venues(&artifacts::venues_csv(out))?);
    let cc = (cfg.data.city_center_lat, cfg.data.city_center_lon);

    let keys = usable_keys(out, manifest)?;
    let mut loaded = Vec::with_capacity(keys.len());
    for key in keys {
        let (_, matrix) = load_train(out, &key)?;
        loaded.push((key, matrix));
    }

    let computed = par::map_slice(&loaded, |(key, matrix)| {
        (key.clone(), ev::compute_all(matrix, &catalog, cc))
    });

    let mut rows = Vec::with_capacity(computed.len());
    for (key, result) in computed {
        match result {
            Ok(vector) => rows.push((key, vector.values.to_vec())),
            Err(e) => {
                eprintln!("[featurize] {key}: traits failed ({e}); marking degenerate");
                manifest.add_degenerate(&key);
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Insufficient("no subsample produced a trait vector".into()));
    }
    artifacts::write_ev_matrix(&artifacts::evs_csv(out), &rows)?;
    eprintln!("[featurize] trait vectors for {} subsamples", rows.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// recommend

/// Trains every configured (model, hyper-parameter) job on every usable
/// subsample and dumps ranked lists for the test users. Jobs whose dump
/// already exists are skipped unless `force` is set; jobs whose training
/// fails leave a header-only dump so evaluation can tell "attempted and
/// failed" from "never ran".
pub fn recommend(cfg: &PipelineConfig, out: &Path, manifest: &RunManifest, force: bool) -> Result<()> {
    let catalog = VenueCatalog::from_rows(artifacts::read_venues(&artifacts::venues_csv(out))?);
    let depth = dump_depth(&cfg.evaluation.cutoffs);

    for key in usable_keys(out, manifest)? {
        let (_, train) = load_train(out, &key)?;
        let test_items = dedupe_test(&load_test(out, &key)?);
        let coords = ev::item_coords(&train, &catalog)?;
        let evaluable: Vec<(String, usize)> = test_items
            .iter()
            .filter(|(_, items)| !items.is_empty())
            .filter_map(|(user, _)| train.user_index(user).map(|u| (user.clone(), u)))
            .collect();

        let jobs: Vec<(ModelId, rec::HyperParams)> = cfg
            .evaluation
            .models
            .iter()
            .flat_map(|&m| grid_for(m, &cfg.hyper).into_iter().map(move |p| (m, p)))
            .collect();

        let outcomes = par::map_slice(&jobs, |(model, params)| -> Result<&'static str> {
            let hyper_key = params.key();
            let path = artifacts::rec_dump_csv(out, &key, *model, &hyper_key);
            if path.exists() && !force {
                return Ok("kept");
            }
            let seed = job_seed(cfg.run.seed, &key, *model, &hyper_key);
            let lists: BTreeMap<String, Vec<(String, f64)>> =
                match rec::fit(*model, params, &train, &coords, seed) {
                    Ok(fitted) => evaluable
                        .iter()
                        .map(|(user, u)| {
                            (user.clone(), rec::recommend(fitted.as_ref(), &train, *u, depth))
                        })
                        .collect(),
                    Err(e) => {
                        eprintln!("[recommend] {key}/{model}/{hyper_key}: training failed ({e})");
                        BTreeMap::new()
                    }
                };
            artifacts::write_rec_dump(&path, &lists)?;
            Ok("written")
        });

        let mut written = 0usize;
        let mut kept = 0usize;
        for outcome in outcomes {
            match outcome? {
                "written" => written += 1,
                _ => kept += 1,
            }
        }
        eprintln!("[recommend] {key}: {written} dumps written, {kept} kept");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate

/// Scores every dump against its test set and keeps, per (subsample, model),
/// the grid configuration with the best nDCG@5 (earliest grid entry wins
/// ties). Pairs without a single scorable configuration are skipped with a
/// warning.
pub fn evaluate(cfg: &PipelineConfig, out: &Path, manifest: &RunManifest) -> Result<()> {
    let mut keys = usable_keys(out, manifest)?;
    keys.sort();

    let models: Vec<ModelId> = ModelId::ALL
        .iter()
        .copied()
        .filter(|m| cfg.evaluation.models.contains(m))
        .collect();

    let mut results: Vec<EvalResult> = Vec::new();
    for key in &keys {
        let (_, train) = load_train(out, key)?;
        let test_items: TestItems = dedupe_test(&load_test(out, key)?);
        for &model in &models {
            let winner = select_winner(cfg, out, key, model, &train, &test_items)?;
            match winner {
                Some(result) => results.push(result),
                None => eprintln!("[evaluate] {key}/{model}: no scorable configuration, skipped"),
            }
        }
    }
    if results.is_empty() {
        return Err(Error::Insufficient("no (subsample, model) pair was scorable".into()));
    }
    artifacts::write_metrics(&artifacts::metrics_csv(out), &results, &cfg.evaluation.cutoffs)?;
    eprintln!("[evaluate] {} winner rows", results.len());
    Ok(())
}

fn select_winner(
    cfg: &PipelineConfig,
    out: &Path,
    key: &str,
    model: ModelId,
    train: &InteractionMatrix,
    test_items: &TestItems,
) -> Result<Option<EvalResult>> {
    let mut best: Option<EvalResult> = None;
    for params in grid_for(model, &cfg.hyper) {
        let hyper_key = params.key();
        let path = artifacts::rec_dump_csv(out, key, model, &hyper_key);
        let recs = artifacts::read_rec_dump(&path)?;
        let block = match evaluate_lists(&recs, test_items, train, &cfg.evaluation.cutoffs) {
            Ok(b) => b,
            // Header-only dump (training failed) or nothing evaluable: this
            // configuration simply doesn't compete.
            Err(Error::Insufficient(_)) => continue,
            Err(e) => return Err(e),
        };
        let candidate = EvalResult {
            subsample: key.to_string(),
            model,
            hyper_key,
            cutoffs: block.cutoffs,
            ndcg: block.ndcg,
            epc: block.epc,
            item_exposure: block.item_exposure,
            ndcg5: block.ndcg5,
            evaluated_users: block.evaluated_users,
        };
        let better = best.as_ref().is_none_or(|b| candidate.ndcg5 > b.ndcg5);
        if better {
            best = Some(candidate);
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// exclude

/// Applies the popularity-baseline filter and records each model's mean
/// nDCG@5 alongside the verdict.
pub fn exclude(out: &Path) -> Result<()> {
    let results = artifacts::read_metrics(&artifacts::metrics_csv(out))?;
    let means = mean_ndcg5_per_model(&results);
    let retained = exclusion_filter(&results);
    artifacts::write_exclusion(&artifacts::exclusion_csv(out), &means, &retained)?;
    let dropped: Vec<&str> = means
        .keys()
        .filter(|m| !retained.contains(m))
        .map(|m| m.as_str())
        .collect();
    eprintln!(
        "[exclude] retained {:?}, dropped {:?}",
        retained.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
        dropped
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// eliminate

/// Normalizes the trait matrix, runs the iterative collinearity elimination,
/// and writes the audit trail: every trait with its first-pass VIF, its
/// final VIF when retained, and why it is absent otherwise.
pub fn eliminate(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let (names, rows) = artifacts::read_ev_matrix(&artifacts::evs_csv(out))?;
    let columns = transpose(&names, &rows)?;
    let design = normalize_design(&names, &columns);
    let elim = eliminate_collinear(&design.names, &design.columns, cfg.explain.vif_threshold)?;

    let by_name: HashMap<&str, &crate::explain::VifEntry> = elim
        .report
        .entries
        .iter()
        .map(|e| (e.name.as_str(), e))
        .collect();
    let mut report_rows = Vec::with_capacity(names.len());
    for name in &names {
        let row = if design.removed.contains(name) {
            VifRow {
                ev: name.clone(),
                vif_before: None,
                vif_after: None,
                status: "constant".into(),
            }
        } else {
            let entry = by_name.get(name.as_str()).ok_or_else(|| {
                Error::Config(format!("trait {name} missing from the collinearity report"))
            })?;
            VifRow {
                ev: name.clone(),
                vif_before: Some(entry.vif_before),
                vif_after: entry.vif_after,
                status: if elim.report.dropped.contains(name) { "dropped" } else { "retained" }
                    .into(),
            }
        };
        report_rows.push(row);
    }
    artifacts::write_vif_report(&artifacts::vif_report_csv(out), &report_rows)?;
    eprintln!(
        "[eliminate] {} traits retained, {} dropped, {} constant (threshold {})",
        elim.retained.len(),
        elim.report.dropped.len(),
        design.removed.len(),
        cfg.explain.vif_threshold
    );
    Ok(())
}

fn transpose(names: &[String], rows: &[(String, Vec<f64>)]) -> Result<Vec<Vec<f64>>> {
    let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
    for (key, values) in rows {
        if values.len() != names.len() {
            return Err(Error::Config(format!(
                "trait row {key} has {} values, expected {}",
                values.len(),
                names.len()
            )));
        }
        for (j, v) in values.iter().enumerate() {
            columns[j].push(*v);
        }
    }
    Ok(columns)
}

// ---------------------------------------------------------------------------
// regress

/// Fits one regression per retained model × metric × cutoff and writes the
/// coefficient tables plus the fit-quality summary. The collinearity
/// elimination inside is deterministic, so it reproduces exactly the set
/// recorded by the eliminate stage.
pub fn regress(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let (names, rows) = artifacts::read_ev_matrix(&artifacts::evs_csv(out))?;
    let results = artifacts::read_metrics(&artifacts::metrics_csv(out))?;
    let (_, retained_models) = artifacts::read_exclusion(&artifacts::exclusion_csv(out))?;

    let explanation = explain_all(
        &names,
        &rows,
        &results,
        &retained_models,
        &cfg.evaluation.cutoffs,
        cfg.explain.vif_threshold,
    )?;
    for w in &explanation.warnings {
        eprintln!("[regress] {w}");
    }
    if explanation.fits.is_empty() {
        return Err(Error::Insufficient("no regression could be fitted".into()));
    }

    let mut summary = Vec::with_capacity(explanation.fits.len());
    for record in &explanation.fits {
        let path = artifacts::regression_csv(out, record.model, record.metric.tag(), record.cutoff);
        artifacts::write_regression(&path, &record.fit.coefficients)?;
        summary.push(SummaryRow {
            model: record.model,
            metric_tag: record.metric.tag().to_string(),
            cutoff: record.cutoff,
            r_squared: record.fit.r_squared,
            adj_r_squared: record.fit.adj_r_squared,
            observations: record.rows_used,
        });
    }
    artifacts::write_model_summary(&artifacts::model_summary_csv(out), &summary)?;
    eprintln!("[regress] {} regressions fitted", explanation.fits.len());
    Ok(())
}
