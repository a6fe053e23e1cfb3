//! On-disk layout of a run directory plus CSV readers and writers for every
//! intermediate artifact. Each stage communicates with the next only through
//! these files, which is what makes runs resumable and inspectable.
//!
//! All floating-point columns use Rust's shortest round-trip `Display`
//! formatting, so reading a file back reproduces the exact bit patterns.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::data::{OriginClass, UserHomeLabel, VenueInfo};
use crate::error::Error;
use crate::eval::{EvalResult, RecLists};
use crate::ev::EV_NAMES;
use crate::rec::ModelId;
use crate::Result;

// ---------------------------------------------------------------------------
// Paths

pub fn config_snapshot(out: &Path) -> PathBuf {
    out.join("config.toml")
}

pub fn city_csv(out: &Path) -> PathBuf {
    out.join("ingest").join("city.csv")
}

pub fn homes_csv(out: &Path) -> PathBuf {
    out.join("ingest").join("homes.csv")
}

pub fn venues_csv(out: &Path) -> PathBuf {
    out.join("ingest").join("venues.csv")
}

pub fn subsample_index_csv(out: &Path) -> PathBuf {
    out.join("subsamples").join("index.csv")
}

pub fn train_csv(out: &Path, key: &str) -> PathBuf {
    out.join("subsamples").join(key).join("train.csv")
}

pub fn test_csv(out: &Path, key: &str) -> PathBuf {
    out.join("subsamples").join(key).join("test.csv")
}

pub fn evs_csv(out: &Path) -> PathBuf {
    out.join("evs.csv")
}

pub fn rec_dump_csv(out: &Path, key: &str, model: ModelId, hyper_key: &str) -> PathBuf {
    out.join("recs")
        .join(key)
        .join(model.as_str())
        .join(format!("{hyper_key}.csv"))
}

pub fn metrics_csv(out: &Path) -> PathBuf {
    out.join("metrics.csv")
}

pub fn exclusion_csv(out: &Path) -> PathBuf {
    out.join("exclusion.csv")
}

pub fn vif_report_csv(out: &Path) -> PathBuf {
    out.join("vif_report.csv")
}

pub fn regression_csv(out: &Path, model: ModelId, metric_tag: &str, cutoff: usize) -> PathBuf {
    out.join("regressions")
        .join(format!("regression_{}_{metric_tag}@{cutoff}.csv", model.as_str()))
}

pub fn model_summary_csv(out: &Path) -> PathBuf {
    out.join("regressions").join("model_summary.csv")
}

pub fn report_md(out: &Path) -> PathBuf {
    out.join("report").join("report.md")
}

pub fn coef_svg(out: &Path, metric_tag: &str, cutoff: usize) -> PathBuf {
    out.join("report").join(format!("coef_{metric_tag}@{cutoff}.svg"))
}

pub fn heatmap_csv(out: &Path, key: &str) -> PathBuf {
    out.join("report").join(format!("heatmap_{key}.csv"))
}

// ---------------------------------------------------------------------------
// Shared plumbing

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))
}

/// Opens `path` for reading; a missing file is reported as a missing
/// artifact of `producer` (the stage that should have written it).
fn reader(path: &Path, producer: &'static str) -> Result<csv::Reader<std::fs::File>> {
    if !path.exists() {
        return Err(Error::MissingArtifact {
            path: path.to_path_buf(),
            stage: producer,
        });
    }
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::parse(path, 1, e.to_string()))
}

fn field<'a>(rec: &'a csv::StringRecord, idx: usize, path: &Path, line: u64) -> Result<&'a str> {
    rec.get(idx)
        .ok_or_else(|| Error::parse(path, line, format!("missing column {idx}")))
}

fn parse_as<T: FromStr>(s: &str, what: &str, path: &Path, line: u64) -> Result<T> {
    s.parse::<T>()
        .map_err(|_| Error::parse(path, line, format!("bad {what}: {s:?}")))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

// ---------------------------------------------------------------------------
// Ingest artifacts

/// `user_id,home_city,class`, sorted by user id. A missing home city is an
/// empty field.
pub fn write_homes(path: &Path, homes: &[UserHomeLabel]) -> Result<()> {
    let mut rows: Vec<&UserHomeLabel> = homes.iter().collect();
    rows.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["user_id", "home_city", "class"]).map_err(fail)?;
    for h in rows {
        w.write_record([
            h.user_id.as_str(),
            h.home_city.as_deref().unwrap_or(""),
            h.class.as_str(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_homes(path: &Path) -> Result<Vec<UserHomeLabel>> {
    let mut rdr = reader(path, "ingest")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        let home_city = field(&rec, 1, path, line)?;
        out.push(UserHomeLabel {
            user_id: field(&rec, 0, path, line)?.to_string(),
            home_city: (!home_city.is_empty()).then(|| home_city.to_string()),
            class: parse_as::<OriginClass>(field(&rec, 2, path, line)?, "origin class", path, line)?,
        });
    }
    Ok(out)
}

/// `venue_id,lat,lon,category,city`, sorted by venue id.
pub fn write_venues(path: &Path, venues: &BTreeMap<String, VenueInfo>) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["venue_id", "lat", "lon", "category", "city"]).map_err(fail)?;
    for (id, v) in venues {
        w.write_record([
            id.as_str(),
            &v.lat.to_string(),
            &v.lon.to_string(),
            v.category.as_str(),
            v.city.as_str(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_venues(path: &Path) -> Result<BTreeMap<String, VenueInfo>> {
    let mut rdr = reader(path, "ingest")?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        out.insert(
            field(&rec, 0, path, line)?.to_string(),
            VenueInfo {
                lat: parse_as(field(&rec, 1, path, line)?, "latitude", path, line)?,
                lon: parse_as(field(&rec, 2, path, line)?, "longitude", path, line)?,
                category: field(&rec, 3, path, line)?.to_string(),
                city: field(&rec, 4, path, line)?.to_string(),
            },
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Subsample artifacts

/// One line of `subsamples/index.csv` summarizing a materialized subsample.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexRow {
    pub key: String,
    pub origin: String,
    pub season: String,
    pub k_core: u32,
    pub drop_top_pct: f64,
    pub degenerate: bool,
    pub users: usize,
    pub venues: usize,
    pub unique_visits: usize,
    pub raw_checkins: usize,
    pub test_users: usize,
}

pub fn write_subsample_index(path: &Path, rows: &[IndexRow]) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record([
        "key", "origin", "season", "k_core", "drop_top_pct", "degenerate", "users", "venues",
        "unique_visits", "raw_checkins", "test_users",
    ])
    .map_err(fail)?;
    for r in rows {
        w.write_record([
            r.key.as_str(),
            r.origin.as_str(),
            r.season.as_str(),
            &r.k_core.to_string(),
            &r.drop_top_pct.to_string(),
            &r.degenerate.to_string(),
            &r.users.to_string(),
            &r.venues.to_string(),
            &r.unique_visits.to_string(),
            &r.raw_checkins.to_string(),
            &r.test_users.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_subsample_index(path: &Path) -> Result<Vec<IndexRow>> {
    let mut rdr = reader(path, "subsample")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        out.push(IndexRow {
            key: field(&rec, 0, path, line)?.to_string(),
            origin: field(&rec, 1, path, line)?.to_string(),
            season: field(&rec, 2, path, line)?.to_string(),
            k_core: parse_as(field(&rec, 3, path, line)?, "k_core", path, line)?,
            drop_top_pct: parse_as(field(&rec, 4, path, line)?, "drop_top_pct", path, line)?,
            degenerate: parse_as(field(&rec, 5, path, line)?, "degenerate flag", path, line)?,
            users: parse_as(field(&rec, 6, path, line)?, "user count", path, line)?,
            venues: parse_as(field(&rec, 7, path, line)?, "venue count", path, line)?,
            unique_visits: parse_as(field(&rec, 8, path, line)?, "visit count", path, line)?,
            raw_checkins: parse_as(field(&rec, 9, path, line)?, "check-in count", path, line)?,
            test_users: parse_as(field(&rec, 10, path, line)?, "test-user count", path, line)?,
        });
    }
    Ok(out)
}

/// `user_id,venue_id,ts` triples (epoch seconds), any order.
pub fn write_triples<'a, I>(path: &Path, triples: I) -> Result<()>
where
    I: IntoIterator<Item = (&'a str, &'a str, i64)>,
{
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["user_id", "venue_id", "ts"]).map_err(fail)?;
    for (user, venue, ts) in triples {
        w.write_record([user, venue, &ts.to_string()]).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_triples(path: &Path, producer: &'static str) -> Result<Vec<(String, String, i64)>> {
    let mut rdr = reader(path, producer)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        out.push((
            field(&rec, 0, path, line)?.to_string(),
            field(&rec, 1, path, line)?.to_string(),
            parse_as(field(&rec, 2, path, line)?, "timestamp", path, line)?,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Trait matrix

/// `subsample,<trait names...>` — one row per non-degenerate subsample,
/// sorted by key.
pub fn write_ev_matrix(path: &Path, rows: &[(String, Vec<f64>)]) -> Result<()> {
    let mut sorted: Vec<&(String, Vec<f64>)> = rows.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    let mut header = vec!["subsample"];
    header.extend(EV_NAMES);
    w.write_record(&header).map_err(fail)?;
    for (key, values) in sorted {
        let mut rec = vec![key.clone()];
        rec.extend(values.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Returns `(ev_names, rows)`; names come from the header so the reader
/// stays compatible with reduced trait sets.
pub fn read_ev_matrix(path: &Path) -> Result<(Vec<String>, Vec<(String, Vec<f64>)>)> {
    let mut rdr = reader(path, "featurize")?;
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if header.len() < 2 || header.get(0) != Some("subsample") {
        return Err(Error::parse(path, 1, "expected `subsample,<trait...>` header"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        let key = field(&rec, 0, path, line)?.to_string();
        let mut values = Vec::with_capacity(names.len());
        for idx in 1..header.len() {
            values.push(parse_as(field(&rec, idx, path, line)?, "trait value", path, line)?);
        }
        rows.push((key, values));
    }
    Ok((names, rows))
}

// ---------------------------------------------------------------------------
// Recommendation dumps

/// `user_id,rank,venue_id,score` — users in id order, rank 1-based within
/// each user, already truncated to the dump depth.
pub fn write_rec_dump(path: &Path, lists: &BTreeMap<String, Vec<(String, f64)>>) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["user_id", "rank", "venue_id", "score"]).map_err(fail)?;
    for (user, ranked) in lists {
        for (rank, (venue, score)) in ranked.iter().enumerate() {
            w.write_record([
                user.as_str(),
                &(rank + 1).to_string(),
                venue.as_str(),
                &score.to_string(),
            ])
            .map_err(fail)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a dump back as plain ranked id lists (scores are only kept on disk
/// for inspection; evaluation ranks by file order).
pub fn read_rec_dump(path: &Path) -> Result<RecLists> {
    let mut rdr = reader(path, "recommend")?;
    let mut out: RecLists = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        let user = field(&rec, 0, path, line)?.to_string();
        let venue = field(&rec, 2, path, line)?.to_string();
        out.entry(user).or_default().push(venue);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Metrics / exclusion

/// Writes winner metrics, one row per (subsample, model):
/// `subsample,model,hyper_key,evaluated_users,ndcg5,ndcg@K...,epc@K...,ie@K...`.
pub fn write_metrics(path: &Path, results: &[EvalResult], cutoffs: &[usize]) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    let mut header: Vec<String> = ["subsample", "model", "hyper_key", "evaluated_users", "ndcg5"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for &k in cutoffs {
        header.push(format!("ndcg@{k}"));
    }
    for &k in cutoffs {
        header.push(format!("epc@{k}"));
    }
    for &k in cutoffs {
        header.push(format!("ie@{k}"));
    }
    w.write_record(&header).map_err(fail)?;
    for r in results {
        if r.cutoffs != cutoffs {
            return Err(Error::Config(format!(
                "metrics row {}/{} was evaluated at cutoffs {:?}, expected {:?}",
                r.subsample, r.model, r.cutoffs, cutoffs
            )));
        }
        let mut rec = vec![
            r.subsample.clone(),
            r.model.as_str().to_string(),
            r.hyper_key.clone(),
            r.evaluated_users.to_string(),
            r.ndcg5.to_string(),
        ];
        rec.extend(r.ndcg.iter().map(|v| v.to_string()));
        rec.extend(r.epc.iter().map(|v| v.to_string()));
        rec.extend(r.item_exposure.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads winner metrics back; cutoffs are recovered from the header.
pub fn read_metrics(path: &Path) -> Result<Vec<EvalResult>> {
    let mut rdr = reader(path, "evaluate")?;
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let mut cutoffs = Vec::new();
    for name in header.iter() {
        if let Some(k) = name.strip_prefix("ndcg@") {
            cutoffs.push(parse_as::<usize>(k, "cutoff", path, 1)?);
        }
    }
    let n = cutoffs.len();
    if header.len() != 5 + 3 * n {
        return Err(Error::parse(path, 1, format!("unexpected metrics header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        let block = |start: usize| -> Result<Vec<f64>> {
            (start..start + n)
                .map(|i| parse_as(field(&rec, i, path, line)?, "metric value", path, line))
                .collect()
        };
        let ndcg = block(5)?;
        let epc = block(5 + n)?;
        let item_exposure = block(5 + 2 * n)?;
        out.push(EvalResult {
            subsample: field(&rec, 0, path, line)?.to_string(),
            model: parse_as(field(&rec, 1, path, line)?, "model id", path, line)?,
            hyper_key: field(&rec, 2, path, line)?.to_string(),
            cutoffs: cutoffs.clone(),
            ndcg,
            epc,
            item_exposure,
            ndcg5: parse_as(field(&rec, 4, path, line)?, "ndcg5", path, line)?,
            evaluated_users: parse_as(field(&rec, 3, path, line)?, "user count", path, line)?,
        });
    }
    Ok(out)
}

/// `model,mean_ndcg5,retained` in canonical model order.
pub fn write_exclusion(
    path: &Path,
    means: &BTreeMap<ModelId, f64>,
    retained: &[ModelId],
) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["model", "mean_ndcg5", "retained"]).map_err(fail)?;
    for (model, mean) in means {
        w.write_record([
            model.as_str(),
            &mean.to_string(),
            &retained.contains(model).to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Returns `(means, retained)` from `exclusion.csv`.
pub fn read_exclusion(path: &Path) -> Result<(BTreeMap<ModelId, f64>, Vec<ModelId>)> {
    let mut rdr = reader(path, "exclude")?;
    let mut means = BTreeMap::new();
    let mut retained = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        let model: ModelId = parse_as(field(&rec, 0, path, line)?, "model id", path, line)?;
        means.insert(model, parse_as(field(&rec, 1, path, line)?, "mean ndcg5", path, line)?);
        if parse_as::<bool>(field(&rec, 2, path, line)?, "retained flag", path, line)? {
            retained.push(model);
        }
    }
    Ok((means, retained))
}

// ---------------------------------------------------------------------------
// Collinearity / regressions

/// One `vif_report.csv` row; `vif_*` fields are empty when undefined for the
/// row's status (constant columns never get a VIF, dropped columns have no
/// final VIF).
#[derive(Debug, Clone, PartialEq)]
pub struct VifRow {
    pub ev: String,
    pub vif_before: Option<f64>,
    pub vif_after: Option<f64>,
    /// `retained`, `dropped`, or `constant`.
    pub status: String,
}

pub fn write_vif_report(path: &Path, rows: &[VifRow]) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["ev", "vif_before", "vif_after", "status"]).map_err(fail)?;
    let fmt = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.ev.as_str(),
            &fmt(&r.vif_before),
            &fmt(&r.vif_after),
            r.status.as_str(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_vif_report(path: &Path) -> Result<Vec<VifRow>> {
    let mut rdr = reader(path, "eliminate")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_as(s, "vif", path, line).map(Some)
            }
        };
        out.push(VifRow {
            ev: field(&rec, 0, path, line)?.to_string(),
            vif_before: opt(field(&rec, 1, path, line)?)?,
            vif_after: opt(field(&rec, 2, path, line)?)?,
            status: field(&rec, 3, path, line)?.to_string(),
        });
    }
    Ok(out)
}

/// One regression table: `term,theta,stderr,t,p,stars` with the intercept
/// first, matching [`crate::explain::RegressionFit`] coefficient order.
pub fn write_regression(path: &Path, coefs: &[crate::explain::Coefficient]) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["term", "theta", "stderr", "t", "p", "stars"]).map_err(fail)?;
    for c in coefs {
        w.write_record([
            c.name.as_str(),
            &c.theta.to_string(),
            &c.stderr.to_string(),
            &c.t.to_string(),
            &c.p.to_string(),
            c.stars,
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a regression table back. Stars are recomputed from the parsed
/// p-value, which keeps them consistent with the file by construction.
pub fn read_regression(path: &Path) -> Result<Vec<crate::explain::Coefficient>> {
    let mut rdr = reader(path, "regress")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        let p: f64 = parse_as(field(&rec, 4, path, line)?, "p-value", path, line)?;
        out.push(crate::explain::Coefficient {
            name: field(&rec, 0, path, line)?.to_string(),
            theta: parse_as(field(&rec, 1, path, line)?, "theta", path, line)?,
            stderr: parse_as(field(&rec, 2, path, line)?, "stderr", path, line)?,
            t: parse_as(field(&rec, 3, path, line)?, "t", path, line)?,
            p,
            stars: crate::explain::significance_stars(p),
        });
    }
    Ok(out)
}

/// One `model_summary.csv` row per fitted regression.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: ModelId,
    pub metric_tag: String,
    pub cutoff: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub observations: usize,
}

pub fn write_model_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["model", "metric", "cutoff", "r2", "adj_r2", "observations"]).map_err(fail)?;
    for r in rows {
        w.write_record([
            r.model.as_str(),
            r.metric_tag.as_str(),
            &r.cutoff.to_string(),
            &r.r_squared.to_string(),
            &r.adj_r_squared.to_string(),
            &r.observations.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One non-empty cell of a spatial density grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapRow {
    pub lat_bin: usize,
    pub lon_bin: usize,
    pub lat_center: f64,
    pub lon_center: f64,
    pub count: u64,
}

/// `lat_bin,lon_bin,lat_center,lon_center,count` — sparse, zero cells
/// omitted, sorted by (lat_bin, lon_bin).
pub fn write_heatmap(path: &Path, rows: &[HeatmapRow]) -> Result<()> {
    let mut w = writer(path)?;
    let fail = |e: csv::Error| Error::parse(path, 0, e.to_string());
    w.write_record(["lat_bin", "lon_bin", "lat_center", "lon_center", "count"]).map_err(fail)?;
    for r in rows {
        w.write_record([
            r.lat_bin.to_string(),
            r.lon_bin.to_string(),
            r.lat_center.to_string(),
            r.lon_center.to_string(),
            r.count.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_model_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut rdr = reader(path, "regress")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = line_of(&rec);
        out.push(SummaryRow {
            model: parse_as(field(&rec, 0, path, line)?, "model id", path, line)?,
            metric_tag: field(&rec, 1, path, line)?.to_string(),
            cutoff: parse_as(field(&rec, 2, path, line)?, "cutoff", path, line)?,
            r_squared: parse_as(field(&rec, 3, path, line)?, "r2", path, line)?,
            adj_r_squared: parse_as(field(&rec, 4, path, line)?, "adj r2", path, line)?,
            observations: parse_as(field(&rec, 5, path, line)?, "observation count", path, line)?,
        });
    }
    Ok(out)
}
