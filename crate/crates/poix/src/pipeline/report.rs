//! Final reporting stage: a human-readable Markdown summary, one
//! dot-and-whisker SVG per metric/cutoff, and per-subsample spatial density
//! grids. Everything is rendered from committed artifacts, never from
//! in-memory state, so the stage works in a resumed run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::config::PipelineConfig;
use crate::error::Error;
use crate::eval::EvalResult;
use crate::explain::{t_quantile, Coefficient, MetricKind};
use crate::rec::ModelId;
use crate::Result;

use super::artifacts::{self, HeatmapRow, IndexRow, SummaryRow, VifRow};
use super::manifest::RunManifest;

type CoefKey = (ModelId, String, usize);

/// Renders `report/report.md` plus the coefficient SVGs and heat-map grids.
pub fn report(cfg: &PipelineConfig, out: &Path, manifest: &RunManifest) -> Result<()> {
    let index = artifacts::read_subsample_index(&artifacts::subsample_index_csv(out))?;
    let metrics = artifacts::read_metrics(&artifacts::metrics_csv(out))?;
    let (means, retained_models) = artifacts::read_exclusion(&artifacts::exclusion_csv(out))?;
    let vif_rows = artifacts::read_vif_report(&artifacts::vif_report_csv(out))?;
    let summary = artifacts::read_model_summary(&artifacts::model_summary_csv(out))?;

    let mut tables: BTreeMap<CoefKey, Vec<Coefficient>> = BTreeMap::new();
    for s in &summary {
        let path = artifacts::regression_csv(out, s.model, &s.metric_tag, s.cutoff);
        tables.insert((s.model, s.metric_tag.clone(), s.cutoff), artifacts::read_regression(&path)?);
    }

    let svgs = write_coefficient_svgs(out, &cfg.evaluation.cutoffs, &summary, &tables)?;
    let heatmaps = write_heatmaps(cfg, out, manifest)?;

    let md = render_markdown(
        cfg, manifest, &index, &metrics, &means, &retained_models, &vif_rows, &summary, &tables,
        &svgs, &heatmaps,
    );
    let path = artifacts::report_md(out);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(&path, md).map_err(|e| Error::io(&path, e))?;
    eprintln!("[report] report.md, {} figures, {} heat maps", svgs.len(), heatmaps.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// Markdown

#[allow(clippy::too_many_arguments)]
fn render_markdown(
    cfg: &PipelineConfig,
    manifest: &RunManifest,
    index: &[IndexRow],
    metrics: &[EvalResult],
    means: &BTreeMap<ModelId, f64>,
    retained_models: &[ModelId],
    vif_rows: &[VifRow],
    summary: &[SummaryRow],
    tables: &BTreeMap<CoefKey, Vec<Coefficient>>,
    svgs: &[String],
    heatmaps: &[String],
) -> String {
    let mut md = String::new();
    let cutoffs = &cfg.evaluation.cutoffs;

    md.push_str("# Run report\n\n");

    md.push_str("## Configuration\n\n");
    let _ = writeln!(md, "- master seed: {}", cfg.run.seed);
    let _ = writeln!(md, "- input: {} ({:?})", cfg.data.checkins.display(), cfg.data.format);
    let _ = writeln!(
        md,
        "- cutoffs: {}",
        cutoffs.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(
        md,
        "- models: {}",
        cfg.evaluation.models.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(md, "- VIF threshold: {}", cfg.explain.vif_threshold);
    md.push('\n');

    md.push_str("## Subsamples\n\n");
    let usable: Vec<&IndexRow> = index.iter().filter(|r| !manifest.is_degenerate(&r.key)).collect();
    let _ = writeln!(
        md,
        "{} grid cells, {} usable, {} degenerate. Full listing: `subsamples/index.csv`.\n",
        index.len(),
        usable.len(),
        index.len() - usable.len()
    );
    if !usable.is_empty() {
        md.push_str("| statistic | users | venues | unique visits | test users |\n");
        md.push_str("|---|---|---|---|---|\n");
        for (label, pick) in [
            ("min", 0usize),
            ("median", usable.len() / 2),
            ("max", usable.len().saturating_sub(1)),
        ] {
            let col = |f: fn(&IndexRow) -> usize| {
                let mut v: Vec<usize> = usable.iter().map(|r| f(r)).collect();
                v.sort_unstable();
                v[pick]
            };
            let _ = writeln!(
                md,
                "| {label} | {} | {} | {} | {} |",
                col(|r| r.users),
                col(|r| r.venues),
                col(|r| r.unique_visits),
                col(|r| r.test_users)
            );
        }
        md.push('\n');
    }
    let degenerate: Vec<&str> = manifest.degenerate.iter().map(String::as_str).collect();
    if !degenerate.is_empty() {
        let _ = writeln!(md, "Degenerate keys: {}\n", degenerate.join(", "));
    }

    md.push_str("## Recommendation quality\n\n");
    md.push_str("Winning configuration per subsample; cells are mean ± population std over subsamples.\n\n");
    md.push_str("| model |");
    for metric in MetricKind::ALL {
        for &k in cutoffs {
            let _ = write!(md, " {}@{k} |", metric.label());
        }
    }
    md.push('\n');
    md.push_str("|---|");
    for _ in 0..MetricKind::ALL.len() * cutoffs.len() {
        md.push_str("---|");
    }
    md.push('\n');
    for model in ModelId::ALL {
        let rows: Vec<&EvalResult> = metrics.iter().filter(|r| r.model == model).collect();
        if rows.is_empty() {
            continue;
        }
        let _ = write!(md, "| {} |", model.as_str());
        for metric in MetricKind::ALL {
            for (idx, _) in cutoffs.iter().enumerate() {
                let values: Vec<f64> = rows.iter().map(|r| metric.value(r, idx)).collect();
                let (mean, std) = mean_std(&values);
                let _ = write!(md, " {mean:.4} ± {std:.4} |");
            }
        }
        md.push('\n');
    }
    md.push('\n');

    md.push_str("## Baseline filter\n\n");
    md.push_str("Models whose mean nDCG@5 falls below the popularity baseline are excluded from the regressions.\n\n");
    md.push_str("| model | mean nDCG@5 | retained |\n|---|---|---|\n");
    for (model, mean) in means {
        let _ = writeln!(
            md,
            "| {} | {mean:.4} | {} |",
            model.as_str(),
            if retained_models.contains(model) { "yes" } else { "no" }
        );
    }
    md.push('\n');

    md.push_str("## Collinearity\n\n");
    let constant: Vec<&str> =
        vif_rows.iter().filter(|r| r.status == "constant").map(|r| r.ev.as_str()).collect();
    let dropped: Vec<&str> =
        vif_rows.iter().filter(|r| r.status == "dropped").map(|r| r.ev.as_str()).collect();
    let retained_evs =
        vif_rows.iter().filter(|r| r.status == "retained").count();
    let _ = writeln!(
        md,
        "{retained_evs} traits retained at threshold {}; dropped: {}; constant: {}.\n",
        cfg.explain.vif_threshold,
        if dropped.is_empty() { "none".to_string() } else { dropped.join(", ") },
        if constant.is_empty() { "none".to_string() } else { constant.join(", ") },
    );
    md.push_str("| trait | first-pass VIF | final VIF | status |\n|---|---|---|---|\n");
    for r in vif_rows {
        let fmt = |v: &Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "—".into());
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} |",
            r.ev,
            fmt(&r.vif_before),
            fmt(&r.vif_after),
            r.status
        );
    }
    md.push('\n');

    md.push_str("## Regression fit quality\n\n");
    md.push_str("| model | metric | cutoff | R² | adj. R² | n |\n|---|---|---|---|---|---|\n");
    for s in summary {
        let label = tag_label(&s.metric_tag);
        let _ = writeln!(
            md,
            "| {} | {label} | {} | {:.3} | {:.3} | {} |",
            s.model.as_str(),
            s.cutoff,
            s.r_squared,
            s.adj_r_squared,
            s.observations
        );
    }
    md.push('\n');

    md.push_str("## Coefficients\n\n");
    md.push_str("Normalized traits; `*` p < 0.05, `**` p < 0.01, `***` p < 0.001.\n\n");
    for metric in MetricKind::ALL {
        for &k in cutoffs {
            let models: Vec<ModelId> = ModelId::ALL
                .iter()
                .copied()
                .filter(|m| tables.contains_key(&(*m, metric.tag().to_string(), k)))
                .collect();
            if models.is_empty() {
                continue;
            }
            let _ = writeln!(md, "### {}@{k}\n", metric.label());
            md.push_str("| term |");
            for m in &models {
                let _ = write!(md, " {} |", m.as_str());
            }
            md.push('\n');
            md.push_str("|---|");
            for _ in &models {
                md.push_str("---|");
            }
            md.push('\n');
            let terms: Vec<String> = tables[&(models[0], metric.tag().to_string(), k)]
                .iter()
                .map(|c| c.name.clone())
                .collect();
            for term in &terms {
                let _ = write!(md, "| {term} |");
                for m in &models {
                    let coefs = &tables[&(*m, metric.tag().to_string(), k)];
                    match coefs.iter().find(|c| &c.name == term) {
                        Some(c) => {
                            let _ = write!(md, " {:.4}{} |", c.theta, c.stars);
                        }
                        None => md.push_str(" — |"),
                    }
                }
                md.push('\n');
            }
            md.push('\n');
        }
    }

    md.push_str("## Figures\n\n");
    for f in svgs {
        let _ = writeln!(md, "- `{f}` — coefficient estimates with 95% confidence whiskers");
    }
    if !heatmaps.is_empty() {
        let _ = writeln!(
            md,
            "- {} spatial density grids (`heatmap_<subsample>.csv`), binned over the configured bounding box",
            heatmaps.len()
        );
    }
    md
}

fn tag_label(tag: &str) -> &'static str {
    MetricKind::ALL
        .iter()
        .find(|m| m.tag() == tag)
        .map(|m| m.label())
        .unwrap_or("?")
}

/// Mean and population standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

// ---------------------------------------------------------------------------
// Coefficient SVGs

struct Panel {
    model: ModelId,
    /// (trait name, estimate, half-width of the 95% interval)
    rows: Vec<(String, f64, f64)>,
}

fn write_coefficient_svgs(
    out: &Path,
    cutoffs: &[usize],
    summary: &[SummaryRow],
    tables: &BTreeMap<CoefKey, Vec<Coefficient>>,
) -> Result<Vec<String>> {
    let observations: BTreeMap<CoefKey, usize> = summary
        .iter()
        .map(|s| ((s.model, s.metric_tag.clone(), s.cutoff), s.observations))
        .collect();

    let mut files = Vec::new();
    for metric in MetricKind::ALL {
        for &k in cutoffs {
            let mut panels = Vec::new();
            for model in ModelId::ALL {
                let key = (model, metric.tag().to_string(), k);
                let Some(coefs) = tables.get(&key) else { continue };
                let obs = observations.get(&key).copied().unwrap_or(0);
                // coefs includes the intercept, so predictors = len - 1 and
                // the residual dof is obs - len.
                let dof = obs.saturating_sub(coefs.len()).max(1);
                let t95 = t_quantile(0.975, dof as f64);
                let rows: Vec<(String, f64, f64)> = coefs
                    .iter()
                    .filter(|c| c.name != "(Intercept)")
                    .map(|c| (c.name.clone(), c.theta, t95 * c.stderr))
                    .collect();
                if !rows.is_empty() {
                    panels.push(Panel { model, rows });
                }
            }
            if panels.is_empty() {
                continue;
            }
            let svg = render_coef_svg(metric, k, &panels);
            let path = artifacts::coef_svg(out, metric.tag(), k);
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            files.push(format!("coef_{}@{k}.svg", metric.tag()));
        }
    }
    Ok(files)
}

fn render_coef_svg(metric: MetricKind, cutoff: usize, panels: &[Panel]) -> String {
    const LEFT: f64 = 150.0;
    const PLOT_W: f64 = 540.0;
    const RIGHT: f64 = 30.0;
    const ROW_H: f64 = 16.0;
    const TITLE_H: f64 = 24.0;
    const AXIS_H: f64 = 30.0;
    const GAP: f64 = 16.0;
    const TOP: f64 = 34.0;

    // One x-range shared by every panel so estimates are comparable.
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for p in panels {
        for (_, theta, w) in &p.rows {
            lo = lo.min(theta - w);
            hi = hi.max(theta + w);
        }
    }
    if !(hi > lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let x = |v: f64| LEFT + (v - lo) / (hi - lo) * PLOT_W;

    let width = LEFT + PLOT_W + RIGHT;
    let height = TOP
        + panels
            .iter()
            .map(|p| TITLE_H + p.rows.len() as f64 * ROW_H + AXIS_H + GAP)
            .sum::<f64>();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{width:.0}" height="{height:.0}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14" font-weight="bold">{} at cutoff {cutoff}</text>"#,
        LEFT + PLOT_W / 2.0,
        metric.label()
    );

    let mut y0 = TOP;
    for p in panels {
        let rows_h = p.rows.len() as f64 * ROW_H;
        let _ = writeln!(
            s,
            r#"<text x="{LEFT:.1}" y="{:.1}" font-weight="bold">{}</text>"#,
            y0 + 14.0,
            p.model.as_str()
        );
        let body_top = y0 + TITLE_H;
        // Zero reference line.
        let _ = writeln!(
            s,
            r##"<line x1="{zx:.1}" y1="{body_top:.1}" x2="{zx:.1}" y2="{:.1}" stroke="#999" stroke-dasharray="3 3"/>"##,
            body_top + rows_h,
            zx = x(0.0)
        );
        for (i, (name, theta, w)) in p.rows.iter().enumerate() {
            let cy = body_top + (i as f64 + 0.5) * ROW_H;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{name}</text>"#,
                LEFT - 8.0,
                cy + 3.5
            );
            let _ = writeln!(
                s,
                r##"<line x1="{:.1}" y1="{cy:.1}" x2="{:.1}" y2="{cy:.1}" stroke="#1f6feb" stroke-width="1.5"/>"##,
                x(theta - w),
                x(theta + w)
            );
            let _ = writeln!(
                s,
                r##"<circle cx="{:.1}" cy="{cy:.1}" r="3" fill="#1f6feb"/>"##,
                x(*theta)
            );
        }
        // Axis with five ticks.
        let axis_y = body_top + rows_h + 8.0;
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT:.1}" y1="{axis_y:.1}" x2="{:.1}" y2="{axis_y:.1}" stroke="black"/>"#,
            LEFT + PLOT_W
        );
        for tick in 0..5 {
            let v = lo + (hi - lo) * tick as f64 / 4.0;
            let tx = x(v);
            let _ = writeln!(
                s,
                r#"<line x1="{tx:.1}" y1="{axis_y:.1}" x2="{tx:.1}" y2="{:.1}" stroke="black"/>"#,
                axis_y + 4.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{tx:.1}" y="{:.1}" text-anchor="middle">{v:.3}</text>"#,
                axis_y + 16.0
            );
        }
        y0 = axis_y + AXIS_H - 8.0 + GAP;
    }
    s.push_str("</svg>\n");
    s
}

// ---------------------------------------------------------------------------
// Heat maps

fn write_heatmaps(cfg: &PipelineConfig, out: &Path, manifest: &RunManifest) -> Result<Vec<String>> {
    let venues = artifacts::read_venues(&artifacts::venues_csv(out))?;
    let bins = cfg.run.heatmap_bins.max(1);
    let b = &cfg.data.bbox;
    let lat_step = (b.max_lat - b.min_lat) / bins as f64;
    let lon_step = (b.max_lon - b.min_lon) / bins as f64;

    let mut files = Vec::new();
    for key in super::stages::usable_keys(out, manifest)? {
        let triples = artifacts::read_triples(&artifacts::train_csv(out, &key), "subsample")?;
        let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (_, venue, _) in &triples {
            let Some(v) = venues.get(venue) else { continue };
            if !b.contains(v.lat, v.lon) {
                continue;
            }
            let lat_bin = bin_of(v.lat, b.min_lat, lat_step, bins);
            let lon_bin = bin_of(v.lon, b.min_lon, lon_step, bins);
            *counts.entry((lat_bin, lon_bin)).or_insert(0) += 1;
        }
        let rows: Vec<HeatmapRow> = counts
            .into_iter()
            .map(|((lat_bin, lon_bin), count)| HeatmapRow {
                lat_bin,
                lon_bin,
                lat_center: b.min_lat + (lat_bin as f64 + 0.5) * lat_step,
                lon_center: b.min_lon + (lon_bin as f64 + 0.5) * lon_step,
                count,
            })
            .collect();
        artifacts::write_heatmap(&artifacts::heatmap_csv(out, &key), &rows)?;
        files.push(format!("heatmap_{key}.csv"));
    }
    Ok(files)
}

fn bin_of(v: f64, lo: f64, step: f64, bins: usize) -> usize {
    (((v - lo) / step) as usize).min(bins - 1)
}
