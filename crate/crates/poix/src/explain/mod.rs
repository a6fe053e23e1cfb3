//! Regression layer: explains metric outcomes from subsample traits.
//!
//! The trait matrix is min-max normalized (constant columns dropped), thinned
//! by VIF-driven collinearity elimination once, and then one OLS fit runs per
//! retained model × metric × cutoff. Fits are independent, so they run
//! through the data-parallel map.

mod normalize;
mod ols;
mod tdist;
mod vif;

pub use normalize::{minmax, normalize_design, Design};
pub use ols::{fit_ols, significance_stars, Coefficient, RegressionFit};
pub use tdist::{ln_gamma, student_t_cdf, t_quantile, two_sided_p};
pub use vif::{eliminate_collinear, pearson, vif, Elimination, VifEntry, VifReport, VIF_CAP};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::eval::EvalResult;
use crate::par;
use crate::rec::ModelId;
use crate::Result;

/// The three ranking qualities each regression can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    Ndcg,
    Epc,
    ItemExposure,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Ndcg, MetricKind::Epc, MetricKind::ItemExposure];

    /// Short lowercase tag used in artifact filenames.
    pub fn tag(&self) -> &'static str {
        match self {
            MetricKind::Ndcg => "ndcg",
            MetricKind::Epc => "epc",
            MetricKind::ItemExposure => "ie",
        }
    }

    /// Human-facing name used in the report.
    pub fn label(&self) -> &'static str {
        match self {
            MetricKind::Ndcg => "nDCG",
            MetricKind::Epc => "EPC",
            MetricKind::ItemExposure => "Item Exposure",
        }
    }

    /// Reads this metric from an evaluation row at the given cutoff index.
    pub fn value(&self, result: &EvalResult, cutoff_idx: usize) -> f64 {
        match self {
            MetricKind::Ndcg => result.ndcg[cutoff_idx],
            MetricKind::Epc => result.epc[cutoff_idx],
            MetricKind::ItemExposure => result.item_exposure[cutoff_idx],
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One fitted regression, identified by model, metric, and cutoff.
#[derive(Debug, Clone)]
pub struct FitRecord {
    pub model: ModelId,
    pub metric: MetricKind,
    pub cutoff: usize,
    /// Subsamples that contributed observations to this fit.
    pub rows_used: usize,
    pub fit: RegressionFit,
}

/// Everything the regression stage produces.
#[derive(Debug, Clone)]
pub struct Explanation {
    /// Trait columns dropped before elimination for having no variance.
    pub removed_constant: Vec<String>,
    pub report: VifReport,
    pub retained_names: Vec<String>,
    pub fits: Vec<FitRecord>,
    /// Model-metric pairs skipped for lack of rows, with reasons.
    pub warnings: Vec<String>,
}

enum JobOut {
    Fit(Box<FitRecord>),
    Skip(String),
    Fail(Error),
}

/// Runs the full explanation over one trait matrix and one set of winning
/// per-model metrics.
///
/// `rows` pairs each subsample key with its trait values (parallel to
/// `ev_names`); `results` holds the winning configuration's metrics per
/// (subsample, model). Pairs without enough observations are skipped with a
/// warning rather than failing the stage.
pub fn explain_all(
    ev_names: &[String],
    rows: &[(String, Vec<f64>)],
    results: &[EvalResult],
    models: &[ModelId],
    cutoffs: &[usize],
    vif_threshold: f64,
) -> Result<Explanation> {
    if rows.len() < 3 {
        return Err(Error::Insufficient(format!(
            "regression needs several subsamples, got {}",
            rows.len()
        )));
    }
    for (key, values) in rows {
        if values.len() != ev_names.len() {
            return Err(Error::Config(format!(
                "subsample {key} has {} trait values, expected {}",
                values.len(),
                ev_names.len()
            )));
        }
    }
    // Column-major trait matrix in the given row order.
    let columns: Vec<Vec<f64>> = (0..ev_names.len())
        .map(|j| rows.iter().map(|(_, v)| v[j]).collect())
        .collect();
    let design = normalize_design(ev_names, &columns);
    let elimination = eliminate_collinear(&design.names, &design.columns, vif_threshold)?;
    let retained_names: Vec<String> = elimination
        .retained
        .iter()
        .map(|&i| design.names[i].clone())
        .collect();
    let retained_cols: Vec<Vec<f64>> = elimination
        .retained
        .iter()
        .map(|&i| design.columns[i].clone())
        .collect();

    let by_key: HashMap<(&str, ModelId), &EvalResult> = results
        .iter()
        .map(|r| ((r.subsample.as_str(), r.model), r))
        .collect();

    let jobs: Vec<(ModelId, MetricKind, usize)> = models
        .iter()
        .flat_map(|&m| {
            MetricKind::ALL
                .iter()
                .flat_map(move |&kind| cutoffs.iter().map(move |&k| (m, kind, k)))
        })
        .collect();

    let outputs = par::map_slice(&jobs, |&(model, kind, cutoff)| {
        let mut row_idx = Vec::new();
        let mut y = Vec::new();
        for (i, (key, _)) in rows.iter().enumerate() {
            let Some(result) = by_key.get(&(key.as_str(), model)) else {
                continue;
            };
            let Some(ci) = result.cutoffs.iter().position(|&c| c == cutoff) else {
                continue;
            };
            row_idx.push(i);
            y.push(kind.value(result, ci));
        }
        if row_idx.len() < retained_names.len() + 2 {
            return JobOut::Skip(format!(
                "skipping {model} {}@{cutoff}: {} observations for {} predictors",
                kind.label(),
                row_idx.len(),
                retained_names.len()
            ));
        }
        let sub_cols: Vec<Vec<f64>> = retained_cols
            .iter()
            .map(|col| row_idx.iter().map(|&i| col[i]).collect())
            .collect();
        match fit_ols(&retained_names, &sub_cols, &y) {
            Ok(fit) => JobOut::Fit(Box::new(FitRecord {
                model,
                metric: kind,
                cutoff,
                rows_used: row_idx.len(),
                fit,
            })),
            Err(e) => JobOut::Fail(e),
        }
    });

    let mut fits = Vec::new();
    let mut warnings = Vec::new();
    for out in outputs {
        match out {
            JobOut::Fit(f) => fits.push(*f),
            JobOut::Skip(w) => warnings.push(w),
            JobOut::Fail(e) => return Err(e),
        }
    }
    Ok(Explanation {
        removed_constant: design.removed,
        report: elimination.report,
        retained_names,
        fits,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use rand::Rng;

    fn fake_result(key: &str, model: ModelId, cutoffs: &[usize], value: f64) -> EvalResult {
        EvalResult {
            subsample: key.to_string(),
            model,
            hyper_key: "default".to_string(),
            cutoffs: cutoffs.to_vec(),
            ndcg: vec![value; cutoffs.len()],
            epc: vec![0.5; cutoffs.len()],
            item_exposure: vec![1.0; cutoffs.len()],
            ndcg5: value,
            evaluated_users: 10,
        }
    }

    fn planted_setup() -> (Vec<String>, Vec<(String, Vec<f64>)>, Vec<EvalResult>) {
        let mut rng = seeds::rng(1, "explain/planted");
        let names: Vec<String> = ["alpha", "beta", "flat"].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        let mut results = Vec::new();
        for i in 0..48 {
            let a: f64 = rng.gen();
            let b: f64 = rng.gen();
            let key = format!("s{i:02}");
            rows.push((key.clone(), vec![a, b, 7.0]));
            // nDCG rises with alpha, falls with beta, plus slight noise.
            let y = 0.2 + 0.6 * a - 0.3 * b + 0.01 * rng.gen::<f64>();
            results.push(fake_result(&key, ModelId::Pop, &[5], y));
        }
        (names, rows, results)
    }

    #[test]
    fn planted_relation_recovered_end_to_end() {
        let (names, rows, results) = planted_setup();
        let out = explain_all(&names, &rows, &results, &[ModelId::Pop], &[5], 12.0).unwrap();
        assert_eq!(out.removed_constant, vec!["flat"]);
        assert_eq!(out.retained_names, vec!["alpha", "beta"]);
        assert_eq!(out.fits.len(), 3, "three metrics at one cutoff");
        let ndcg_fit = out
            .fits
            .iter()
            .find(|f| f.metric == MetricKind::Ndcg)
            .unwrap();
        assert_eq!(ndcg_fit.rows_used, 48);
        assert!(ndcg_fit.fit.r_squared > 0.95, "R² = {}", ndcg_fit.fit.r_squared);
        let alpha = &ndcg_fit.fit.coefficients[1];
        let beta = &ndcg_fit.fit.coefficients[2];
        assert!(alpha.theta > 0.0 && beta.theta < 0.0);
        assert_eq!(alpha.stars, "***");
        // The EPC column is constant 0.5, so its fit has R² 0 by definition.
        let epc_fit = out
            .fits
            .iter()
            .find(|f| f.metric == MetricKind::Epc)
            .unwrap();
        assert_eq!(epc_fit.fit.r_squared, 0.0);
    }

    #[test]
    fn missing_model_rows_become_warnings() {
        let (names, rows, results) = planted_setup();
        let out = explain_all(
            &names,
            &rows,
            &results,
            &[ModelId::Pop, ModelId::Random],
            &[5],
            12.0,
        )
        .unwrap();
        assert_eq!(out.fits.len(), 3, "only the model with rows is fitted");
        assert_eq!(out.warnings.len(), 3);
        assert!(out.warnings.iter().all(|w| w.contains("Random")));
    }

    #[test]
    fn unknown_cutoff_is_skipped_not_fatal() {
        let (names, rows, results) = planted_setup();
        let out = explain_all(&names, &rows, &results, &[ModelId::Pop], &[5, 10], 12.0).unwrap();
        assert_eq!(out.fits.len(), 3, "cutoff 10 absent from results");
        assert_eq!(out.warnings.len(), 3);
        assert!(out.warnings.iter().all(|w| w.contains("@10")));
    }

    #[test]
    fn row_width_mismatch_rejected() {
        let names = vec!["a".to_string(), "b".to_string()];
        let rows = vec![
            ("s0".to_string(), vec![1.0, 2.0]),
            ("s1".to_string(), vec![1.0]),
            ("s2".to_string(), vec![0.0, 1.0]),
        ];
        assert!(matches!(
            explain_all(&names, &rows, &[], &[], &[5], 12.0),
            Err(Error::Config(_))
        ));
    }
}
