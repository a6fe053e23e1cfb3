//! Variance-inflation factors and iterative collinearity elimination.
//!
//! Elimination loop: while any VIF exceeds the threshold, find the pair of
//! columns with the highest absolute Pearson correlation and drop whichever
//! of the two correlates more strongly with the rest of the matrix
//! (partner and self excluded). Ties drop the later column, so the result
//! is deterministic in column order.

use super::ols::r2_with_intercept;
use crate::error::Error;
use crate::Result;

/// Finite stand-in for an infinite VIF under perfect collinearity.
pub const VIF_CAP: f64 = 1e12;

/// Pearson correlation; 0.0 when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// VIF of column `j`: 1/(1 − R²) from regressing it on all other columns
/// (with intercept). Perfect collinearity maps to the finite cap.
pub fn vif(columns: &[Vec<f64>], j: usize) -> f64 {
    let others: Vec<&[f64]> = columns
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, c)| c.as_slice())
        .collect();
    match r2_with_intercept(&others, &columns[j]) {
        None => VIF_CAP,
        Some(r2) => {
            if r2 >= 1.0 {
                return VIF_CAP;
            }
            let v = 1.0 / (1.0 - r2);
            if !v.is_finite() || v > VIF_CAP {
                VIF_CAP
            } else {
                v
            }
        }
    }
}

/// Per-column outcome of the elimination, in original column order.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VifEntry {
    pub name: String,
    pub vif_before: f64,
    /// VIF within the retained set; `None` if the column was dropped.
    pub vif_after: Option<f64>,
}

/// Full record of one elimination run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VifReport {
    pub threshold: f64,
    pub entries: Vec<VifEntry>,
    /// Dropped column names, in the order they were removed.
    pub dropped: Vec<String>,
}

impl VifReport {
    pub fn retained_names(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.vif_after.is_some())
            .map(|e| e.name.clone())
            .collect()
    }
}

/// Result of `eliminate_collinear`: the report plus the retained column
/// indices into the input matrix, in original order.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub report: VifReport,
    pub retained: Vec<usize>,
}

/// Iteratively drop columns until every VIF is at or below `threshold`.
pub fn eliminate_collinear(
    names: &[String],
    columns: &[Vec<f64>],
    threshold: f64,
) -> Result<Elimination> {
    if threshold <= 1.0 {
        return Err(Error::Config(format!(
            "VIF threshold must exceed 1 (got {threshold})"
        )));
    }
    if names.len() != columns.len() {
        return Err(Error::Config(format!(
            "{} names for {} columns",
            names.len(),
            columns.len()
        )));
    }
    if columns.len() < 2 {
        return Err(Error::Insufficient(format!(
            "collinearity elimination needs at least 2 columns, got {}",
            columns.len()
        )));
    }
    let vif_before: Vec<f64> = (0..columns.len()).map(|j| vif(columns, j)).collect();
    let mut current: Vec<usize> = (0..columns.len()).collect();
    let mut dropped: Vec<String> = Vec::new();
    loop {
        let live: Vec<Vec<f64>> = current.iter().map(|&i| columns[i].clone()).collect();
        let vifs: Vec<f64> = (0..live.len()).map(|j| vif(&live, j)).collect();
        let max_vif = vifs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max_vif <= threshold {
            let mut after = vec![None; columns.len()];
            for (pos, &i) in current.iter().enumerate() {
                after[i] = Some(vifs[pos]);
            }
            let entries = names
                .iter()
                .enumerate()
                .map(|(i, name)| VifEntry {
                    name: name.clone(),
                    vif_before: vif_before[i],
                    vif_after: after[i],
                })
                .collect();
            return Ok(Elimination {
                report: VifReport {
                    threshold,
                    entries,
                    dropped,
                },
                retained: current,
            });
        }
        if current.len() <= 2 {
            return Err(Error::Insufficient(format!(
                "VIF threshold {threshold} would reduce the design below 2 columns"
            )));
        }
        // Most correlated pair; first occurrence wins on exact ties.
        let (mut c1, mut c2, mut best) = (0usize, 1usize, f64::NEG_INFINITY);
        for i in 0..live.len() {
            for j in (i + 1)..live.len() {
                let r = pearson(&live[i], &live[j]).abs();
                if r > best {
                    best = r;
                    c1 = i;
                    c2 = j;
                }
            }
        }
        // Each candidate's strongest correlation to the rest of the matrix,
        // excluding both itself and its partner.
        let side_max = |cand: usize, partner: usize| -> f64 {
            (0..live.len())
                .filter(|&k| k != cand && k != partner)
                .map(|k| pearson(&live[cand], &live[k]).abs())
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let drop_pos = if side_max(c1, c2) > side_max(c2, c1) {
            c1
        } else {
            c2
        };
        dropped.push(names[current[drop_pos]].clone());
        current.remove(drop_pos);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn nm(tags: &[&str]) -> Vec<String> {
        tags.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn orthogonal_columns_have_unit_vif() {
        // Centered, exactly orthogonal pair.
        let a = vec![1.0, 1.0, -1.0, -1.0];
        let b = vec![1.0, -1.0, 1.0, -1.0];
        let cols = vec![a, b];
        assert_abs_diff_eq!(vif(&cols, 0), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(vif(&cols, 1), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn duplicated_column_hits_cap() {
        let a: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let cols = vec![a.clone(), a];
        assert_eq!(vif(&cols, 0), VIF_CAP);
        assert_eq!(vif(&cols, 1), VIF_CAP);
    }

    #[test]
    fn known_correlation_gives_closed_form_vif() {
        // Build two columns with sample correlation exactly 0.8 plus one
        // orthogonal to both: VIF of the pair = 1/(1−0.64).
        let n = 200;
        let mut rng = seeds::rng(3, "vif/rho");
        let z1: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut z2: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        // Orthogonalize z2 against z1, normalize both, then mix to get the
        // exact target correlation.
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let center = |v: &mut Vec<f64>| {
            let m = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= m);
        };
        let mut a = z1;
        center(&mut a);
        center(&mut z2);
        let proj = dot(&z2, &a) / dot(&a, &a);
        let mut b_orth: Vec<f64> = z2.iter().zip(&a).map(|(x, y)| x - proj * y).collect();
        let na = dot(&a, &a).sqrt();
        let nb = dot(&b_orth, &b_orth).sqrt();
        a.iter_mut().for_each(|x| *x /= na);
        b_orth.iter_mut().for_each(|x| *x /= nb);
        let rho: f64 = 0.8;
        let b: Vec<f64> = a
            .iter()
            .zip(&b_orth)
            .map(|(x, y)| rho * x + (1.0 - rho * rho).sqrt() * y)
            .collect();
        assert_abs_diff_eq!(pearson(&a, &b), 0.8, epsilon = 1e-10);
        let cols = vec![a, b];
        assert_abs_diff_eq!(vif(&cols, 0), 1.0 / (1.0 - 0.64), epsilon = 1e-3);
        assert_abs_diff_eq!(vif(&cols, 1), 1.0 / (1.0 - 0.64), epsilon = 1e-3);
    }

    #[test]
    fn orthogonal_matrix_survives_untouched() {
        let a = vec![1.0, 1.0, -1.0, -1.0, 0.0];
        let b = vec![1.0, -1.0, 1.0, -1.0, 0.0];
        let c = vec![0.0, 0.0, 0.0, 0.0, 1.0];
        let out = eliminate_collinear(&nm(&["a", "b", "c"]), &[a, b, c], 12.0).unwrap();
        assert_eq!(out.retained, vec![0, 1, 2]);
        assert!(out.report.dropped.is_empty());
        for e in &out.report.entries {
            assert!(e.vif_after.unwrap() <= 12.0);
        }
    }

    #[test]
    fn duplicate_pair_loses_exactly_one_member() {
        let mut rng = seeds::rng(5, "vif/dup");
        let n = 40;
        let a: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let dup = a.clone();
        let out = eliminate_collinear(&nm(&["a", "b", "a_copy"]), &[a, b, dup], 12.0).unwrap();
        // |PCC(a, a_copy)| = 1 is the top pair; side correlations against b
        // are identical, so the tie drops the later column.
        assert_eq!(out.report.dropped, vec!["a_copy"]);
        assert_eq!(out.retained, vec![0, 1]);
        assert_eq!(out.report.entries[2].vif_after, None);
        assert_eq!(out.report.entries[2].vif_before, VIF_CAP);
    }

    #[test]
    fn drop_prefers_candidate_more_tied_to_rest() {
        // (mix, base) is the most correlated pair, and mix also picks up
        // correlation with d. The rule must drop mix even though it comes
        // FIRST in column order — a positional tie-break would drop base.
        let mut rng = seeds::rng(9, "vif/side");
        let n = 120;
        let base: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let d: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let mix: Vec<f64> = base.iter().zip(&d).map(|(x, y)| x + 0.12 * y).collect();
        let r_pair = pearson(&mix, &base).abs();
        assert!(r_pair > pearson(&base, &d).abs());
        assert!(r_pair > pearson(&mix, &d).abs());
        assert!(pearson(&mix, &d).abs() > pearson(&base, &d).abs());
        let cols = vec![mix, base, d];
        let out = eliminate_collinear(&nm(&["mix", "base", "d"]), &cols, 4.0).unwrap();
        assert_eq!(out.report.dropped[0], "mix");
        assert_eq!(out.retained, vec![1, 2]);
    }

    #[test]
    fn refusing_to_drop_below_two_columns() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v + 0.001 * (v * 7.3).sin()).collect();
        let err = eliminate_collinear(&nm(&["a", "b"]), &[a, b], 12.0).unwrap_err();
        assert!(matches!(err, Error::Insufficient(_)));
    }

    #[test]
    fn retained_vifs_respect_threshold_on_random_designs() {
        let mut rng = seeds::rng(21, "vif/prop");
        for trial in 0..20 {
            let n = 60;
            let p = 6;
            let mut cols: Vec<Vec<f64>> = (0..p)
                .map(|_| (0..n).map(|_| rng.gen()).collect())
                .collect();
            // Inject correlated structure.
            for j in 3..p {
                let src = j % 3;
                for i in 0..n {
                    let boost: f64 = rng.gen::<f64>() * 0.2;
                    cols[j][i] = 0.9 * cols[src][i] + boost;
                }
            }
            let names: Vec<String> = (0..p).map(|j| format!("c{j}")).collect();
            let threshold = 5.0;
            let out = eliminate_collinear(&names, &cols, threshold).unwrap();
            for e in &out.report.entries {
                if let Some(v) = e.vif_after {
                    assert!(v <= threshold, "trial {trial}: VIF {v} > {threshold}");
                }
            }
            assert!(out.retained.len() >= 2);
            assert_eq!(
                out.retained.len() + out.report.dropped.len(),
                p,
                "every column accounted for"
            );
        }
    }

    #[test]
    fn invalid_threshold_rejected() {
        let a = vec![1.0, 2.0, 3.0];
        let b = vec![3.0, 1.0, 2.0];
        assert!(matches!(
            eliminate_collinear(&nm(&["a", "b"]), &[a, b], 1.0),
            Err(Error::Config(_))
        ));
    }
}
