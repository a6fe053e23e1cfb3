//! Ordinary least squares with an intercept, fitted by Householder QR.
//!
//! Standard errors come from the unbiased residual variance times the
//! diagonal of (XᵀX)⁻¹ (computed as R⁻¹R⁻ᵀ), and p-values from the exact
//! Student-t CDF with n − p − 1 degrees of freedom.

use super::tdist::two_sided_p;
use crate::error::Error;
use crate::Result;

/// One fitted coefficient, as written to the regression tables.
#[derive(Debug, Clone)]
pub struct Coefficient {
    pub name: String,
    pub theta: f64,
    pub stderr: f64,
    pub t: f64,
    pub p: f64,
    pub stars: &'static str,
}

/// A fitted linear model `y = θ₀ + Σ θⱼ xⱼ + ε`.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    /// Intercept first (named `(Intercept)`), then one entry per column.
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residuals: Vec<f64>,
    pub dof: usize,
}

/// Significance marks: `***` p<0.001, `**` p<0.01, `*` p<0.05, else empty.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// QR factorization state: R (upper m×m), Qᵀy, and near-zero pivots.
struct Qr {
    r: Vec<f64>,
    qty: Vec<f64>,
    deficient: Vec<usize>,
}

/// In-place Householder QR of the row-major n×m matrix `a`, applying the
/// same reflections to `y`.
fn householder_qr(mut a: Vec<f64>, mut y: Vec<f64>, n: usize, m: usize) -> Qr {
    debug_assert!(n >= m);
    for k in 0..m {
        let norm = (k..n).map(|i| a[i * m + k] * a[i * m + k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue; // column already zero below and at the diagonal
        }
        let alpha = if a[k * m + k] >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - k];
        v[0] = a[k * m + k] - alpha;
        for i in (k + 1)..n {
            v[i - k] = a[i * m + k];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        a[k * m + k] = alpha;
        for i in (k + 1)..n {
            a[i * m + k] = 0.0;
        }
        if vtv == 0.0 {
            continue;
        }
        for j in (k + 1)..m {
            let s: f64 = (k..n).map(|i| v[i - k] * a[i * m + j]).sum();
            let f = 2.0 * s / vtv;
            for i in k..n {
                a[i * m + j] -= f * v[i - k];
            }
        }
        let s: f64 = (k..n).map(|i| v[i - k] * y[i]).sum();
        let f = 2.0 * s / vtv;
        for i in k..n {
            y[i] -= f * v[i - k];
        }
    }
    let mut r = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            r[i * m + j] = a[i * m + j];
        }
    }
    let scale = (0..m).map(|j| r[j * m + j].abs()).fold(0.0, f64::max);
    let tol = scale * (n.max(m) as f64) * f64::EPSILON;
    let deficient = (0..m).filter(|&j| r[j * m + j].abs() <= tol).collect();
    Qr {
        r,
        qty: y[..m].to_vec(),
        deficient,
    }
}

/// Solve Rβ = qty by back-substitution (R upper triangular, full rank).
fn back_substitute(r: &[f64], qty: &[f64], m: usize) -> Vec<f64> {
    let mut beta = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = qty[i];
        for j in (i + 1)..m {
            s -= r[i * m + j] * beta[j];
        }
        beta[i] = s / r[i * m + i];
    }
    beta
}

/// Invert the upper-triangular R (column-by-column back-substitution).
fn invert_upper(r: &[f64], m: usize) -> Vec<f64> {
    let mut inv = vec![0.0; m * m];
    for col in 0..m {
        for i in (0..=col).rev() {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for j in (i + 1)..=col {
                s -= r[i * m + j] * inv[j * m + col];
            }
            inv[i * m + col] = s / r[i * m + i];
        }
    }
    inv
}

/// Build the row-major design matrix [1 | columns] for n rows.
fn design_with_intercept(columns: &[&[f64]], n: usize) -> Vec<f64> {
    let m = columns.len() + 1;
    let mut a = vec![0.0; n * m];
    for i in 0..n {
        a[i * m] = 1.0;
        for (j, col) in columns.iter().enumerate() {
            a[i * m + 1 + j] = col[i];
        }
    }
    a
}

/// R² of regressing `y` on `columns` plus an intercept; `None` when the
/// design is rank deficient (perfect collinearity).
pub(crate) fn r2_with_intercept(columns: &[&[f64]], y: &[f64]) -> Option<f64> {
    let n = y.len();
    let m = columns.len() + 1;
    if n < m {
        return None;
    }
    let a = design_with_intercept(columns, n);
    let qr = householder_qr(a.clone(), y.to_vec(), n, m);
    if !qr.deficient.is_empty() {
        return None;
    }
    let beta = back_substitute(&qr.r, &qr.qty, m);
    let mut rss = 0.0;
    for i in 0..n {
        let mut fitted = 0.0;
        for j in 0..m {
            fitted += a[i * m + j] * beta[j];
        }
        let r = y[i] - fitted;
        rss += r * r;
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if tss > 0.0 {
        Some(1.0 - rss / tss)
    } else {
        Some(0.0)
    }
}

/// Fit `y = θ₀ + Σ θⱼ·columns[j] + ε` by least squares.
///
/// Errors with the offending column names if the design (including the
/// intercept) is rank deficient, and with `Insufficient` when there are
/// not enough rows for at least one residual degree of freedom.
pub fn fit_ols(names: &[String], columns: &[Vec<f64>], y: &[f64]) -> Result<RegressionFit> {
    let n = y.len();
    let p = columns.len();
    let m = p + 1;
    for (name, col) in names.iter().zip(columns) {
        if col.len() != n {
            return Err(Error::Config(format!(
                "column {name} has {} rows, target has {n}",
                col.len()
            )));
        }
    }
    if n < m + 1 {
        return Err(Error::Insufficient(format!(
            "{n} observations cannot support {p} predictors plus an intercept"
        )));
    }
    let a = design_with_intercept(&columns.iter().map(|c| c.as_slice()).collect::<Vec<_>>(), n);
    let qr = householder_qr(a.clone(), y.to_vec(), n, m);
    if !qr.deficient.is_empty() {
        let offenders = qr
            .deficient
            .iter()
            .map(|&j| {
                if j == 0 {
                    "(Intercept)".to_string()
                } else {
                    names[j - 1].clone()
                }
            })
            .collect();
        return Err(Error::RankDeficient(offenders));
    }
    let beta = back_substitute(&qr.r, &qr.qty, m);
    let mut residuals = vec![0.0; n];
    let mut rss = 0.0;
    for i in 0..n {
        let mut fitted = 0.0;
        for j in 0..m {
            fitted += a[i * m + j] * beta[j];
        }
        residuals[i] = y[i] - fitted;
        rss += residuals[i] * residuals[i];
    }
    let dof = n - m;
    let sigma2 = rss / dof as f64;
    let rinv = invert_upper(&qr.r, m);
    let coefficients = (0..m)
        .map(|j| {
            // (XᵀX)⁻¹ = R⁻¹R⁻ᵀ, so its j-th diagonal is the squared norm
            // of row j of R⁻¹.
            let gram_jj: f64 = (j..m).map(|k| rinv[j * m + k] * rinv[j * m + k]).sum();
            let stderr = (sigma2 * gram_jj).sqrt();
            let t = if stderr > 0.0 {
                beta[j] / stderr
            } else if beta[j] == 0.0 {
                0.0
            } else {
                f64::INFINITY * beta[j].signum()
            };
            let p_val = two_sided_p(t, dof as f64);
            Coefficient {
                name: if j == 0 {
                    "(Intercept)".to_string()
                } else {
                    names[j - 1].clone()
                },
                theta: beta[j],
                stderr,
                t,
                p: p_val,
                stars: significance_stars(p_val),
            }
        })
        .collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
    let adj_r_squared = if tss > 0.0 {
        1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / dof as f64
    } else {
        0.0
    };
    Ok(RegressionFit {
        coefficients,
        r_squared,
        adj_r_squared,
        residuals,
        dof,
    })
}
