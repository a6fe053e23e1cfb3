//! Tiny dense solver for the ridge systems inside alternating least squares.

use crate::error::Error;
use crate::Result;

/// Solves `A x = b` for symmetric positive-definite `A` (row-major, n×n)
/// by in-place Cholesky factorization; `b` is overwritten with `x`.
///
/// The ALS normal equations always carry a `+λI` term, so a non-positive
/// pivot indicates a broken regularization setting rather than bad data.
pub fn solve_spd(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);

    // A = L·Lᵀ, L stored in the lower triangle.
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::Insufficient(
                "linear solve failed: system not positive definite".into(),
            ));
        }
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / diag;
        }
    }

    // Forward: L y = b.
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * n + k] * b[k];
        }
        b[i] = v / a[i * n + i];
    }
    // Backward: Lᵀ x = y.
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in (i + 1)..n {
            v -= a[k * n + i] * b[k];
        }
        b[i] = v / a[i * n + i];
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
