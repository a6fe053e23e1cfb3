//! Implicit-feedback weighted matrix factorization trained by alternating
//! ridge solves (the classic confidence-weighted ALS scheme).
//!
//! Binary visits `r` get confidence `c = 1 + α·r`; the loss is
//! Σ c·(r − x·y)² + λ(‖X‖² + ‖Y‖²) and each side is solved exactly per
//! sweep via Cholesky on the f×f normal equations.

use rand_distr::{Distribution, Normal};

use crate::data::InteractionMatrix;
use crate::par;
use crate::seeds;
use crate::Result;

use super::linalg::{dot, solve_spd};
use super::Recommender;

/// Factor model: score(u,i) = x_u · y_i.
pub struct IalsModel {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub factors: usize,
    n_items: usize,
}

impl Recommender for IalsModel {
    fn scores(&self, user: usize) -> Vec<f64> {
        let f = self.factors;
        let xu = &self.x[user * f..(user + 1) * f];
        (0..self.n_items)
            .map(|i| dot(xu, &self.y[i * f..(i + 1) * f]))
            .collect()
    }
}

pub fn fit_ials(
    train: &InteractionMatrix,
    factors: usize,
    lambda: f64,
    alpha: f64,
    iters: usize,
    seed: u64,
) -> Result<IalsModel> {
    fit_ials_with_hook(train, factors, lambda, alpha, iters, seed, |_| {})
}

/// Like [`fit_ials`] but invokes `after_sweep` on the item factors at the
/// end of every sweep, letting callers inject post-sweep adjustments.
pub(crate) fn fit_ials_with_hook(
    train: &InteractionMatrix,
    factors: usize,
    lambda: f64,
    alpha: f64,
    iters: usize,
    seed: u64,
    mut after_sweep: impl FnMut(&mut Vec<f64>),
) -> Result<IalsModel> {
    let (n_users, n_items) = (train.n_users(), train.n_items());
    let mut rng = seeds::rng(seed, "ials/init");
    let normal = Normal::new(0.0, 0.1).expect("valid stddev");
    let mut x: Vec<f64> = (0..n_users * factors)
        .map(|_| normal.sample(&mut rng))
        .collect();
    let mut y: Vec<f64> = (0..n_items * factors)
        .map(|_| normal.sample(&mut rng))
        .collect();

    for _ in 0..iters {
        x = solve_side(n_users, |u| train.items_of(u), &y, factors, lambda, alpha)?;
        y = solve_side(n_items, |i| train.users_of(i), &x, factors, lambda, alpha)?;
        after_sweep(&mut y);
    }

    Ok(IalsModel {
        x,
        y,
        factors,
        n_items,
    })
}

/// Solves one ALS side: for every target, `(FᵀF + λI + αΣff ᵀ)·w = (1+α)Σf`
/// where the sums run over the target's observed counterparts in `fixed`.
fn solve_side<'m>(
    n_target: usize,
    profile: impl Fn(usize) -> &'m [u32] + Sync + Send,
    fixed: &[f64],
    f: usize,
    lambda: f64,
    alpha: f64,
) -> Result<Vec<f64>> {
    let mut gram = vec![0.0; f * f];
    for row in fixed.chunks_exact(f) {
        for p in 0..f {
            for q in 0..f {
                gram[p * f + q] += row[p] * row[q];
            }
        }
    }
    for p in 0..f {
        gram[p * f + p] += lambda;
    }

    let rows = par::map_range(n_target, |t| -> Result<Vec<f64>> {
        let mut a = gram.clone();
        let mut b = vec![0.0; f];
        for &c in profile(t) {
            let fc = &fixed[c as usize * f..(c as usize + 1) * f];
            for p in 0..f {
                b[p] += (1.0 + alpha) * fc[p];
                for q in 0..f {
                    a[p * f + q] += alpha * fc[p] * fc[q];
                }
            }
        }
        solve_spd(&mut a, &mut b, f)?;
        Ok(b)
    });
    let mut out = Vec::with_capacity(n_target * f);
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// Training objective: Σ_{u,i} c_ui (r_ui − x·y)² + λ(‖X‖² + ‖Y‖²).
/// Dense in (users × items); intended for test fixtures.
pub fn ials_objective(
    train: &InteractionMatrix,
    x: &[f64],
    y: &[f64],
    factors: usize,
    lambda: f64,
    alpha: f64,
) -> f64 {
    let mut total = 0.0;
    for u in 0..train.n_users() {
        let xu = &x[u * factors..(u + 1) * factors];
        for i in 0..train.n_items() {
            let pred = dot(xu, &y[i * factors..(i + 1) * factors]);
            let (r, c) = if train.has(u, i as u32) {
                (1.0, 1.0 + alpha)
            } else {
                (0.0, 1.0)
            };
            let e = r - pred;
            total += c * e * e;
        }
    }
    let reg: f64 = x.iter().chain(y).map(|v| v * v).sum();
    total + lambda * reg
}
