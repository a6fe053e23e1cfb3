//! Weighted MF with instance-level geographic smoothing: after every ALS
//! sweep each venue's latent vector is pulled toward the average vector of
//! its nearest same-cluster venues. Clusters come from seeded k-means on
//! venue coordinates.

use rand::Rng;

use crate::data::InteractionMatrix;
use crate::ev::haversine_km;
use crate::par;
use crate::seeds;
use crate::Result;

use super::ials::{fit_ials_with_hook, IalsModel};

/// Confidence weight of observed cells; fixed for this model, the tuned
/// regularization knob is `lambda3`.
const ALPHA: f64 = 1.0;
const SWEEPS: usize = 20;
/// Neighbors participating in the smoothing average.
const N_NEIGHBORS: usize = 10;
const KMEANS_ITERS: usize = 20;

/// Lloyd's k-means on (lat, lon) in degree space; returns a cluster id per
/// venue. `k` is clamped to the venue count; empty clusters keep their old
/// center. Deterministic given the seed.
pub fn kmeans_clusters(coords: &[(f64, f64)], k: usize, seed: u64) -> Vec<usize> {
    let n = coords.len();
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }
    let mut rng = seeds::rng(seed, "kmeans");
    // Partial Fisher–Yates: first k slots hold distinct venue picks.
    let mut picks: Vec<usize> = (0..n).collect();
    for slot in 0..k {
        let other = slot + rng.gen_range(0..n - slot);
        picks.swap(slot, other);
    }
    let mut centers: Vec<(f64, f64)> = picks[..k].iter().map(|&i| coords[i]).collect();

    let mut assign = vec![0usize; n];
    for _ in 0..KMEANS_ITERS {
        let mut changed = false;
        for (i, &(lat, lon)) in coords.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, &(clat, clon)) in centers.iter().enumerate() {
                let d = (lat - clat).powi(2) + (lon - clon).powi(2);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (i, &(lat, lon)) in coords.iter().enumerate() {
            let s = &mut sums[assign[i]];
            s.0 += lat;
            s.1 += lon;
            s.2 += 1;
        }
        for (c, &(slat, slon, count)) in sums.iter().enumerate() {
            if count > 0 {
                centers[c] = (slat / count as f64, slon / count as f64);
            }
        }
    }
    assign
}

/// For each venue: up to `N_NEIGHBORS` nearest venues in the same cluster
/// (haversine ascending, venue index ascending on ties), self excluded.
fn smoothing_neighbors(coords: &[(f64, f64)], clusters: &[usize]) -> Vec<Vec<u32>> {
    par::map_range(coords.len(), |i| {
        let (lat, lon) = coords[i];
        let mut near: Vec<(f64, u32)> = clusters
            .iter()
            .enumerate()
            .filter(|&(j, &c)| j != i && c == clusters[i])
            .map(|(j, _)| {
                let (jlat, jlon) = coords[j];
                (haversine_km(lat, lon, jlat, jlon), j as u32)
            })
            .collect();
        near.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        near.truncate(N_NEIGHBORS);
        near.into_iter().map(|(_, j)| j).collect()
    })
}

pub fn fit_irenmf(
    train: &InteractionMatrix,
    coords: &[(f64, f64)],
    factors: usize,
    geo_alpha: f64,
    lambda3: f64,
    clusters: usize,
    seed: u64,
) -> Result<IalsModel> {
    let assignments = kmeans_clusters(coords, clusters, seed);
    let neighbors = smoothing_neighbors(coords, &assignments);
    fit_ials_with_hook(train, factors, lambda3, ALPHA, SWEEPS, seed, |y| {
        let snapshot = y.clone();
        for (i, nn) in neighbors.iter().enumerate() {
            if nn.is_empty() {
                continue;
            }
            for f in 0..factors {
                let avg = nn
                    .iter()
                    .map(|&j| snapshot[j as usize * factors + f])
                    .sum::<f64>()
                    / nn.len() as f64;
                let own = snapshot[i * factors + f];
                y[i * factors + f] = (1.0 - geo_alpha) * own + geo_alpha * avg;
            }
        }
    })
}
