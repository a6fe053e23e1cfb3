//! BPR variant with a geographic intermediate preference class.
//!
//! For each sampled positive, unvisited venues within `max_dist_km` of any
//! of the user's training venues form a "near" class that should rank above
//! the remaining ("far") unvisited venues: each sample performs the pairwise
//! updates positive > near and near > far.

use std::collections::HashMap;

use rand::Rng;

use crate::data::InteractionMatrix;
use crate::ev::haversine_km;
use crate::par;
use crate::seeds;

use super::bpr::{sample_negative, BprParams, BprState, MfModel};

/// Degrees of latitude per km (1/111); also sizes the bucket grid.
const DEG_PER_KM: f64 = 1.0 / 111.0;

/// Venue bucket grid for radius queries. Cells are square in degree space;
/// longitude queries widen with latitude so the km radius stays honest.
struct GeoIndex {
    cell_deg: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl GeoIndex {
    fn build(coords: &[(f64, f64)], radius_km: f64) -> Self {
        let cell_deg = radius_km * DEG_PER_KM;
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, &(lat, lon)) in coords.iter().enumerate() {
            buckets
                .entry(((lat / cell_deg).floor() as i64, (lon / cell_deg).floor() as i64))
                .or_default()
                .push(i as u32);
        }
        GeoIndex { cell_deg, buckets }
    }

    /// Venue indices within `radius_km` of `(lat, lon)` (haversine-verified).
    fn within(&self, coords: &[(f64, f64)], lat: f64, lon: f64, radius_km: f64, out: &mut Vec<u32>) {
        let dlat_cells = (radius_km * DEG_PER_KM / self.cell_deg).ceil() as i64;
        let cos_lat = lat.to_radians().cos().abs().max(0.05);
        let dlon_cells = (radius_km * DEG_PER_KM / cos_lat / self.cell_deg).ceil() as i64;
        let (cy, cx) = (
            (lat / self.cell_deg).floor() as i64,
            (lon / self.cell_deg).floor() as i64,
        );
        for by in (cy - dlat_cells)..=(cy + dlat_cells) {
            for bx in (cx - dlon_cells)..=(cx + dlon_cells) {
                if let Some(ids) = self.buckets.get(&(by, bx)) {
                    for &i in ids {
                        let (vlat, vlon) = coords[i as usize];
                        if haversine_km(lat, lon, vlat, vlon) <= radius_km {
                            out.push(i);
                        }
                    }
                }
            }
        }
    }
}

/// Per user: sorted unvisited venues within `max_dist_km` of any training
/// venue of that user.
pub fn near_items_per_user(
    train: &InteractionMatrix,
    coords: &[(f64, f64)],
    max_dist_km: f64,
) -> Vec<Vec<u32>> {
    let index = GeoIndex::build(coords, max_dist_km);
    par::map_range(train.n_users(), |u| {
        let mut near = Vec::new();
        for &i in train.items_of(u) {
            let (lat, lon) = coords[i as usize];
            index.within(coords, lat, lon, max_dist_km, &mut near);
        }
        near.sort_unstable();
        near.dedup();
        near.retain(|&i| !train.has(u, i));
        near
    })
}

pub fn fit_geobprmf(
    train: &InteractionMatrix,
    coords: &[(f64, f64)],
    params: &BprParams,
    max_dist_km: f64,
    seed: u64,
) -> MfModel {
    let near = near_items_per_user(train, coords, max_dist_km);
    let n_items = train.n_items();
    let mut rng = seeds::rng(seed, "geobpr");
    let mut state = BprState::new(train.n_users(), n_items, params, &mut rng);
    let samples_per_iter = train.unique_count() as usize;

    for _ in 0..params.iters {
        for _ in 0..samples_per_iter {
            let u = rng.gen_range(0..train.n_users());
            let pos = train.items_of(u);
            let i = pos[rng.gen_range(0..pos.len())] as usize;
            let near_u = &near[u];
            if near_u.is_empty() {
                // No geographic neighborhood: plain BPR step.
                if let Some(j) = sample_negative(train, u, &mut rng) {
                    state.update(u, i, j as usize);
                }
                continue;
            }
            let n = near_u[rng.gen_range(0..near_u.len())] as usize;
            state.update(u, i, n);
            // A far venue exists iff visited + near don't cover the catalog.
            if pos.len() + near_u.len() >= n_items {
                continue;
            }
            for _ in 0..100 {
                let cand = rng.gen_range(0..n_items) as u32;
                if !train.has(u, cand) && near_u.binary_search(&cand).is_err() {
                    state.update(u, n, cand as usize);
                    break;
                }
            }
        }
    }
    state.into_model()
}
