//! Geographic helpers: haversine distance plus the per-user mobility
//! features (radius of gyration, distance to the city center).

use crate::data::{InteractionMatrix, VenueCatalog};
use crate::error::Error;
use crate::Result;

/// Mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Great-circle distance in km between two (lat, lon) points in degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let dlat = (lat2 - lat1).to_radians();
    let dlon = (lon2 - lon1).to_radians();
    let a = (dlat / 2.0).sin().powi(2)
        + lat1.to_radians().cos() * lat2.to_radians().cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().atan2((1.0 - a).sqrt())
}

/// Coordinates for every matrix item, in item-index order.
pub fn item_coords(matrix: &InteractionMatrix, catalog: &VenueCatalog) -> Result<Vec<(f64, f64)>> {
    matrix
        .items()
        .iter()
        .map(|id| {
            catalog
                .coords(id)
                .ok_or_else(|| Error::Insufficient(format!("venue {id} missing from catalog")))
        })
        .collect()
}

/// Per-user radius of gyration: the square root of the mean haversine
/// distance between the user's unique venues and their arithmetic-mean
/// centroid (in degrees). Note the units are √km — the mean distance is
/// not squared before the root; the feature only needs to be monotone in
/// spatial spread. A single venue gives 0.
pub fn rog_per_user(matrix: &InteractionMatrix, coords: &[(f64, f64)]) -> Vec<f64> {
    (0..matrix.n_users())
        .map(|u| {
            let items = matrix.items_of(u);
            let n = items.len() as f64;
            let (mut lat, mut lon) = (0.0, 0.0);
            for &i in items {
                lat += coords[i as usize].0;
                lon += coords[i as usize].1;
            }
            let centroid = (lat / n, lon / n);
            sqrt_mean_distance_to(items, coords, centroid)
        })
        .collect()
}

/// Per-user square root of the mean haversine distance from the user's
/// unique venues to the fixed city center `cc`.
pub fn dcc_per_user(matrix: &InteractionMatrix, coords: &[(f64, f64)], cc: (f64, f64)) -> Vec<f64> {
    (0..matrix.n_users())
        .map(|u| sqrt_mean_distance_to(matrix.items_of(u), coords, cc))
        .collect()
}

fn sqrt_mean_distance_to(items: &[u32], coords: &[(f64, f64)], point: (f64, f64)) -> f64 {
    let n = items.len() as f64;
    let mean: f64 = items
        .iter()
        .map(|&i| {
            let (lat, lon) = coords[i as usize];
            haversine_km(lat, lon, point.0, point.1)
        })
        .sum::<f64>()
        / n;
    mean.sqrt()
}
