//! The 32 explanatory variables of a training matrix.
//!
//! Seven describe the matrix itself (size, shape, density, per-user and
//! per-item visit counts, Gini concentration over items and users); the
//! remaining 25 are five aggregate statistics (mean, median, std, skewness,
//! kurtosis) over five per-user distributions: popularity bias, long-tail
//! share, radius of gyration, distance to the city center, and activity
//! span.

mod families;
mod geo;
mod gini;
mod stats;

pub use families::{
    duration_days_per_user, item_popularity, long_tail_items, long_tail_per_user,
    popularity_bias_per_user, structure_evs,
};
pub use geo::{dcc_per_user, haversine_km, item_coords, rog_per_user, EARTH_RADIUS_KM};
pub use gini::gini;
pub use stats::{aggregate, AggregateStats};

use crate::data::{InteractionMatrix, VenueCatalog};
use crate::error::Error;
use crate::Result;

/// Column order of `evs.csv` and of [`EVVector::values`].
pub const EV_NAMES: [&str; 32] = [
    "SpaceSize", "Shape", "Density", "Cp_u", "Cp_i", "Gini_I", "Gini_U", //
    "APB", "MedPB", "StPB", "SkPB", "KuPB", //
    "ALT", "MedLT", "StLT", "SkLT", "KuLT", //
    "ARG", "MedRG", "StRG", "SkRG", "KuRG", //
    "ADCC", "MedDCC", "StDCC", "SkDCC", "KuDCC", //
    "ADA", "MedDA", "StDA", "SkDA", "KuDA",
];

/// All 32 explanatory variables of one training matrix, ordered as
/// [`EV_NAMES`].
#[derive(Debug, Clone, PartialEq)]
pub struct EVVector {
    pub values: [f64; 32],
}

impl EVVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        EV_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|idx| self.values[idx])
    }
}

fn push_stats(out: &mut Vec<f64>, sample: &[f64]) {
    let s = aggregate(sample);
    out.extend_from_slice(&[s.mean, s.median, s.std, s.skewness, s.kurtosis]);
}

/// Computes the full vector on a non-degenerate training matrix.
/// `cc` is the configured city-center (lat, lon).
pub fn compute_all(
    matrix: &InteractionMatrix,
    catalog: &VenueCatalog,
    cc: (f64, f64),
) -> Result<EVVector> {
    if matrix.is_empty() {
        return Err(Error::Insufficient("cannot compute EVs of an empty matrix".into()));
    }
    let coords = item_coords(matrix, catalog)?;

    let mut v = Vec::with_capacity(32);
    let (space, shape, density, cp_u, cp_i) = structure_evs(matrix);
    v.extend_from_slice(&[space, shape, density, cp_u, cp_i]);

    let item_counts: Vec<f64> = (0..matrix.n_items())
        .map(|i| matrix.users_of(i).len() as f64)
        .collect();
    let user_counts: Vec<f64> = (0..matrix.n_users())
        .map(|u| matrix.items_of(u).len() as f64)
        .collect();
    v.push(gini(&item_counts));
    v.push(gini(&user_counts));

    push_stats(&mut v, &popularity_bias_per_user(matrix));
    push_stats(&mut v, &long_tail_per_user(matrix));
    push_stats(&mut v, &rog_per_user(matrix, &coords));
    push_stats(&mut v, &dcc_per_user(matrix, &coords, cc));
    push_stats(&mut v, &duration_days_per_user(matrix));

    debug_assert_eq!(v.len(), 32);
    let values: [f64; 32] = v.try_into().expect("32 values");
    if let Some(idx) = values.iter().position(|x| !x.is_finite()) {
        return Err(Error::Insufficient(format!(
            "non-finite value for {}",
            EV_NAMES[idx]
        )));
    }
    Ok(EVVector { values })
}
