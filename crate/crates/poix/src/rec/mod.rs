//! Recommendation models and ranking.
//!
//! Every model implements [`Recommender`]: given a user index it scores every
//! item in the training matrix. [`recommend`] turns those scores into a
//! ranked list, suppressing the user's training items and breaking score
//! ties by ascending item index (which equals ascending venue id, because
//! matrix ids are sorted).

mod baseline;
mod bpr;
mod geo_bpr;
mod hyper;
mod ials;
mod irenmf;
mod knn;
mod linalg;
mod popgeonn;

pub use baseline::{PopModel, RandomModel};
pub use bpr::{fit_bprmf, BprParams, MfModel};
pub use geo_bpr::{fit_geobprmf, near_items_per_user};
pub use hyper::{hyper_grid, HyperParams};
pub use ials::{fit_ials, ials_objective, IalsModel};
pub use irenmf::{fit_irenmf, kmeans_clusters};
pub use knn::{cosine_similarity, jaccard_similarity, KnnMode, KnnModel};
pub use popgeonn::PopGeoNnModel;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::config::HyperConfig;
use crate::data::InteractionMatrix;
use crate::error::Error;
use crate::Result;

/// Identifiers for the models in the suite, in canonical run order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    Random,
    Pop,
    #[serde(rename = "UB")]
    UserKnn,
    #[serde(rename = "IB")]
    ItemKnn,
    #[serde(rename = "HKV")]
    Hkv,
    #[serde(rename = "BPRMF")]
    Bprmf,
    #[serde(rename = "GeoBPRMF")]
    GeoBprmf,
    #[serde(rename = "IRENMF")]
    Irenmf,
    #[serde(rename = "PopGeoNN")]
    PopGeoNn,
}

impl ModelId {
    pub const ALL: [ModelId; 9] = [
        ModelId::Random,
        ModelId::Pop,
        ModelId::UserKnn,
        ModelId::ItemKnn,
        ModelId::Hkv,
        ModelId::Bprmf,
        ModelId::GeoBprmf,
        ModelId::Irenmf,
        ModelId::PopGeoNn,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::Random => "Random",
            ModelId::Pop => "Pop",
            ModelId::UserKnn => "UB",
            ModelId::ItemKnn => "IB",
            ModelId::Hkv => "HKV",
            ModelId::Bprmf => "BPRMF",
            ModelId::GeoBprmf => "GeoBPRMF",
            ModelId::Irenmf => "IRENMF",
            ModelId::PopGeoNn => "PopGeoNN",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown model id `{s}`")))
    }
}

/// Set-overlap similarity used by the neighborhood models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Similarity {
    Cosine,
    Jaccard,
}

impl Similarity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Similarity::Cosine => "cosine",
            Similarity::Jaccard => "jaccard",
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A trained model able to score every training item for a given user.
pub trait Recommender: Send + Sync {
    /// Returns one score per item index of the training matrix.
    fn scores(&self, user: usize) -> Vec<f64>;
}

/// A ranked recommendation list: `(venue_id, score)` in rank order.
pub type RankedList = Vec<(String, f64)>;

/// Ranks the top `k` items for `user`, excluding the user's training items.
///
/// Ordering is score descending, item index ascending on ties. Requesting
/// more items than remain in the candidate set returns the full candidate
/// ranking.
pub fn recommend(
    model: &dyn Recommender,
    train: &InteractionMatrix,
    user: usize,
    k: usize,
) -> RankedList {
    let scores = model.scores(user);
    debug_assert_eq!(scores.len(), train.n_items());
    let mut seen = vec![false; train.n_items()];
    for &i in train.items_of(user) {
        seen[i as usize] = true;
    }
    let mut ranked: Vec<(usize, f64)> = scores
        .iter()
        .enumerate()
        .filter(|(i, _)| !seen[*i])
        .map(|(i, &s)| (i, s))
        .collect();
    ranked.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
        .into_iter()
        .map(|(i, s)| (train.item_id(i).to_string(), s))
        .collect()
}

/// Trains the requested model on `train`.
///
/// `coords` holds `(lat, lon)` per item index and is only consulted by the
/// geographic models. `seed` should already be derived for this particular
/// (subsample, model, hyper-parameter) job.
pub fn fit<'a>(
    model: ModelId,
    params: &HyperParams,
    train: &'a InteractionMatrix,
    coords: &[(f64, f64)],
    seed: u64,
) -> Result<Box<dyn Recommender + 'a>> {
    let mismatch = || {
        Error::Config(format!(
            "hyper-parameters {} do not belong to model {model}",
            params.key()
        ))
    };
    match (model, params) {
        (ModelId::Random, HyperParams::Default) => {
            Ok(Box::new(RandomModel::new(train.n_items(), seed)))
        }
        (ModelId::Pop, HyperParams::Default) => Ok(Box::new(PopModel::fit(train))),
        (ModelId::UserKnn, HyperParams::Knn { sim, k }) => {
            Ok(Box::new(KnnModel::fit(train, KnnMode::User, *sim, *k)))
        }
        (ModelId::ItemKnn, HyperParams::Knn { sim, k }) => {
            Ok(Box::new(KnnModel::fit(train, KnnMode::Item, *sim, *k)))
        }
        (
            ModelId::Hkv,
            HyperParams::Ials {
                factors,
                lambda,
                alpha,
                iters,
            },
        ) => Ok(Box::new(fit_ials(
            train, *factors, *lambda, *alpha, *iters, seed,
        )?)),
        (ModelId::Bprmf, HyperParams::Bprmf(p)) => Ok(Box::new(fit_bprmf(train, p, seed))),
        (ModelId::GeoBprmf, HyperParams::GeoBprmf { bpr, max_dist_km }) => Ok(Box::new(
            fit_geobprmf(train, coords, bpr, *max_dist_km, seed),
        )),
        (
            ModelId::Irenmf,
            HyperParams::Irenmf {
                factors,
                geo_alpha,
                lambda3,
                clusters,
            },
        ) => Ok(Box::new(fit_irenmf(
            train, coords, *factors, *geo_alpha, *lambda3, *clusters, seed,
        )?)),
        (ModelId::PopGeoNn, HyperParams::Knn { sim, k }) => {
            Ok(Box::new(PopGeoNnModel::fit(train, coords, *sim, *k)))
        }
        _ => Err(mismatch()),
    }
}

/// Enumerates the hyper-parameter grid for `model` in deterministic order.
pub fn grid_for(model: ModelId, hyper: &HyperConfig) -> Vec<HyperParams> {
    hyper_grid(model, hyper)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Vec<f64>);
    impl Recommender for Fixed {
        fn scores(&self, _user: usize) -> Vec<f64> {
            self.0.clone()
        }
    }

    fn toy_matrix() -> InteractionMatrix {
        // u0 visited v0; u1 visited v1, v2.
        let events = [
            ("u0", "v0", 0i64),
            ("u1", "v1", 1),
            ("u1", "v2", 2),
            ("u2", "v3", 3),
        ];
        InteractionMatrix::from_events(events.iter().map(|&(u, v, t)| (u, v, t)))
    }

    #[test]
    fn model_id_round_trips_through_strings() {
        for m in ModelId::ALL {
            assert_eq!(m.as_str().parse::<ModelId>().unwrap(), m);
        }
        assert!("nope".parse::<ModelId>().is_err());
        assert_eq!(serde_json::to_string(&ModelId::UserKnn).unwrap(), "\"UB\"");
        assert_eq!(
            serde_json::from_str::<ModelId>("\"GeoBPRMF\"").unwrap(),
            ModelId::GeoBprmf
        );
    }

    #[test]
    fn recommend_suppresses_training_items() {
        let m = toy_matrix();
        let ranked = recommend(&Fixed(vec![9.0, 8.0, 7.0, 6.0]), &m, 1, 10);
        let ids: Vec<&str> = ranked.iter().map(|(v, _)| v.as_str()).collect();
        assert_eq!(ids, ["v0", "v3"]); // v1, v2 are u1's training items
    }

    #[test]
    fn recommend_breaks_ties_by_ascending_venue_id() {
        let m = toy_matrix();
        // u2 visited only v3; the three candidates all tie at 1.0.
        let ranked = recommend(&Fixed(vec![1.0, 1.0, 1.0, 1.0]), &m, 2, 10);
        let ids: Vec<&str> = ranked.iter().map(|(v, _)| v.as_str()).collect();
        assert_eq!(ids, ["v0", "v1", "v2"]);
    }

    #[test]
    fn recommend_handles_k_beyond_candidates() {
        let m = toy_matrix();
        let ranked = recommend(&Fixed(vec![0.5, 0.25, 0.75, 0.0]), &m, 0, 99);
        assert_eq!(ranked.len(), 3);
        assert_eq!(ranked[0].0, "v2");
    }
}
