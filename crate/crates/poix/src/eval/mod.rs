//! Metric computation, per-model hyperparameter selection, and the
//! popularity-baseline exclusion rule.

mod exclusion;
mod grid_search;
mod metrics;

pub use exclusion::{exclusion_filter, mean_ndcg5_per_model};
pub use grid_search::{dump_depth, evaluate_lists, grid_search, job_seed, MetricsBlock};
pub use metrics::{epc_at_k, item_exposure_at_k, ndcg_at_k};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::rec::ModelId;
use crate::subsample::TestSet;

/// Ranked venue ids per user (rank order, scores dropped).
pub type RecLists = BTreeMap<String, Vec<String>>;

/// Deduplicated test venues per user.
pub type TestItems = BTreeMap<String, BTreeSet<String>>;

/// Collapses raw test events (which may repeat a venue) into venue sets.
pub fn dedupe_test(test: &TestSet) -> TestItems {
    test.iter()
        .map(|(user, events)| {
            (
                user.clone(),
                events.iter().map(|(venue, _)| venue.clone()).collect(),
            )
        })
        .collect()
}

/// Metrics of one model's winning configuration on one subsample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub subsample: String,
    pub model: ModelId,
    pub hyper_key: String,
    pub cutoffs: Vec<usize>,
    pub ndcg: Vec<f64>,
    pub epc: Vec<f64>,
    pub item_exposure: Vec<f64>,
    /// Selection score: nDCG at cutoff 5 (fixed, independent of `cutoffs`).
    pub ndcg5: f64,
    /// Users with a non-empty test set and a non-empty recommendation list.
    pub evaluated_users: usize,
}
