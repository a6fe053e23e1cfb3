//! Popularity-baseline exclusion: models whose mean accuracy across all
//! subsamples falls below the Pop baseline carry too little signal to
//! explain and are dropped from the regression pool.

use std::collections::BTreeMap;

use crate::rec::ModelId;

use super::EvalResult;

/// Mean nDCG@5 per model over every subsample it was evaluated on.
pub fn mean_ndcg5_per_model(results: &[EvalResult]) -> BTreeMap<ModelId, f64> {
    let mut sums: BTreeMap<ModelId, (f64, usize)> = BTreeMap::new();
    for r in results {
        let e = sums.entry(r.model).or_insert((0.0, 0));
        e.0 += r.ndcg5;
        e.1 += 1;
    }
    sums.into_iter()
        .map(|(m, (sum, n))| (m, sum / n as f64))
        .collect()
}

/// Drops every model whose mean nDCG@5 is strictly below the Pop baseline's;
/// Pop itself is always retained, and exact ties survive. Returns retained
/// ids in canonical model order. Without Pop results no model can be judged,
/// so everything is retained.
pub fn exclusion_filter(results: &[EvalResult]) -> Vec<ModelId> {
    let means = mean_ndcg5_per_model(results);
    let present: Vec<ModelId> = ModelId::ALL
        .iter()
        .copied()
        .filter(|m| means.contains_key(m))
        .collect();
    let Some(&pop_mean) = means.get(&ModelId::Pop) else {
        return present;
    };
    present
        .into_iter()
        .filter(|m| *m == ModelId::Pop || means[m] >= pop_mean)
        .collect()
}
