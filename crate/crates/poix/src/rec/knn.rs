//! User- and item-based k-nearest-neighbor models over binary profiles.

use crate::data::InteractionMatrix;
use crate::par;

use super::{Recommender, Similarity};

/// Cosine similarity of two sorted index sets: |A∩B| / √(|A|·|B|).
pub fn cosine_similarity(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let inter = intersection_size(a, b) as f64;
    inter / ((a.len() as f64) * (b.len() as f64)).sqrt()
}

/// Jaccard similarity of two sorted index sets: |A∩B| / |A∪B|.
pub fn jaccard_similarity(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let inter = intersection_size(a, b);
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnMode {
    User,
    Item,
}

/// Neighborhood model.
///
/// User mode: score(u,i) = Σ over u's top-k similar users v of sim(u,v)·visit(v,i).
/// Item mode: score(u,i) = Σ over i's top-k similar items j of sim(i,j)·visit(u,j).
/// Scores are left non-normalized. Neighbors with zero similarity are never
/// stored (they cannot contribute), and an entity is excluded from its own
/// neighborhood.
pub struct KnnModel<'a> {
    mode: KnnMode,
    /// Per user (user mode) or per item (item mode): top-k `(index, sim)`,
    /// similarity descending, index ascending on ties.
    neighbors: Vec<Vec<(u32, f64)>>,
    train: &'a InteractionMatrix,
}

impl<'a> KnnModel<'a> {
    pub fn fit(train: &'a InteractionMatrix, mode: KnnMode, sim: Similarity, k: usize) -> Self {
        let n = match mode {
            KnnMode::User => train.n_users(),
            KnnMode::Item => train.n_items(),
        };
        let profile = |idx: usize| -> &[u32] {
            match mode {
                KnnMode::User => train.items_of(idx),
                KnnMode::Item => train.users_of(idx),
            }
        };
        let neighbors = par::map_range(n, |a| {
            let pa = profile(a);
            let mut sims: Vec<(u32, f64)> = Vec::new();
            for b in 0..n {
                if b == a {
                    continue;
                }
                let s = match sim {
                    Similarity::Cosine => cosine_similarity(pa, profile(b)),
                    Similarity::Jaccard => jaccard_similarity(pa, profile(b)),
                };
                if s > 0.0 {
                    sims.push((b as u32, s));
                }
            }
            sims.sort_unstable_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
            sims.truncate(k);
            sims
        });
        KnnModel {
            mode,
            neighbors,
            train,
        }
    }
}

impl Recommender for KnnModel<'_> {
    fn scores(&self, user: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.train.n_items()];
        match self.mode {
            KnnMode::User => {
                for &(v, s) in &self.neighbors[user] {
                    for &i in self.train.items_of(v as usize) {
                        out[i as usize] += s;
                    }
                }
            }
            KnnMode::Item => {
                let mut visited = vec![false; self.train.n_items()];
                for &j in self.train.items_of(user) {
                    visited[j as usize] = true;
                }
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = self.neighbors[i]
                        .iter()
                        .filter(|(j, _)| visited[*j as usize])
                        .map(|(_, s)| s)
                        .sum();
                }
            }
        }
        out
    }
}
