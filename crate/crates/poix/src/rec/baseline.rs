//! Non-personalized baselines: random ranking and global popularity.

use rand::Rng;

use crate::data::InteractionMatrix;
use crate::seeds;

use super::Recommender;

/// Uniform random scores, reproducible per (seed, user).
///
/// Each user draws from an independent stream derived from the model seed,
/// so rankings do not depend on the order users are scored in.
pub struct RandomModel {
    n_items: usize,
    seed: u64,
}

impl RandomModel {
    pub fn new(n_items: usize, seed: u64) -> Self {
        RandomModel { n_items, seed }
    }
}

impl Recommender for RandomModel {
    fn scores(&self, user: usize) -> Vec<f64> {
        let mut rng = seeds::rng(self.seed, &format!("user/{user}"));
        (0..self.n_items).map(|_| rng.gen::<f64>()).collect()
    }
}

/// Popularity baseline: score(i) = number of distinct visitors of `i`.
pub struct PopModel {
    counts: Vec<f64>,
}

impl PopModel {
    pub fn fit(train: &InteractionMatrix) -> Self {
        let counts = (0..train.n_items())
            .map(|i| train.users_of(i).len() as f64)
            .collect();
        PopModel { counts }
    }
}

impl Recommender for PopModel {
    fn scores(&self, _user: usize) -> Vec<f64> {
        self.counts.clone()
    }
}
