//! Matrix factorization trained with the pairwise Bayesian Personalized
//! Ranking criterion: SGD over (user, visited, unvisited) triples.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::InteractionMatrix;
use crate::seeds;

use super::linalg::dot;
use super::Recommender;

/// BPR hyperparameters. The regularizer for positive items equals `reg_u`,
/// and the negative-item regularizer is `reg_u / 10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BprParams {
    pub factors: usize,
    pub bias_reg: f64,
    pub reg_u: f64,
    pub learn_rate: f64,
    pub iters: usize,
}

impl BprParams {
    pub fn reg_i(&self) -> f64 {
        self.reg_u
    }

    pub fn reg_j(&self) -> f64 {
        self.reg_u / 10.0
    }
}

/// Latent-factor model with item biases: score(u,i) = b_i + p_u·q_i.
pub struct MfModel {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub bias: Vec<f64>,
    pub factors: usize,
}

impl Recommender for MfModel {
    fn scores(&self, user: usize) -> Vec<f64> {
        let f = self.factors;
        let pu = &self.p[user * f..(user + 1) * f];
        self.bias
            .iter()
            .enumerate()
            .map(|(i, b)| b + dot(pu, &self.q[i * f..(i + 1) * f]))
            .collect()
    }
}

pub(super) struct BprState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub bias: Vec<f64>,
    factors: usize,
    lr: f64,
    bias_reg: f64,
    reg_u: f64,
    reg_i: f64,
    reg_j: f64,
}

impl BprState {
    pub fn new(n_users: usize, n_items: usize, params: &BprParams, rng: &mut ChaCha8Rng) -> Self {
        let normal = Normal::new(0.0, 0.1).expect("valid stddev");
        let f = params.factors;
        BprState {
            p: (0..n_users * f).map(|_| normal.sample(rng)).collect(),
            q: (0..n_items * f).map(|_| normal.sample(rng)).collect(),
            bias: vec![0.0; n_items],
            factors: f,
            lr: params.learn_rate,
            bias_reg: params.bias_reg,
            reg_u: params.reg_u,
            reg_i: params.reg_i(),
            reg_j: params.reg_j(),
        }
    }

    /// One SGD step pushing item `i` above item `j` for user `u`.
    pub fn update(&mut self, u: usize, i: usize, j: usize) {
        let f = self.factors;
        let pu = u * f;
        let qi = i * f;
        let qj = j * f;
        let mut x = self.bias[i] - self.bias[j];
        for k in 0..f {
            x += self.p[pu + k] * (self.q[qi + k] - self.q[qj + k]);
        }
        // σ(−x); the clamp keeps exp() finite for runaway scores.
        let e = 1.0 / (1.0 + x.clamp(-30.0, 30.0).exp());

        self.bias[i] += self.lr * (e - self.bias_reg * self.bias[i]);
        self.bias[j] += self.lr * (-e - self.bias_reg * self.bias[j]);
        for k in 0..f {
            let (puk, qik, qjk) = (self.p[pu + k], self.q[qi + k], self.q[qj + k]);
            self.p[pu + k] += self.lr * (e * (qik - qjk) - self.reg_u * puk);
            self.q[qi + k] += self.lr * (e * puk - self.reg_i * qik);
            self.q[qj + k] += self.lr * (-e * puk - self.reg_j * qjk);
        }
    }

    pub fn into_model(self) -> MfModel {
        MfModel {
            p: self.p,
            q: self.q,
            bias: self.bias,
            factors: self.factors,
        }
    }
}

/// Draws an item the user has not visited, or `None` when every rejection
/// attempt failed (users who visited the whole catalog are skipped upfront).
pub(super) fn sample_negative(
    train: &InteractionMatrix,
    u: usize,
    rng: &mut ChaCha8Rng,
) -> Option<u32> {
    let n_items = train.n_items();
    if train.items_of(u).len() >= n_items {
        return None;
    }
    for _ in 0..1000 {
        let cand = rng.gen_range(0..n_items) as u32;
        if !train.has(u, cand) {
            return Some(cand);
        }
    }
    None
}

pub fn fit_bprmf(train: &InteractionMatrix, params: &BprParams, seed: u64) -> MfModel {
    let mut rng = seeds::rng(seed, "bpr");
    let mut state = BprState::new(train.n_users(), train.n_items(), params, &mut rng);
    let samples_per_iter = train.unique_count() as usize;
    for _ in 0..params.iters {
        for _ in 0..samples_per_iter {
            let u = rng.gen_range(0..train.n_users());
            let pos = train.items_of(u);
            let i = pos[rng.gen_range(0..pos.len())] as usize;
            let Some(j) = sample_negative(train, u, &mut rng) else {
                continue;
            };
            state.update(u, i, j as usize);
        }
    }
    state.into_model()
}
