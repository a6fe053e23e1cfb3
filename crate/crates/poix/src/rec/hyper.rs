//! Hyperparameter combinations and their deterministic enumeration order.

use serde::{Deserialize, Serialize};

use crate::config::HyperConfig;

use super::{BprParams, ModelId, Similarity};

/// One concrete hyperparameter combination for a model.
///
/// `key()` is stable and file-name safe; it names recommendation dumps and
/// identifies the grid-search winner in result tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HyperParams {
    /// Models without hyperparameters (Random, Pop).
    Default,
    /// Neighborhood models; also parameterizes the kNN component of PopGeoNN.
    Knn { sim: Similarity, k: usize },
    Ials {
        factors: usize,
        lambda: f64,
        alpha: f64,
        iters: usize,
    },
    Bprmf(BprParams),
    GeoBprmf { bpr: BprParams, max_dist_km: f64 },
    Irenmf {
        factors: usize,
        geo_alpha: f64,
        lambda3: f64,
        clusters: usize,
    },
}

fn num(x: f64) -> String {
    format!("{x}")
}

impl HyperParams {
    pub fn key(&self) -> String {
        match self {
            HyperParams::Default => "default".to_owned(),
            HyperParams::Knn { sim, k } => format!("{sim}-k{k}"),
            HyperParams::Ials {
                factors,
                lambda,
                alpha,
                iters,
            } => format!("f{factors}-lam{}-a{}-it{iters}", num(*lambda), num(*alpha)),
            HyperParams::Bprmf(p) => format!(
                "f{}-br{}-reg{}",
                p.factors,
                num(p.bias_reg),
                num(p.reg_u)
            ),
            HyperParams::GeoBprmf { bpr, max_dist_km } => format!(
                "f{}-br{}-reg{}-d{}",
                bpr.factors,
                num(bpr.bias_reg),
                num(bpr.reg_u),
                num(*max_dist_km)
            ),
            HyperParams::Irenmf {
                factors,
                geo_alpha,
                lambda3,
                clusters,
            } => format!(
                "f{factors}-ga{}-lam{}-c{clusters}",
                num(*geo_alpha),
                num(*lambda3)
            ),
        }
    }
}

/// Enumerates the search grid for `model` from the configured value lists.
///
/// Order is fixed (outer to inner in field declaration order) because
/// grid-search ties are resolved in favor of the earliest combination.
pub fn hyper_grid(model: ModelId, cfg: &HyperConfig) -> Vec<HyperParams> {
    match model {
        ModelId::Random | ModelId::Pop => vec![HyperParams::Default],
        ModelId::UserKnn | ModelId::ItemKnn | ModelId::PopGeoNn => {
            let mut out = Vec::new();
            for &sim in &cfg.knn_sims {
                for &k in &cfg.knn_neighbors {
                    out.push(HyperParams::Knn { sim, k });
                }
            }
            out
        }
        ModelId::Hkv => {
            let mut out = Vec::new();
            for &factors in &cfg.ials_factors {
                for &lambda in &cfg.ials_lambda {
                    for &alpha in &cfg.ials_alpha {
                        out.push(HyperParams::Ials {
                            factors,
                            lambda,
                            alpha,
                            iters: cfg.ials_iters,
                        });
                    }
                }
            }
            out
        }
        ModelId::Bprmf => bpr_grid(cfg)
            .into_iter()
            .map(HyperParams::Bprmf)
            .collect(),
        ModelId::GeoBprmf => {
            let mut out = Vec::new();
            for bpr in bpr_grid(cfg) {
                for &max_dist_km in &cfg.geo_max_dist_km {
                    out.push(HyperParams::GeoBprmf {
                        bpr: bpr.clone(),
                        max_dist_km,
                    });
                }
            }
            out
        }
        ModelId::Irenmf => {
            let mut out = Vec::new();
            for &factors in &cfg.irenmf_factors {
                for &geo_alpha in &cfg.irenmf_geo_alpha {
                    for &lambda3 in &cfg.irenmf_lambda3 {
                        for &clusters in &cfg.irenmf_clusters {
                            out.push(HyperParams::Irenmf {
                                factors,
                                geo_alpha,
                                lambda3,
                                clusters,
                            });
                        }
                    }
                }
            }
            out
        }
    }
}

fn bpr_grid(cfg: &HyperConfig) -> Vec<BprParams> {
    let mut out = Vec::new();
    for &factors in &cfg.bpr_factors {
        for &bias_reg in &cfg.bpr_bias_reg {
            for &reg_u in &cfg.bpr_reg_u {
                out.push(BprParams {
                    factors,
                    bias_reg,
                    reg_u,
                    learn_rate: cfg.bpr_learn_rate,
                    iters: cfg.bpr_iters,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn default_grid_sizes() {
        let cfg = HyperConfig::default();
        assert_eq!(hyper_grid(ModelId::Random, &cfg).len(), 1);
        assert_eq!(hyper_grid(ModelId::Pop, &cfg).len(), 1);
        assert_eq!(hyper_grid(ModelId::UserKnn, &cfg).len(), 12); // 2 sims × 6 k
        assert_eq!(hyper_grid(ModelId::ItemKnn, &cfg).len(), 12);
        assert_eq!(hyper_grid(ModelId::Hkv, &cfg).len(), 12); // 3 × 2 × 2
        assert_eq!(hyper_grid(ModelId::Bprmf, &cfg).len(), 45); // 3 × 3 × 5
        assert_eq!(hyper_grid(ModelId::GeoBprmf, &cfg).len(), 90); // 45 × 2
        assert_eq!(hyper_grid(ModelId::Irenmf, &cfg).len(), 16); // 2⁴
        assert_eq!(hyper_grid(ModelId::PopGeoNn, &cfg).len(), 12);
    }

    #[test]
    fn keys_are_unique_and_filename_safe() {
        let cfg = HyperConfig::default();
        for model in ModelId::ALL {
            let grid = hyper_grid(model, &cfg);
            let keys: BTreeSet<String> = grid.iter().map(|p| p.key()).collect();
            assert_eq!(keys.len(), grid.len(), "duplicate keys for {model}");
            for key in keys {
                assert!(
                    key.chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '.'),
                    "unsafe key {key}"
                );
            }
        }
    }

    #[test]
    fn grid_order_is_outer_to_inner() {
        let cfg = HyperConfig::default();
        let grid = hyper_grid(ModelId::UserKnn, &cfg);
        assert_eq!(
            grid[0],
            HyperParams::Knn {
                sim: Similarity::Cosine,
                k: 20
            }
        );
        assert_eq!(
            grid[1],
            HyperParams::Knn {
                sim: Similarity::Cosine,
                k: 40
            }
        );
        assert_eq!(grid[0].key(), "cosine-k20");
        let ials = hyper_grid(ModelId::Hkv, &cfg);
        assert_eq!(ials[0].key(), "f10-lam0.1-a0.1-it20");
        assert_eq!(ials[1].key(), "f10-lam0.1-a1-it20");
    }
}
