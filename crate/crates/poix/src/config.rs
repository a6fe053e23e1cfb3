//! Run configuration: data source, filter grids, hyperparameter grids,
//! evaluation cutoffs and output locations.
//!
//! Configs are TOML files; every field has a default, so `{}` is a valid
//! config and the CLI flags `--out`, `--seed`, `--jobs` override the
//! corresponding fields after loading. A resolved copy of the config is
//! written into each run directory for provenance.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::Origin;
use crate::error::Error;
use crate::rec::ModelId;
use crate::subsample::Season;
use crate::Result;

/// Geographic bounding box in degrees, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl BBox {
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        lat >= self.min_lat && lat <= self.max_lat && lon >= self.min_lon && lon <= self.max_lon
    }
}

/// Five boroughs plus Newark; overridable per run.
pub fn default_bbox() -> BBox {
    BBox {
        min_lat: 40.48,
        max_lat: 40.95,
        min_lon: -74.30,
        max_lon: -73.68,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    /// CSV with header `user_id,venue_id,timestamp,lat,lon,category,city`.
    Canonical,
    /// Tab-separated global-scale Foursquare dump (check-ins + POIs files).
    Tist2015,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DataConfig {
    pub format: DataFormat,
    /// Check-in file; for `tist2015` the check-ins TSV.
    pub checkins: PathBuf,
    /// POI metadata TSV; `tist2015` only.
    pub pois: Option<PathBuf>,
    pub target_city: String,
    pub target_country: String,
    pub bbox: BBox,
    pub city_center_lat: f64,
    pub city_center_lon: f64,
    pub residence_category_names: Vec<String>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            format: DataFormat::Canonical,
            checkins: PathBuf::from("checkins.csv"),
            pois: None,
            target_city: "New York".to_owned(),
            target_country: "US".to_owned(),
            bbox: default_bbox(),
            // City Hall; the analysis needs one fixed reference point.
            city_center_lat: 40.7128,
            city_center_lon: -74.0060,
            residence_category_names: vec!["Residence".to_owned(), "Residences".to_owned()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SubsamplingConfig {
    pub origins: Vec<Origin>,
    pub seasons: Vec<Season>,
    pub k_cores: Vec<u32>,
    pub drop_top_pcts: Vec<f64>,
}

impl Default for SubsamplingConfig {
    fn default() -> Self {
        SubsamplingConfig {
            origins: vec![Origin::All, Origin::Nyc, Origin::Us, Origin::Other],
            seasons: vec![Season::All, Season::Summer, Season::Winter],
            k_cores: vec![2, 5, 10],
            drop_top_pcts: vec![0.005, 0.01, 0.02, 0.05],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationConfig {
    pub cutoffs: Vec<usize>,
    pub models: Vec<ModelId>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            cutoffs: vec![5, 10, 20],
            models: vec![
                ModelId::Random,
                ModelId::Pop,
                ModelId::UserKnn,
                ModelId::ItemKnn,
                ModelId::Hkv,
                ModelId::Bprmf,
                ModelId::GeoBprmf,
                ModelId::Irenmf,
                ModelId::PopGeoNn,
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExplainConfig {
    /// Collinearity cutoff for the iterative VIF elimination.
    pub vif_threshold: f64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig { vif_threshold: 12.0 }
    }
}

/// Hyperparameter grids searched per model (defaults reproduce the full
/// published grids; shrink them in the config for quick runs).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperConfig {
    pub knn_sims: Vec<crate::rec::Similarity>,
    pub knn_neighbors: Vec<usize>,
    pub ials_factors: Vec<usize>,
    pub ials_lambda: Vec<f64>,
    pub ials_alpha: Vec<f64>,
    pub ials_iters: usize,
    pub bpr_factors: Vec<usize>,
    pub bpr_bias_reg: Vec<f64>,
    pub bpr_reg_u: Vec<f64>,
    pub bpr_learn_rate: f64,
    pub bpr_iters: usize,
    pub geo_max_dist_km: Vec<f64>,
    pub irenmf_factors: Vec<usize>,
    pub irenmf_geo_alpha: Vec<f64>,
    pub irenmf_lambda3: Vec<f64>,
    pub irenmf_clusters: Vec<usize>,
}

impl Default for HyperConfig {
    fn default() -> Self {
        HyperConfig {
            knn_sims: vec![crate::rec::Similarity::Cosine, crate::rec::Similarity::Jaccard],
            knn_neighbors: vec![20, 40, 60, 80, 100, 120],
            ials_factors: vec![10, 50, 100],
            ials_lambda: vec![0.1, 1.0],
            ials_alpha: vec![0.1, 1.0],
            ials_iters: 20,
            bpr_factors: vec![10, 50, 100],
            bpr_bias_reg: vec![0.0, 0.5, 1.0],
            bpr_reg_u: vec![0.0025, 0.001, 0.005, 0.01, 0.1],
            bpr_learn_rate: 0.05,
            bpr_iters: 50,
            geo_max_dist_km: vec![1.0, 4.0],
            irenmf_factors: vec![50, 100],
            irenmf_geo_alpha: vec![0.4, 0.6],
            irenmf_lambda3: vec![0.1, 1.0],
            irenmf_clusters: vec![5, 50],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Master seed; all job seeds derive from it.
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; 0 = one per core. Ignored by sequential builds.
    pub jobs: usize,
    /// Heat-map grid resolution (bins per axis over the bbox).
    pub heatmap_bins: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out_dir: PathBuf::from("run"),
            jobs: 0,
            heatmap_bins: 50,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub data: DataConfig,
    pub subsampling: SubsamplingConfig,
    pub evaluation: EvaluationConfig,
    pub explain: ExplainConfig,
    pub hyper: HyperConfig,
    pub run: RunConfig,
}

/// Environment variable holding the default directory for relative data paths.
pub const DATA_DIR_ENV: &str = "POIX_DATA_DIR";

impl PipelineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: PipelineConfig =
            toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&s)?;
        cfg.resolve_data_paths();
        Ok(cfg)
    }

    /// Prefixes relative data paths with `$POIX_DATA_DIR` when set.
    pub fn resolve_data_paths(&mut self) {
        if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
            let dir = PathBuf::from(dir);
            if self.data.checkins.is_relative() {
                self.data.checkins = dir.join(&self.data.checkins);
            }
            if let Some(p) = &self.data.pois {
                if p.is_relative() {
                    self.data.pois = Some(dir.join(p));
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.data.bbox;
        if b.min_lat >= b.max_lat || b.min_lon >= b.max_lon {
            return Err(Error::Config("bbox min must be below max".into()));
        }
        if self.data.format == DataFormat::Tist2015 && self.data.pois.is_none() {
            return Err(Error::Config("tist2015 input needs `data.pois`".into()));
        }
        for &p in &self.subsampling.drop_top_pcts {
            if !(0.0..1.0).contains(&p) || p == 0.0 {
                return Err(Error::Config(format!("drop_top_pct {p} outside (0,1)")));
            }
        }
        for &k in &self.subsampling.k_cores {
            if k < 1 {
                return Err(Error::Config("k_core must be ≥ 1".into()));
            }
        }
        if self.explain.vif_threshold <= 1.0 {
            return Err(Error::Config("vif_threshold must exceed 1".into()));
        }
        if self.evaluation.cutoffs.is_empty() || self.evaluation.cutoffs.iter().any(|&k| k == 0) {
            return Err(Error::Config("cutoffs must be non-empty and positive".into()));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_toml_yields_defaults() {
        let cfg = PipelineConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.subsampling.k_cores, vec![2, 5, 10]);
        assert_eq!(cfg.evaluation.cutoffs, vec![5, 10, 20]);
        assert_eq!(cfg.explain.vif_threshold, 12.0);
        assert_eq!(cfg.hyper.knn_neighbors, vec![20, 40, 60, 80, 100, 120]);
        assert_eq!(cfg.run.seed, 42);
    }

    #[test]
    fn default_grid_is_full_cross_product() {
        let cfg = PipelineConfig::default();
        let n = cfg.subsampling.origins.len()
            * cfg.subsampling.seasons.len()
            * cfg.subsampling.k_cores.len()
            * cfg.subsampling.drop_top_pcts.len();
        assert_eq!(n, 144);
    }

    #[test]
    fn bad_bbox_rejected() {
        let s = "[data]\nbbox = { min_lat = 1.0, max_lat = 0.0, min_lon = 0.0, max_lon = 1.0 }";
        assert!(PipelineConfig::from_toml_str(s).is_err());
    }

    #[test]
    fn roundtrips_through_toml() {
        let cfg = PipelineConfig::default();
        let s = cfg.to_toml_string();
        let back = PipelineConfig::from_toml_str(&s).unwrap();
        assert_eq!(back.to_toml_string(), s);
    }
}
