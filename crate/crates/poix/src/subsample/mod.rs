//! Domain-driven subsamples: the cross product of four filter families
//! (user origin, season, drop-top-popular venues, k-core), each materialized
//! as a filtered matrix with a per-user temporal train/test split.

mod filters;
mod kcore;
mod split;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::SubsamplingConfig;
use crate::data::{CheckIn, InteractionMatrix, Origin, UserHomeLabel};

pub use filters::{drop_top_venues, filter_origin, filter_season};
pub use kcore::enforce_k_core;
pub use split::temporal_split;

/// Check-in season. Summer covers the warmer months May–October (UTC);
/// winter is the complement, so the two partition the year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Season {
    All,
    Summer,
    Winter,
}

impl Season {
    pub fn as_str(&self) -> &'static str {
        match self {
            Season::All => "All",
            Season::Summer => "Summer",
            Season::Winter => "Winter",
        }
    }

    /// Does a check-in in this UTC month (1–12) belong to the season?
    pub fn contains_month(&self, month: u32) -> bool {
        match self {
            Season::All => true,
            Season::Summer => (5..=10).contains(&month),
            Season::Winter => !(5..=10).contains(&month),
        }
    }
}

impl std::str::FromStr for Season {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "All" | "ALL" => Ok(Season::All),
            "Summer" | "SUMMER" => Ok(Season::Summer),
            "Winter" | "WINTER" => Ok(Season::Winter),
            other => Err(format!("unknown season {other:?}")),
        }
    }
}

/// Parameters of one subsample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub origin: Origin,
    pub season: Season,
    pub k_core: u32,
    pub drop_top_pct: f64,
}

impl SubsampleSpec {
    /// Stable key string, e.g. `k5-dtv1-oNYC-sSummer` (drop-top fraction
    /// rendered as a percentage with trailing zeros trimmed).
    pub fn key(&self) -> String {
        format!(
            "k{}-dtv{}-o{}-s{}",
            self.k_core,
            format_pct(self.drop_top_pct),
            self.origin.as_str(),
            self.season.as_str()
        )
    }
}

/// 0.005 → "0.5", 0.01 → "1", 0.05 → "5".
fn format_pct(pct: f64) -> String {
    let v = (pct * 100.0 * 1e6).round() / 1e6;
    format!("{v}")
}

/// Full cross product of the configured grids, in deterministic order
/// (k-core outermost, then drop-top, origin, season — the key component
/// order).
pub fn generate_grid(cfg: &SubsamplingConfig) -> Vec<SubsampleSpec> {
    let mut out = Vec::new();
    for &k_core in &cfg.k_cores {
        for &drop_top_pct in &cfg.drop_top_pcts {
            for &origin in &cfg.origins {
                for &season in &cfg.seasons {
                    out.push(SubsampleSpec {
                        origin,
                        season,
                        k_core,
                        drop_top_pct,
                    });
                }
            }
        }
    }
    out
}

/// A held-out venue of one user.
pub type TestSet = BTreeMap<String, Vec<(String, i64)>>;

/// One materialized subsample: the filtered matrix and its temporal split.
#[derive(Debug, Clone)]
pub struct Subsample {
    pub spec: SubsampleSpec,
    /// Post-filter, pre-split matrix (the k-core guarantee holds here).
    pub full: InteractionMatrix,
    pub train: InteractionMatrix,
    /// user_id → held-out venues as (venue_id, first-visit ts), sorted by
    /// (first_ts, venue_id). Users whose whole history fits in train are
    /// absent.
    pub test: TestSet,
    /// Empty or single-user after filtering; skipped downstream.
    pub degenerate: bool,
}

/// Applies the four filters in order origin → season → drop-top → k-core,
/// then splits. Filters run on the check-in stream; the k-core prunes the
/// matrix built from what remains.
pub fn materialize(
    spec: SubsampleSpec,
    checkins: &[CheckIn],
    labels: &HashMap<String, UserHomeLabel>,
) -> Subsample {
    let all: Vec<&CheckIn> = checkins.iter().collect();
    let by_origin = filter_origin(&all, labels, spec.origin);
    let by_season = filter_season(&by_origin, spec.season);
    let survived = drop_top_venues(&by_season, spec.drop_top_pct);
    let matrix = InteractionMatrix::from_checkins(survived.iter().copied());
    let full = enforce_k_core(&matrix, spec.k_core);

    if full.n_users() < 2 || full.n_items() == 0 {
        return Subsample {
            spec,
            full,
            train: InteractionMatrix::default(),
            test: TestSet::new(),
            degenerate: true,
        };
    }
    debug_assert!(
        (0..full.n_users()).all(|u| full.items_of(u).len() >= spec.k_core as usize)
            && (0..full.n_items()).all(|i| full.users_of(i).len() >= spec.k_core as usize),
        "k-core postcondition violated"
    );

    let (train, test) = temporal_split(&full);
    Subsample {
        spec,
        full,
        train,
        test,
        degenerate: false,
    }
}
