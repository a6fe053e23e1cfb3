//! Run manifest: which stages completed, which subsamples exist, and which
//! were skipped as degenerate. Persisted as JSON next to the artifacts so a
//! crashed run resumes where it stopped.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Completion record of one stage.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StageRecord {
    pub completed: bool,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub stages: BTreeMap<String, StageRecord>,
    /// All grid keys, in grid order (including degenerate ones).
    pub subsample_keys: Vec<String>,
    /// Keys skipped downstream: too small after filtering, or trait
    /// computation failed. Sorted, deduplicated.
    pub degenerate: Vec<String>,
}

impl RunManifest {
    pub fn path(out_dir: &Path) -> PathBuf {
        out_dir.join("manifest.json")
    }

    /// Loads the manifest if present, otherwise starts a fresh one.
    pub fn load_or_default(out_dir: &Path) -> Result<RunManifest> {
        let path = Self::path(out_dir);
        if !path.exists() {
            return Ok(RunManifest::default());
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("unreadable manifest {}: {e}", path.display())))
    }

    pub fn save(&self, out_dir: &Path) -> Result<()> {
        let path = Self::path(out_dir);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn is_completed(&self, stage: &str) -> bool {
        self.stages.get(stage).is_some_and(|s| s.completed)
    }

    pub fn mark_completed(&mut self, stage: &str, wall_ms: u64) {
        self.stages.insert(
            stage.to_string(),
            StageRecord {
                completed: true,
                wall_ms,
            },
        );
    }

    pub fn add_degenerate(&mut self, key: &str) {
        if !self.degenerate.iter().any(|k| k == key) {
            self.degenerate.push(key.to_string());
            self.degenerate.sort();
        }
    }

    pub fn is_degenerate(&self, key: &str) -> bool {
        self.degenerate.iter().any(|k| k == key)
    }

    /// Keys that survive the degenerate filter, in grid order.
    pub fn usable_keys(&self) -> Vec<String> {
        self.subsample_keys
            .iter()
            .filter(|k| !self.is_degenerate(k))
            .cloned()
            .collect()
    }
}
