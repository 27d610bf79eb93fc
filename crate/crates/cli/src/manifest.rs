//! Run manifest: config snapshot, per-stage content hashes and timings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Hash over stage parameters and input artifact hashes.
    pub key: String,
    pub complete: bool,
    pub outputs: BTreeMap<String, String>,
    pub wall_seconds: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub code_version: String,
    pub stages: BTreeMap<String, StageRecord>,
    pub complete: bool,
}

impl RunManifest {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            config,
            code_version: env!("CARGO_PKG_VERSION").into(),
            stages: BTreeMap::new(),
            complete: false,
        }
    }

    /// Loads an existing manifest, keeping its stage records but adopting the
    /// current config snapshot.
    pub fn load_or_new(dir: &Path, config: ExperimentConfig) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(Self::new(config));
        }
        let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
        match serde_json::from_str::<RunManifest>(&text) {
            Ok(mut m) => {
                m.config = config;
                m.code_version = env!("CARGO_PKG_VERSION").into();
                Ok(m)
            }
            Err(e) => {
                log::warn!("ignoring unreadable manifest {}: {e}", path.display());
                Ok(Self::new(config))
            }
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").map_err(CliError::io(&path))
    }

    /// `true` when the stage ran with this key and every output still hashes
    /// to the recorded value.
    pub fn is_fresh(&self, stage: &str, key: &str, dir: &Path) -> bool {
        let Some(rec) = self.stages.get(stage) else {
            return false;
        };
        rec.complete
            && rec.key == key
            && rec
                .outputs
                .iter()
                .all(|(file, hash)| hash_file(&dir.join(file)).is_ok_and(|h| &h == hash))
    }
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    Ok(hash_bytes(&bytes))
}
