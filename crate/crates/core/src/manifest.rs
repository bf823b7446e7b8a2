//! Run manifests: what a command read, what it wrote, and with which seed.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::write_json;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    /// File path as given, or `builtin:<name>` for shipped defaults.
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub workers: usize,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub started_unix_s: f64,
    pub finished_unix_s: Option<f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn start(command: Vec<String>, seed: Option<u64>, workers: usize) -> Self {
        RunManifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            workers,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_unix_s: now(),
            finished_unix_s: None,
        }
    }

    pub fn input_file(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.inputs.push(InputDigest {
            source: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn input_builtin(&mut self, name: &str, text: &str) {
        self.inputs.push(InputDigest {
            source: format!("builtin:{name}"),
            sha256: sha256_hex(text.as_bytes()),
        });
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Stamp the finish time and write atomically; call after every
    /// output is in place.
    pub fn finish(mut self, path: &Path) -> Result<()> {
        self.finished_unix_s = Some(now());
        write_json(path, &self)
    }
}
