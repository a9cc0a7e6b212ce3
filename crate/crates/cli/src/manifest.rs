//! Run manifests: everything needed to rerun a command and check that the
//! outputs came out the same.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> CliResult<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self { path: path.to_path_buf(), sha256: sha256_hex(&bytes) })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_secs: f64,
    /// One entry per chain for `fit`; empty otherwise.
    pub per_chain_secs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub seed: u64,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub timings: Timings,
    /// Command-specific diagnostics such as acceptance counts.
    pub stats: serde_json::Value,
}

impl RunManifest {
    pub fn new<C: Serialize>(command: &str, config: &C, seed: u64) -> CliResult<Self> {
        let config = serde_json::to_value(config)?;
        let config_sha256 = sha256_hex(&serde_json::to_vec(&config)?);
        Ok(Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            config_sha256,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: Timings { total_secs: 0.0, per_chain_secs: Vec::new() },
            stats: serde_json::Value::Null,
        })
    }

    pub fn add_inputs<'a>(&mut self, paths: impl IntoIterator<Item = &'a Path>) -> CliResult<()> {
        for p in paths {
            self.inputs.push(FileDigest::of(p)?);
        }
        Ok(())
    }

    pub fn add_outputs<'a>(&mut self, paths: impl IntoIterator<Item = &'a Path>) -> CliResult<()> {
        for p in paths {
            self.outputs.push(FileDigest::of(p)?);
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
