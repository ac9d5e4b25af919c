use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Input that could not be read or decoded; mapped to exit code 2.
#[derive(Debug)]
pub struct ParseFailure(pub String);

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseFailure {}

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Tolerances {
    pub rank_tol: f64,
    pub tol: f64,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub version: &'static str,
    pub wall_time_seconds: f64,
}

/// Collects inputs while a command runs and writes the outputs.
pub struct Session {
    pub out: PathBuf,
    pub seed: u64,
    pub rank_tol: f64,
    pub tol: f64,
    inputs: Vec<InputDigest>,
    started: Instant,
}

impl Session {
    pub fn new(out: PathBuf, seed: u64, rank_tol: f64, tol: f64) -> Self {
        Self {
            out,
            seed,
            rank_tol,
            tol,
            inputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn read_json<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        let bytes = fs::read(path).map_err(|e| ParseFailure(format!("cannot read {}: {e}", path.display())))?;
        let value = serde_json::from_slice(&bytes)
            .map_err(|e| ParseFailure(format!("invalid JSON in {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(value)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_manifest(mut self) -> Result<()> {
        let manifest = RunManifest {
            command: std::env::args().skip(1).collect(),
            inputs: std::mem::take(&mut self.inputs),
            seed: self.seed,
            tolerances: Tolerances {
                rank_tol: self.rank_tol,
                tol: self.tol,
            },
            version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        };
        self.write_json("manifest.json", &manifest)
    }
}
