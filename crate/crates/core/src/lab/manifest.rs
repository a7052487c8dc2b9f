use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::SweepConfig;
use crate::error::Result;

/// Hex SHA-256 of arbitrary bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the canonical TOML form of a sweep config, output paths excluded.
pub fn config_hash(cfg: &SweepConfig) -> String {
    let mut c = cfg.clone();
    c.output = Default::default();
    sha256_hex(c.to_toml().as_bytes())
}

/// Provenance record written next to every CLI output.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    /// The library draws no random numbers; kept for completeness.
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub os: &'static str,
    pub arch: &'static str,
    pub started_unix: f64,
    pub elapsed_seconds: f64,
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config_text: &str) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash: sha256_hex(config_text.as_bytes()),
            seeds: Vec::new(),
            threads: rayon::current_num_threads(),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            elapsed_seconds: 0.0,
            timings: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, elapsed: f64) {
        self.elapsed_seconds = elapsed;
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
