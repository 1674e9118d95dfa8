use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};
use crate::formats::json_pretty;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Output files of a run, held in memory until the run succeeds or fails
/// cleanly.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn write_to(&self, dir: &Path) -> LabResult<Vec<FileEntry>> {
        fs::create_dir_all(dir).map_err(LabError::io(dir))?;
        self.files
            .iter()
            .map(|(name, bytes)| {
                let path = dir.join(name);
                fs::write(&path, bytes).map_err(LabError::io(&path))?;
                Ok(FileEntry { name: name.clone(), bytes: bytes.len(), sha256: sha256_hex(bytes) })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    #[serde(rename = "kds-lab")]
    pub lab: &'static str,
    #[serde(rename = "kds-core")]
    pub core: &'static str,
}

impl Default for Versions {
    fn default() -> Self {
        Self { lab: env!("CARGO_PKG_VERSION"), core: kds_core::VERSION }
    }
}

/// Provenance of one run. Everything but the timestamps is a function of
/// the configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub run: String,
    pub config_sha256: String,
    pub schema_version: u32,
    pub seed: u64,
    pub threads: usize,
    pub versions: Versions,
    pub status: String,
    pub started_unix_s: f64,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> LabResult<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        fs::create_dir_all(dir).map_err(LabError::io(dir))?;
        fs::write(&path, json_pretty(self)).map_err(LabError::io(&path))?;
        Ok(path)
    }
}

pub fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH).unwrap_or(Duration::ZERO).as_secs_f64()
}
