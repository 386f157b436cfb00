//! Artifact staging and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use isogap_core::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Artifacts collected in memory and written by a single writer.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        self.add(name, text);
        Ok(())
    }

    pub fn listing(&self) -> Vec<ArtifactEntry> {
        self.files
            .iter()
            .map(|(name, bytes)| ArtifactEntry { name: name.clone(), bytes: bytes.len(), sha256: sha256_hex(bytes) })
            .collect()
    }

    /// Writes everything to a sibling staging directory, then renames it into
    /// place. An existing target is replaced only if it holds a manifest from
    /// an earlier run.
    pub fn commit(&self, target: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", target.display()));
        if target.exists() {
            let empty = target.is_dir() && fs::read_dir(target).map_err(io)?.next().is_none();
            if !empty && !target.join(MANIFEST).is_file() {
                return Err(Error::Io(format!(
                    "{} exists and is not an earlier output directory",
                    target.display()
                )));
            }
        }
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(io)?;
        let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
        let staging = parent.join(format!(".{name}.staging-{}", std::process::id()));
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(io)?;
        }
        let result = (|| {
            fs::create_dir(&staging)?;
            for (file, bytes) in &self.files {
                fs::write(staging.join(file), bytes)?;
            }
            if target.exists() {
                fs::remove_dir_all(target)?;
            }
            fs::rename(&staging, target)
        })();
        if result.is_err() {
            let _ = fs::remove_dir_all(&staging);
        }
        result.map_err(io)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub isogap: &'static str,
    pub isogap_core: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub versions: Versions,
    pub threads: usize,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<ArtifactEntry>,
}
