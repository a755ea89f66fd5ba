//! Reproducibility manifests for command-line artifacts.
//!
//! Every file the CLI produces gets a `<file>.manifest.json` sidecar
//! recording the command, its arguments, the seed, and SHA-256 digests of
//! all inputs and outputs. Manifests contain no timestamps, so re-running
//! the same command on the same inputs yields byte-identical sidecars —
//! diffing two manifests verifies a reproduction end to end.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{RelexError, Result};

/// A file path together with the SHA-256 of its contents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record for one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// SHA-256 of a file's contents as lowercase hex.
pub fn file_sha256(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf).map_err(|e| RelexError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    Ok(hex)
}

/// Sidecar path for an artifact: `<artifact>.manifest.json`.
pub fn manifest_path(artifact: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", artifact.display()))
}

impl Manifest {
    pub fn new(command: &str, args: &[String], seed: Option<u64>) -> Self {
        Manifest {
            tool: "relex".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args: args.to_vec(),
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Hashes `path` and records it as an input.
    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: file_sha256(path)?,
        });
        Ok(())
    }

    /// Hashes `path` and records it as an output; call after writing it.
    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: file_sha256(path)?,
        });
        Ok(())
    }

    /// Writes the sidecar next to `artifact` and returns the sidecar path.
    pub fn save_for(&self, artifact: &Path) -> Result<PathBuf> {
        let path = manifest_path(artifact);
        let json = serde_json::to_string_pretty(self).map_err(|e| {
            RelexError::InvalidArgument(format!("manifest serialization failed: {e}"))
        })?;
        std::fs::write(&path, json + "\n").map_err(|e| RelexError::io(&path, e))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|e| RelexError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| RelexError::parse(path, e.line(), e.to_string()))
    }
}
