//! Per-stage manifests: what went in, what came out, and with which
//! parameters.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the output directory for pipeline artifacts, as given
    /// in the config for external files.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub seed: u64,
    /// False only for stages whose output depends on thread scheduling.
    pub deterministic: bool,
    pub parameters: BTreeMap<String, String>,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub wall_time_secs: f64,
    /// SHA-256 of everything above except the wall time.
    pub hash: String,
}

impl Manifest {
    pub fn content_hash(&self) -> String {
        let mut stripped = self.clone();
        stripped.wall_time_secs = 0.0;
        stripped.hash = String::new();
        hex(&Sha256::digest(toml::to_string(&stripped).expect("manifest serializes").as_bytes()))
    }

    pub fn seal(mut self) -> Self {
        self.hash = self.content_hash();
        self
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = toml::to_string(self).expect("manifest serializes");
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path)?;
        toml::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), 0, e.message()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> Result<String> {
    let mut f = std::fs::File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = f.read(&mut buf)?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex(&h.finalize()))
}
