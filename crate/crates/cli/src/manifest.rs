use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IoContext, Result};
use crate::store::{list_files, sha256_hex, write_file};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Content hashes of every artifact of a run, sorted by path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    /// Hashes everything below `out` except the manifest itself.
    pub fn scan(out: &Path) -> Result<Self> {
        let mut files = Vec::new();
        for rel in list_files(out)? {
            let path = rel.to_string_lossy().replace('\\', "/");
            if path == MANIFEST_FILE {
                continue;
            }
            let full = out.join(&rel);
            let bytes = std::fs::read(&full).at(&full)?;
            files.push(ManifestEntry { path, sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 });
        }
        Ok(Self { files })
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("plain data serialises") + "\n";
        write_file(&out.join(MANIFEST_FILE), text.as_bytes())
    }

    pub fn get(&self, path: &str) -> Option<&ManifestEntry> {
        self.files.iter().find(|e| e.path == path)
    }
}
