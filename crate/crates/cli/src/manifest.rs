//! Run manifests: every file-writing command records its resolved
//! configuration, master seed, and output digests beside its outputs, and
//! any manifest can be re-executed to reproduce the run.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// FNV-1a 64-bit digest, hex encoded. Stable, dependency-free, and enough
/// to detect any byte drift between runs.
pub fn fnv1a64_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub master_seed: Option<u64>,
    pub artifact_version: String,
    /// file name -> fnv1a-64 digest of its bytes
    pub outputs: BTreeMap<String, String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Collects output files for one run and finalizes the manifest.
pub struct OutputWriter {
    out_dir: PathBuf,
    outputs: BTreeMap<String, String>,
}

impl OutputWriter {
    pub fn new(out_dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(out_dir)?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            outputs: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<()> {
        let path = self.out_dir.join(name);
        let mut f = fs::File::create(&path)?;
        f.write_all(contents.as_bytes())?;
        self.outputs
            .insert(name.to_string(), fnv1a64_hex(contents.as_bytes()));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.write(name, &body)
    }

    /// Write the manifest and return it.
    pub fn finish<T: Serialize>(
        self,
        command: &str,
        config: &T,
        master_seed: Option<u64>,
    ) -> std::io::Result<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            master_seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.outputs,
        };
        let mut body = serde_json::to_string_pretty(&manifest)?;
        body.push('\n');
        fs::write(self.out_dir.join(MANIFEST_NAME), body)?;
        Ok(manifest)
    }
}

pub fn load_manifest(path: &Path) -> std::io::Result<RunManifest> {
    let body = fs::read_to_string(path)?;
    serde_json::from_str(&body).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_known_vectors() {
        // standard FNV-1a test vectors
        assert_eq!(fnv1a64_hex(b""), "cbf29ce484222325");
        assert_eq!(fnv1a64_hex(b"a"), "af63dc4c8601ec8c");
        assert_eq!(fnv1a64_hex(b"foobar"), "85944171f73967e8");
    }
}
