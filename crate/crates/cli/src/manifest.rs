//! Provenance records written next to every output file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name; replaying them reproduces the output.
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    /// Output schema, `<command>.v<N>`.
    pub schema: String,
    pub version: String,
    /// SHA-256 of each fixture file, keyed by file name.
    pub fixtures: BTreeMap<String, String>,
    pub output_sha256: String,
    pub duration_secs: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hashes of the `*.json` files in `dir`; empty when the directory is absent.
pub fn fixture_hashes(dir: &Path) -> std::io::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let Ok(entries) = fs::read_dir(dir) else {
        return Ok(out);
    };
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            out.insert(name, sha256_hex(&fs::read(&path)?));
        }
    }
    Ok(out)
}

/// `results.csv` → `results.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> std::path::PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    name.into()
}
