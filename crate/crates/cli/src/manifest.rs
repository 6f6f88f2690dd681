//! `<out>.manifest.json` sidecars. Outputs themselves never carry timestamps;
//! the run time lives here only.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct InputHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Manifest {
    command: Vec<String>,
    seed: Option<u64>,
    version: &'static str,
    timestamp: String,
    threads: usize,
    inputs: Vec<InputHash>,
    outputs: Vec<String>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Writes the manifest for a run that produced `outputs` (first one names it).
pub fn write(outputs: &[PathBuf], inputs: &[&Path], seed: Option<u64>) -> Result<()> {
    let manifest = Manifest {
        command: std::env::args().collect(),
        seed,
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339(),
        threads: rayon::current_num_threads(),
        inputs: inputs
            .iter()
            .map(|p| {
                Ok(InputHash {
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_>>()?,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let path = sidecar_path(&outputs[0]);
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
