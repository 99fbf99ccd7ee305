//! Atomic file output and the run manifest.

use crate::error::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(res?)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_sha256: Option<String>,
    pub seed: Option<u64>,
    pub stages: Vec<StageTime>,
    pub outputs: Vec<OutputFile>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config_sha256: Option<String>, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.into(),
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).into(),
            config_sha256,
            seed,
            stages: Vec::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn stage(&mut self, stage: impl Into<String>, seconds: f64) {
        self.stages.push(StageTime { stage: stage.into(), seconds });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }
}

/// Collects files in memory and writes them, then the manifest, in one go so
/// a failed run leaves nothing behind.
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Self {
        OutputSet { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn commit(self, mut manifest: RunManifest) -> Result<Vec<PathBuf>, CliError> {
        let mut paths = Vec::new();
        for (name, bytes) in &self.files {
            let p = self.dir.join(name);
            write_atomic(&p, bytes)?;
            manifest.outputs.push(OutputFile { file: name.clone(), sha256: sha256_hex(bytes) });
            paths.push(p);
        }
        let json = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Input(e.to_string()))?;
        let p = self.dir.join(format!("manifest_{}.json", manifest.command));
        write_atomic(&p, &json)?;
        paths.push(p);
        Ok(paths)
    }
}
