//! Output files: atomic writes and config-hash stamping.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Writes `bytes` to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// A JSON document with the config hash merged in at the top level.
#[derive(Serialize)]
pub struct Stamped<'a, T: Serialize> {
    #[serde(flatten)]
    pub body: &'a T,
    pub config_hash: &'a str,
}

pub fn write_json<T: Serialize>(path: &Path, body: &T, config_hash: &str) -> Result<(), CliError> {
    let doc = Stamped { body, config_hash };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("outputs serialize");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Sidecar recording the command and configuration next to a CSV output.
#[derive(Serialize)]
pub struct Meta<'a, C: Serialize> {
    pub command: &'a str,
    pub config: &'a C,
    pub config_hash: &'a str,
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

pub fn write_meta<C: Serialize>(path: &Path, command: &str, config: &C, config_hash: &str) -> Result<(), CliError> {
    let meta = Meta {
        command,
        config,
        config_hash,
    };
    let mut bytes = serde_json::to_vec_pretty(&meta).expect("configs serialize");
    bytes.push(b'\n');
    write_atomic(&meta_path(path), &bytes)
}
