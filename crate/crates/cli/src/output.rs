//! Deterministic artifact emission: CSV building and atomic file writes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// CSV with a fixed header; float cells use the shortest round-trip
/// representation so identical runs produce identical bytes.
pub struct Csv {
    columns: usize,
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { columns: header.len(), buf: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "row width must match the header");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_f32(v: f32) -> String {
    format!("{v}")
}

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)
        .map_err(|e| CliError::ExperimentFailed(format!("mkdir {}: {e}", dir.display())))?;
    let mut tmp = PathBuf::from(path);
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::ExperimentFailed(format!("bad path {}", path.display())))?;
    tmp.set_file_name(format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes)
        .map_err(|e| CliError::ExperimentFailed(format!("write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::ExperimentFailed(format!("rename to {}: {e}", path.display())))?;
    Ok(())
}
