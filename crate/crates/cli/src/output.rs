//! CSV emission, atomic file writes and metadata sidecars.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Full-precision scientific notation (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: format!("{}\n", header.join(",")), columns: header.len() }
    }

    /// Appends a row of pre-formatted cells.
    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn row_f64(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        self.row(&cells);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Current git revision of the working directory, or `"unknown"`.
pub fn git_revision() -> String {
    std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

/// Writes `data` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, data: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Run-level metadata shared by every sidecar of one invocation.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub subcommand: String,
    pub canonical_config: String,
    pub settings: Value,
    pub workers: usize,
    pub git_revision: String,
}

impl RunMeta {
    pub fn config_sha256(&self) -> String {
        sha256_hex(self.canonical_config.as_bytes())
    }
}

/// Sidecar path for an output file: `name.ext` -> `name.ext.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Writes `contents` atomically plus its metadata sidecar.
pub fn emit(path: &Path, contents: &str, meta: &RunMeta, wall_time_s: f64, extra: Value) -> std::io::Result<()> {
    write_atomic(path, contents.as_bytes())?;
    let sidecar = json!({
        "file": path.file_name().and_then(|n| n.to_str()),
        "file_sha256": sha256_hex(contents.as_bytes()),
        "subcommand": meta.subcommand,
        "config": meta.settings,
        "config_canonical": meta.canonical_config,
        "config_sha256": meta.config_sha256(),
        "git_revision": meta.git_revision,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "workers": meta.workers,
        "wall_time_s": wall_time_s,
        "details": extra,
    });
    let text = serde_json::to_string_pretty(&sidecar).expect("metadata serialises") + "\n";
    write_atomic(&sidecar_path(path), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let t = fmt_f64(v);
            assert_eq!(t.parse::<f64>().unwrap(), v);
            let mantissa = t.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn atomic_write_creates_directories_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/out.csv");
        write_atomic(&path, b"x\n").unwrap();
        write_atomic(&path, b"y\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "y\n");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn sidecar_naming() {
        assert_eq!(sidecar_path(Path::new("o/errors.csv")), PathBuf::from("o/errors.csv.meta.json"));
    }
}
