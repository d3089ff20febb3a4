//! CSV and manifest writing.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::with_status(name, measured, tolerance, measured <= tolerance)
    }

    /// Passes when `measured > threshold`.
    pub fn above(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::with_status(name, measured, threshold, measured > threshold)
    }

    pub fn with_status(name: impl Into<String>, measured: f64, tolerance: f64, ok: bool) -> Self {
        // JSON has no NaN or infinity
        let measured = if measured.is_finite() { measured } else { f64::MAX };
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest { command: command.into(), parameters: BTreeMap::new(), outputs: Vec::new(), checks: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.parameters.insert(key.into(), value.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Fixed 17-significant-digit scientific form.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(values: &[f64]) -> String {
    let mut line = values.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// `data.csv` → `data.json`.
pub fn manifest_path_for(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}
