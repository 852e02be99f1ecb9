//! CSV tables at 17 significant digits and versioned JSON summaries.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// A float with 17 significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of zero out of the files
        "0.0000000000000000e0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Column-oriented CSV table.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = self.header.join(",");
        text.push('\n');
        for row in &self.rows {
            let _ = writeln!(text, "{}", row.join(","));
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// One checked quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < limit`.
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.to_string(), value, limit, passed: value < limit }
    }

    /// A yes/no property reported as 1 or 0 against limit 1.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self { name: name.to_string(), value: if ok { 1.0 } else { 0.0 }, limit: 1.0, passed: ok }
    }
}

/// Machine-readable verdict of one subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    /// `None` unless `--assert` was given.
    pub passed: Option<bool>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
}

impl Summary {
    pub fn new(command: &str) -> Self {
        Self { schema_version: SCHEMA_VERSION, command: command.to_string(), passed: None, checks: Vec::new(), files: Vec::new() }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn file(&mut self, path: &Path) -> PathBuf {
        self.files.push(path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
        path.to_path_buf()
    }
}

/// Error report emitted in place of a summary.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub schema_version: u32,
    pub command: String,
    pub error: String,
}
