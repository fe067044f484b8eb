//! CSV tables carrying the config hash, floats at 17 significant digits.

use std::path::{Path, PathBuf};

use steklov_core::geometry::io::fmt_f64;

pub fn float(x: f64) -> String {
    fmt_f64(x)
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, hash: &str) -> String {
        let mut s = format!("# config-sha256: {hash}\n{}\n", self.header.join(","));
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Prepends the hash comment to an existing CSV body.
pub fn with_hash(hash: &str, body: &str) -> String {
    format!("# config-sha256: {hash}\n{body}")
}

pub fn write(dir: &Path, name: &str, content: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}
