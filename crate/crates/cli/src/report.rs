use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use annulus_core::numeric::sig17;
use serde_json::Value;

use crate::args::Format;

/// What one command produced: a JSON document, a CSV rendering of the same
/// data, and a one-line summary for the terminal.
pub struct Report {
    pub json: Value,
    pub csv: String,
    pub summary: String,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report serialises");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
        }
    }
}

/// A CSV cell for a float, with 17 significant digits.
pub fn num(x: f64) -> String {
    sig17(x)
}

pub fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Two-column CSV of scalar fields.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in pairs {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

pub fn default_out(command: &str, format: Format) -> PathBuf {
    let dir = std::env::var_os("ANNULUS_OUT_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("{command}.{}", format.ext()))
}

pub fn write(path: &Path, body: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, body)
}
