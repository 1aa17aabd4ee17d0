//! CSV and JSON writers. Every output starts with the resolved configuration.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::CliError;
use crate::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Sink {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub command: &'static str,
    pub config: Value,
}

/// Shortest decimal that reads back to the same f64.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x}")
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

impl Sink {
    pub fn new(format: Format, path: Option<PathBuf>, command: &'static str, config: impl Serialize) -> Self {
        let config = serde_json::to_value(config).expect("configuration serializes");
        Sink { format, path, command, config }
    }

    pub fn metadata(&self) -> Value {
        json!({ "program": "freezing-dyson", "version": VERSION, "command": self.command, "config": self.config })
    }

    fn csv_header(&self) -> String {
        format!(
            "# freezing-dyson {VERSION}\n# command: {}\n# config: {}\n",
            self.command,
            serde_json::to_string(&self.config).expect("configuration serializes")
        )
    }

    /// Writes CSV `lines` (after the metadata header) or `data` as JSON.
    pub fn emit(&self, lines: &[String], data: Value) -> Result<(), CliError> {
        let text = match self.format {
            Format::Csv => {
                let mut s = self.csv_header();
                for l in lines {
                    s.push_str(l);
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let doc = json!({ "metadata": self.metadata(), "data": data });
                let mut s = serde_json::to_string_pretty(&doc).expect("output serializes");
                s.push('\n');
                s
            }
        };
        write_text(self.path.as_deref(), &text)
    }
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io = |source, p: &Path| CliError::Io { path: p.display().to_string(), source };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io(e, p)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| io(e, Path::new("<stdout>"))),
    }
}

/// Reads a root tuple from a one-row CSV file; `#` lines and blanks are skipped.
/// Unsorted input is sorted with a warning.
pub fn read_tuple(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let mut rows = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let row = rows
        .next()
        .ok_or_else(|| CliError::Usage(format!("{}: no data row", path.display())))?;
    if rows.next().is_some() {
        return Err(CliError::Usage(format!("{}: expected a single data row", path.display())));
    }
    let mut values = row
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{}: cannot parse {:?} as a number", path.display(), f.trim())))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if values.windows(2).any(|w| w[0] > w[1]) {
        eprintln!("warning: {}: entries were not ascending; sorted on read", path.display());
        values.sort_by(f64::total_cmp);
    }
    Ok(values)
}
