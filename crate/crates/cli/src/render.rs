use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::CliError;

/// One command's output in all three formats.
#[derive(Debug, Default)]
pub struct Report {
    pub params: Map<String, Value>,
    pub json: Map<String, Value>,
    pub table: Vec<String>,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(params: Map<String, Value>) -> Self {
        Report {
            params,
            ..Report::default()
        }
    }

    pub fn field(&mut self, key: &str, value: impl serde::Serialize) {
        self.json
            .insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn line(&mut self, key: &str, value: impl Display) {
        self.table.push(format!("{key:<24} {value}"));
    }

    pub fn csv<S: ToString>(&mut self, header: &[S]) {
        self.csv_header = header.iter().map(ToString::to_string).collect();
    }

    pub fn row<S: ToString>(&mut self, cells: &[S]) {
        self.csv_rows.push(cells.iter().map(ToString::to_string).collect());
    }

    fn params_line(&self) -> String {
        let parts: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", plain(v)))
            .collect();
        format!("params: {}", parts.join(" "))
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut body = Map::new();
                body.insert("params".into(), Value::Object(self.params.clone()));
                body.extend(self.json.clone());
                let mut s = serde_json::to_string_pretty(&Value::Object(body)).unwrap_or_default();
                s.push('\n');
                s
            }
            Format::Table => {
                let mut s = self.params_line();
                s.push('\n');
                for l in &self.table {
                    s.push_str(l);
                    s.push('\n');
                }
                s
            }
            Format::Csv => {
                let mut s = self.csv_header.join(",");
                s.push('\n');
                for r in &self.csv_rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }

    /// Write to `out` or stdout. With CSV the parameter echo goes to stderr
    /// so the data stays machine-readable.
    pub fn emit(
        &self,
        format: Format,
        out: Option<&Path>,
        stdout: &mut dyn Write,
        stderr: &mut dyn Write,
    ) -> Result<(), CliError> {
        if format == Format::Csv {
            let _ = writeln!(stderr, "{}", self.params_line());
        }
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}
