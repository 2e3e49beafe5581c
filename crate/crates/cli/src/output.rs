use std::fs;

use exchange_lab::economy::Economy;
use exchange_lab::io;
use serde_json::{json, Value};

use crate::{Cli, Format};

/// A command's output. Identical inputs give identical bytes: no timestamps,
/// and JSON objects serialize with sorted keys.
pub struct Report {
    command: Vec<String>,
    fingerprint: Option<String>,
    results: Value,
}

impl Report {
    pub fn new(command: Vec<String>, economy: Option<&Economy>, results: Value) -> Self {
        Report {
            command,
            fingerprint: economy.map(io::fingerprint),
            results,
        }
    }

    pub fn with_command(mut self, command: Vec<String>) -> Self {
        self.command = command;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tool": "exchange-lab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "economy_fingerprint": self.fingerprint,
            "results": self.results,
        })
    }
}

/// Flat rows for CSV output.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(r.iter().map(|c| json!(c)))
                        .collect(),
                )
            })
            .collect();
        json!({"columns": self.columns, "rows": rows})
    }

    /// `path,value` rows for every leaf of a JSON document.
    pub fn flatten(v: &Value) -> Table {
        let mut rows = Vec::new();
        flatten_into(v, String::new(), &mut rows);
        Table {
            columns: vec!["path".into(), "value".into()],
            rows,
        }
    }

    fn to_csv(&self) -> Result<String, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        let bytes = w.into_inner().map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }
}

fn flatten_into(v: &Value, path: String, rows: &mut Vec<Vec<String>>) {
    let join = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                flatten_into(x, join(k), rows);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (k, x) in items.iter().enumerate() {
                flatten_into(x, join(&k.to_string()), rows);
            }
        }
        Value::String(s) => rows.push(vec![path, s.clone()]),
        other => rows.push(vec![path, other.to_string()]),
    }
}

/// Writes the report to `--out` or stdout in the selected format. A command
/// with native rows passes them as `table`; other reports are flattened.
pub fn emit(cli: &Cli, report: &Report, table: Option<&Table>) -> Result<(), String> {
    let text = match cli.format {
        Format::Json => io::to_pretty(&report.to_json()),
        Format::Csv => match table {
            Some(t) => t.to_csv()?,
            None => Table::flatten(&report.to_json()).to_csv()?,
        },
    };
    match &cli.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
