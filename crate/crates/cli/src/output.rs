use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use cohdist_core::config::{ConfigHeader, OutputFormat};
use serde_json::{json, Value};

use crate::CliError;

/// A command result: the JSON document body plus its fixed CSV table.
pub struct Output {
    pub command: String,
    pub result: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    pub fn new(command: &str, result: Value) -> Self {
        Self {
            command: command.into(),
            result,
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn table(mut self, columns: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.columns = columns;
        self.rows = rows;
        self
    }

    pub fn render(&self, header: &ConfigHeader, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::Json => {
                let doc = json!({"config": header, "command": self.command, "result": self.result});
                let mut s = serde_json::to_string_pretty(&doc).map_err(CliError::internal)?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => {
                let mut out = header.csv_comment();
                out.push_str(&format!("# command={}\n", self.command));
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(CliError::internal)?;
                for row in &self.rows {
                    w.write_record(row).map_err(CliError::internal)?;
                }
                let bytes = w.into_inner().map_err(CliError::internal)?;
                out.push_str(&String::from_utf8(bytes).map_err(CliError::internal)?);
                Ok(out)
            }
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("stdout: {e}"))),
    }
}

/// Reads a JSON file, or standard input for `None` and `-`.
pub fn read_json(path: Option<&Path>) -> Result<Value, CliError> {
    let text = match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::input(format!("stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("malformed JSON: {e}")))
}

/// The payload of a document written by this tool, or the value itself.
pub fn unwrap_document(v: Value, key: &str) -> Value {
    let inner = match v.get("result") {
        Some(r) => r.clone(),
        None => v,
    };
    match inner.get(key) {
        Some(x) => x.clone(),
        None => inner,
    }
}

/// Shortest round-trip text, in exponent form for very small or large values.
pub fn f(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Vector entries joined by `;` so they fit one CSV field.
pub fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| f(x)).collect::<Vec<_>>().join(";")
}
