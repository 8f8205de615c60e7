//! JSON and CSV rendering with a run manifest.

use clap::ValueEnum;
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub struct Emitter {
    format: Format,
    timestamp: bool,
    started: Instant,
}

impl Emitter {
    pub fn new(format: Format, timestamp: bool) -> Self {
        Emitter {
            format,
            timestamp,
            started: Instant::now(),
        }
    }

    fn manifest(&self, subcommand: &str, params: Value, seed: Option<u64>) -> Value {
        let mut m = json!({
            "subcommand": subcommand,
            "params": params,
            "seed": seed,
            "tool": "bead-lab",
            "version": env!("CARGO_PKG_VERSION"),
        });
        if self.timestamp {
            let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
            m["timestamp_unix"] = json!(now);
            m["elapsed_ms"] = json!(self.started.elapsed().as_secs_f64() * 1e3);
        }
        m
    }

    /// One result object, with the manifest attached.
    pub fn record(&self, subcommand: &str, params: Value, record: Value, seed: Option<u64>) {
        let manifest = self.manifest(subcommand, params, seed);
        match self.format {
            Format::Json => {
                let mut obj = match record {
                    Value::Object(m) => m,
                    other => {
                        let mut m = Map::new();
                        m.insert("value".into(), other);
                        m
                    }
                };
                obj.insert("manifest".into(), manifest);
                emit_line(&Value::Object(obj).to_string());
            }
            Format::Csv => {
                let flat = flatten(&record);
                emit_csv(&[flat]);
            }
        }
    }

    /// A table of rows plus top-level fields; CSV prints only the rows.
    pub fn table(&self, subcommand: &str, params: Value, extra: Value, rows: &[Value], seed: Option<u64>) {
        match self.format {
            Format::Json => {
                let mut obj = match extra {
                    Value::Object(m) => m,
                    _ => Map::new(),
                };
                obj.insert("rows".into(), Value::Array(rows.to_vec()));
                obj.insert("manifest".into(), self.manifest(subcommand, params, seed));
                emit_line(&Value::Object(obj).to_string());
            }
            Format::Csv => {
                let flat: Vec<Vec<(String, String)>> = rows.iter().map(flatten).collect();
                emit_csv(&flat);
            }
        }
    }

    /// Streamed event rows: one JSON object per line, or CSV with a header.
    pub fn event_rows(&self, rows: &[Value]) {
        match self.format {
            Format::Json => {
                let stdout = std::io::stdout();
                let mut lock = std::io::BufWriter::new(stdout.lock());
                for r in rows {
                    let _ = writeln!(lock, "{r}");
                }
            }
            Format::Csv => {
                let flat: Vec<Vec<(String, String)>> = rows.iter().map(flatten).collect();
                emit_csv(&flat);
            }
        }
    }
}

fn emit_line(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
}

/// Nested objects become dotted columns; arrays are joined with spaces.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) => {
                let joined = a.iter().map(scalar).collect::<Vec<_>>().join(" ");
                out.push((prefix.to_string(), joined));
            }
            other => out.push((prefix.to_string(), scalar(other))),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn emit_csv(rows: &[Vec<(String, String)>]) {
    let Some(first) = rows.first() else {
        return;
    };
    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
    let header: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|(_, v)| quote(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
