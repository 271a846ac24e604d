//! Report envelope and its JSON, CSV and text renderings.

use std::io::Write;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub exact_n_cap: u64,
    pub modular_n_cap: u64,
    pub scan_ceiling: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub prime: Option<u64>,
    pub precision: u32,
    pub caps: Caps,
    pub seed: u64,
    pub output: OutputFormat,
    pub checkpoint_path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub command: String,
    pub config: RunConfig,
    pub rows: Vec<Value>,
    pub pass_count: u64,
    pub fail_count: u64,
    pub skip_count: u64,
    /// Set when a cap stopped the run; `rows` then holds the partial output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Envelope {
    pub fn write(&self, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Text => self.write_text(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let flat: Vec<Vec<(String, String)>> = self.rows.iter().map(flatten).collect();
        let mut header: Vec<String> = Vec::new();
        for row in &flat {
            for (k, _) in row {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&header)?;
        for row in &flat {
            let record: Vec<&str> = header.iter().map(|h| row.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str())).collect();
            w.write_record(&record)?;
        }
        w.flush()
    }

    fn write_text(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for row in &self.rows {
            let line: Vec<String> = flatten(row).into_iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        write!(out, "{}: {} pass, {} fail, {} skipped", self.command, self.pass_count, self.fail_count, self.skip_count)?;
        if let Some(e) = &self.error {
            write!(out, " (stopped: {e})")?;
        }
        writeln!(out)
    }
}

/// Dotted keys for nested objects; arrays stay as compact JSON.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => walk_map(prefix, map, out),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    fn walk_map(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
        for (k, v) in map {
            let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            walk(&key, v, out);
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens_nested_rows() {
        let row = json!({"check_id": "a", "params": {"p": 2}, "expected": {"kind": "valuation", "value": -3}, "list": [1, 2]});
        let flat = flatten(&row);
        assert!(flat.contains(&("params.p".into(), "2".into())));
        assert!(flat.contains(&("expected.kind".into(), "valuation".into())));
        assert!(flat.contains(&("list".into(), "[1,2]".into())));
    }
}
