//! Tabular results and their JSON and CSV encodings.
//!
//! JSON: `{"metadata", "axes", "layout", "columns", "summary"}` with complex
//! values as `{"re", "im"}`. CSV: one header row of `name[unit]` fields, then
//! one row per table entry; complex columns become `name_re`, `name_im`.

use std::fs;
use std::io::Write;
use std::path::Path;

use nmm_core::Complex64;
use serde_json::{json, Map, Value};

use crate::cli::Format;
use crate::Failure;

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    Int(Vec<u64>),
    Text(Vec<String>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Real(v) => v.len(),
            Values::Complex(v) => v.len(),
            Values::Int(v) => v.len(),
            Values::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Values,
}

impl Column {
    pub fn real(name: &str, unit: &str, values: Vec<f64>) -> Self {
        Self { name: name.into(), unit: unit.into(), values: Values::Real(values) }
    }

    pub fn complex(name: &str, unit: &str, values: Vec<Complex64>) -> Self {
        Self { name: name.into(), unit: unit.into(), values: Values::Complex(values) }
    }

    pub fn int(name: &str, values: Vec<u64>) -> Self {
        Self { name: name.into(), unit: "1".into(), values: Values::Int(values) }
    }

    pub fn text(name: &str, values: Vec<String>) -> Self {
        Self { name: name.into(), unit: "-".into(), values: Values::Text(values) }
    }
}

/// One command's result.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub rng_seed: Option<u64>,
    /// Explicit axis vectors of a grid, if the table is one.
    pub axes: Vec<(String, Vec<f64>)>,
    pub layout: Option<String>,
    pub columns: Vec<Column>,
    pub summary: Map<String, Value>,
}

pub const ROW_MAJOR: &str = "row-major over the grid, x fastest";

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    pub fn param(&mut self, key: &str, value: Value) -> &mut Self {
        self.parameters.insert(key.into(), value);
        self
    }

    pub fn summarize(&mut self, key: &str, value: Value) -> &mut Self {
        self.summary.insert(key.into(), value);
        self
    }

    pub fn metadata(&self) -> Value {
        json!({
            "program": "nmm",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "parameters": Value::Object(self.parameters.clone()),
            "rng_algorithm": nmm_core::sampler::RNG_ALGORITHM,
            "seed": self.rng_seed,
        })
    }

    pub fn to_json(&self) -> Value {
        let axes: Map<String, Value> = self
            .axes
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| {
                let values = match &c.values {
                    Values::Real(v) => json!(v),
                    Values::Complex(v) => Value::Array(v.iter().map(|&z| complex_json(z)).collect()),
                    Values::Int(v) => json!(v),
                    Values::Text(v) => json!(v),
                };
                json!({ "name": c.name, "unit": c.unit, "values": values })
            })
            .collect();
        let mut root = Map::new();
        root.insert("metadata".into(), self.metadata());
        if !self.axes.is_empty() {
            root.insert("axes".into(), Value::Object(axes));
        }
        if let Some(layout) = &self.layout {
            root.insert("layout".into(), json!(layout));
        }
        root.insert("columns".into(), Value::Array(columns));
        root.insert("summary".into(), Value::Object(self.summary.clone()));
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv_string(&self) -> Result<String, Failure> {
        let rows = self.columns.first().map_or(0, |c| c.values.len());
        if self.columns.iter().any(|c| c.values.len() != rows) {
            return Err(Failure::internal("columns of unequal length"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::new();
        for c in &self.columns {
            match c.values {
                Values::Complex(_) => {
                    header.push(format!("{}_re[{}]", c.name, c.unit));
                    header.push(format!("{}_im[{}]", c.name, c.unit));
                }
                _ => header.push(format!("{}[{}]", c.name, c.unit)),
            }
        }
        w.write_record(&header).map_err(Failure::io)?;
        for r in 0..rows {
            let mut rec = Vec::with_capacity(header.len());
            for c in &self.columns {
                match &c.values {
                    Values::Real(v) => rec.push(fmt_f64(v[r])),
                    Values::Complex(v) => {
                        rec.push(fmt_f64(v[r].re));
                        rec.push(fmt_f64(v[r].im));
                    }
                    Values::Int(v) => rec.push(v[r].to_string()),
                    Values::Text(v) => rec.push(v[r].clone()),
                }
            }
            w.write_record(&rec).map_err(Failure::io)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Json => Ok(self.to_json_string()),
            Format::Csv => self.to_csv_string(),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_output(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(Failure::io),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(Failure::io)?;
            lock.flush().map_err(Failure::io)
        }
    }
}
