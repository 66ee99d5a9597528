//! Scalar summary blocks and CSV artifacts.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliResult;

/// Fixed 17-significant-digit form used for every float we print.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Default)]
pub struct Summary {
    entries: Vec<(String, Value)>,
}

impl Summary {
    pub fn new(command: &str) -> Self {
        let mut s = Self::default();
        s.text("command", command);
        s
    }

    pub fn num(&mut self, key: &str, x: f64) -> &mut Self {
        let v = serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number);
        self.entries.push((key.into(), v));
        self
    }

    pub fn int(&mut self, key: &str, x: u64) -> &mut Self {
        self.entries.push((key.into(), Value::from(x)));
        self
    }

    pub fn text(&mut self, key: &str, x: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), Value::String(x.into())));
        self
    }

    pub fn boolean(&mut self, key: &str, x: bool) -> &mut Self {
        self.entries.push((key.into(), Value::Bool(x)));
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let map: Map<String, Value> = self.entries.iter().cloned().collect();
            return serde_json::to_string_pretty(&Value::Object(map)).expect("serializable") + "\n";
        }
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let shown = match v {
                Value::Number(n) if n.is_f64() => float(n.as_f64().expect("f64")),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{k:<width$}  {shown}");
        }
        out
    }
}

/// A CSV table preceded by `#` comment lines describing the formula and
/// echoing every parameter.
#[derive(Debug)]
pub struct Csv {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(formula: &str, params: &[(&str, String)], columns: &[&str]) -> Self {
        let echo = params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        Self {
            comments: vec![formula.to_string(), format!("params: {echo}")],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn write_to(&self, path: Option<&Path>) -> CliResult<()> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}
