//! Job results and their table or JSON rendering.

use qforms_core::cohomology::BettiTable;
use serde_json::{json, Map, Value};

use crate::schema::Format;

#[derive(Debug)]
pub struct Report {
    kind: &'static str,
    fields: Map<String, Value>,
    lines: Vec<String>,
    /// Set when a checked invariant fails; rendered and mapped to exit code 2.
    pub failure: Option<(String, String)>,
}

impl Report {
    pub fn new(kind: &'static str) -> Self {
        Report {
            kind,
            fields: Map::new(),
            lines: Vec::new(),
            failure: None,
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn field(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    /// Records a named check as a line and a boolean field.
    pub fn check(&mut self, key: &str, label: &str, passed: bool, detail: Option<String>) {
        let status = if passed { "PASS" } else { "FAIL" };
        match &detail {
            Some(d) => self.line(format!("{label}: {status} ({d})")),
            None => self.line(format!("{label}: {status}")),
        }
        self.field(key, json!(passed));
        if !passed && self.failure.is_none() {
            self.failure = Some((label.to_string(), detail.unwrap_or_default()));
        }
    }

    pub fn betti(&mut self, key: &str, label: &str, table: &BettiTable) {
        self.line(format!("{label}:"));
        for l in table.to_string().lines() {
            self.line(format!("  {l}"));
        }
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|r| json!({"degree": r.degree, "dim": r.dim, "rank": r.rank, "kernel": r.kernel, "h": r.h}))
            .collect();
        self.field(key, Value::Array(rows));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => {
                let mut out = format!("{}\n", self.kind);
                for l in &self.lines {
                    out.push_str(l);
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut obj = self.fields.clone();
                obj.insert("kind".into(), json!(self.kind));
                obj.insert("passed".into(), json!(self.failure.is_none()));
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}
