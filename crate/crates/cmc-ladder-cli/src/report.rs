use std::fmt::Write as _;

use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    /// Dotted invariant identifier, e.g. `hierarchy.jacobi[n=3]`.
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a subcommand produces: its checks and an arbitrary data block.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckRow>,
    pub data: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report { command: command.to_string(), config, checks: Vec::new(), data: Map::new() }
    }

    pub fn check(&mut self, id: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckRow { id: id.into(), passed, detail: detail.into() });
    }

    pub fn put(&mut self, key: &str, v: Value) {
        self.data.insert(key.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckRow> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({"id": c.id, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
            "data": Value::Object(self.data.clone()),
        })
    }

    /// The failure list written to stderr on a nonzero exit.
    pub fn failure_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "failures": self.failures().iter().map(|c| json!({"id": c.id, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "cmc-ladder {}", self.command);
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "  {}  {:<width$}  {}", mark, c.id, c.detail, width = width);
        }
        let failed = self.failures().len();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_listed_by_id() {
        let mut r = Report::new("demo", json!({}));
        r.check("a.one", true, "");
        r.check("a.two", false, "broken");
        assert!(!r.passed());
        let f = r.failure_json();
        assert_eq!(f["failures"][0]["id"], "a.two");
        assert_eq!(r.to_json()["schema"], "1");
        assert!(r.to_table().contains("FAIL  a.two"));
    }
}
