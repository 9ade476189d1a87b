//! The `report-v1` document and its CSV view.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const REPORT_SCHEMA: &str = "report-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Failing non-blocking checks do not affect the exit status.
    pub blocking: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// `value <= threshold`, blocking.
    pub fn bound(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), passed: value <= threshold, blocking: true, value: Some(value), threshold: Some(threshold), detail: None }
    }

    pub fn flag(name: &str, passed: bool, detail: impl Into<Option<String>>) -> Self {
        Check { name: name.into(), passed, blocking: true, value: None, threshold: None, detail: detail.into() }
    }

    pub fn advisory(mut self) -> Self {
        self.blocking = false;
        self
    }
}

/// A numeric table; `columns[k]` names `rows[*][k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub tool: Tool,
    pub command: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub config_sha256: String,
    pub input: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub results: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
}

impl Report {
    pub fn new(command: &str, seed: u64, tol: Option<f64>, input: Value) -> Self {
        let canonical = serde_json::to_string(&input).expect("JSON value serialises");
        Report {
            schema: REPORT_SCHEMA.into(),
            tool: Tool { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() },
            command: command.into(),
            seed,
            tol,
            config_sha256: hex(&Sha256::digest(canonical.as_bytes())),
            input,
            checks: Vec::new(),
            passed: true,
            results: BTreeMap::new(),
            series: None,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
        self.passed = self.checks.iter().all(|c| c.passed || !c.blocking);
    }

    pub fn put<T: Serialize>(&mut self, key: &str, v: &T) {
        self.results.insert(key.into(), serde_json::to_value(v).expect("results serialise"));
    }

    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.blocking && !c.passed).collect()
    }

    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let r: Report = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("not a report-v1 document: {e}")))?;
        if r.schema != REPORT_SCHEMA {
            return Err(CliError::Usage(format!("unsupported schema {:?}", r.schema)));
        }
        Ok(r)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::new("report", 0, None, Value::Null);
        let text = r.emit();
        let back = Report::parse(&text).unwrap();
        assert_eq!(back, r);
        assert!(back.checks.is_empty() && back.passed);
    }

    #[test]
    fn advisory_checks_do_not_fail() {
        let mut r = Report::new("x", 1, Some(1e-3), Value::Null);
        r.check(Check::bound("a", 1.0, 2.0));
        r.check(Check::bound("b", 3.0, 2.0).advisory());
        assert!(r.passed);
        r.check(Check::flag("c", false, None));
        assert!(!r.passed);
        assert_eq!(r.failing().len(), 1);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = Series { columns: vec!["t".into(), "x".into()], rows: vec![vec![0.5, 1.0], vec![0.75, -2.0]] };
        assert_eq!(s.to_csv(), "t,x\n5e-1,1e0\n7.5e-1,-2e0\n");
    }
}
