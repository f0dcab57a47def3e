//! Report types and CSV tables.

use crate::config::ExperimentConfig;
use crate::{CliError, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_TAG: &str = "inman.report/v1";

/// Fields that differ between otherwise identical runs.
pub const TIMESTAMP_FIELDS: [&str; 2] = ["generated_unix", "runtime_s"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    /// distance to the threshold, positive on the passing side
    pub slack: f64,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let slack = threshold - measured;
        Self { name: name.into(), passed: measured <= threshold, measured, threshold, slack }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let slack = measured - threshold;
        Self { name: name.into(), passed: measured >= threshold, measured, threshold, slack }
    }

    /// `|measured - target| ≤ tol`, reported against `tol`.
    pub fn within(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        let dev = (measured - target).abs();
        Self { name: name.into(), passed: dev <= tol, measured, threshold: tol, slack: tol - dev }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub kind: String,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// the module report, serialised as is
    pub result: Value,
    /// data files written for this experiment
    pub files: Vec<String>,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub generated_unix: u64,
    pub passed: bool,
    pub runtime_s: f64,
    pub experiments: Vec<ExperimentOutcome>,
}

impl ExperimentReport {
    pub fn new(experiments: Vec<ExperimentOutcome>, generated_unix: u64, runtime_s: f64) -> Self {
        let passed = experiments.iter().all(|e| e.passed);
        Self { schema: SCHEMA_TAG.to_string(), generated_unix, passed, runtime_s, experiments }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// The report with every timestamp field zeroed, for byte comparison.
    pub fn without_timestamps(json: &str) -> Result<Value> {
        let mut v: Value = serde_json::from_str(json).map_err(|e| CliError::Output(e.to_string()))?;
        fn strip(v: &mut Value) {
            match v {
                Value::Object(m) => {
                    for (k, x) in m.iter_mut() {
                        if TIMESTAMP_FIELDS.contains(&k.as_str()) {
                            *x = Value::from(0);
                        } else {
                            strip(x);
                        }
                    }
                }
                Value::Array(a) => a.iter_mut().for_each(strip),
                _ => {}
            }
        }
        strip(&mut v);
        Ok(v)
    }
}

/// Rectangular data for plotting; floats use the shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        let row: Vec<String> = row.into_iter().collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_sign_follows_pass() {
        let a = Check::at_most("a", 0.5, 1.0);
        assert!(a.passed && a.slack > 0.0);
        let b = Check::at_least("b", 0.5, 1.0);
        assert!(!b.passed && b.slack < 0.0);
        let c = Check::within("c", 1.1, 1.0, 0.15);
        assert!(c.passed && (c.slack - 0.05).abs() < 1e-12);
    }

    #[test]
    fn nan_measurement_fails() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(!Check::at_least("x", f64::NAN, 1.0).passed);
    }

    #[test]
    fn empty_report_passes() {
        let r = ExperimentReport::new(vec![], 0, 0.0);
        assert!(r.passed);
        assert_eq!(r.schema, SCHEMA_TAG);
    }

    #[test]
    fn csv_escapes() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(["1".to_string(), "x,y".to_string()]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
