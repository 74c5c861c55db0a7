use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

/// Column-named numeric table; `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Reported quantities that are not pass/fail.
    #[serde(default)]
    pub metrics: Vec<(String, f64)>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Summary {
    pub fn new(experiment: &str) -> Self {
        Summary {
            experiment: experiment.into(),
            passed: true,
            checks: Vec::new(),
            metrics: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Record `value <= threshold`.
    pub fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        self.check(name, value, threshold, value <= threshold);
    }

    /// Record `value >= threshold`.
    pub fn at_least(&mut self, name: &str, value: f64, threshold: f64) {
        self.check(name, value, threshold, value >= threshold);
    }

    pub fn check(&mut self, name: &str, value: f64, threshold: f64, passed: bool) {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), value, threshold, passed });
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.into(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn metric_value(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Everything written for one run in JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub scenario: Scenario,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

fn fmt_cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => String::new(),
    }
}

pub fn to_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::config(format!("csv encoding: {e}"));
    w.write_record(&table.columns).map_err(fail)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| fmt_cell(*v))).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::config(format!("csv encoding: {e}")))
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("plain data always serializes");
    out.push(b'\n');
    out
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Write the table in `format` under `dir`, returning the paths written.
///
/// CSV goes to `<name>.csv` with the scenario and summary in `<name>.meta.json`;
/// JSON puts all three in `<name>.json`.
pub fn emit(dir: &Path, scenario: &Scenario, table: &Table, summary: &Summary, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = &scenario.name;
    match format {
        Format::Csv => {
            let data = dir.join(format!("{name}.csv"));
            let meta = dir.join(format!("{name}.meta.json"));
            write(&data, &to_csv(table)?)?;
            let doc = Document { scenario: scenario.clone(), summary: summary.clone(), table: None };
            write(&meta, &json_bytes(&doc))?;
            Ok(vec![data, meta])
        }
        Format::Json => {
            let data = dir.join(format!("{name}.json"));
            let doc = Document { scenario: scenario.clone(), summary: summary.clone(), table: Some(table.clone()) };
            write(&data, &json_bytes(&doc))?;
            Ok(vec![data])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_fixed_precision() {
        let mut t = Table::new(&["t", "n2"]);
        t.push(vec![Some(0.0), Some(0.1)]);
        t.push(vec![Some(1.5), None]);
        t.push(vec![Some(-2.0), Some(1.0 / 3.0)]);
        let text = String::from_utf8(to_csv(&t).unwrap()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,n2");
        assert_eq!(lines[1], "0.0000000000000000e0,1.0000000000000001e-1");
        assert_eq!(lines[2], "1.5000000000000000e0,");
        assert!(!text.contains('\r'));
        let third: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0);
    }

    #[test]
    fn summary_tracks_failures() {
        let mut s = Summary::new("x");
        s.at_most("a", 1.0, 2.0);
        assert!(s.passed);
        s.at_least("b", 1.0, 2.0);
        assert!(!s.passed);
        assert_eq!(s.checks.len(), 2);
    }
}
