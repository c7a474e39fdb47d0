//! CSV tables, assertions and the JSON run summary.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::config::{Experiment, RunConfig};
use crate::error::{HarnessError, Result};

pub const GIT_DESCRIBE: &str = env!("FRAGBEC_GIT_DESCRIBE");

/// A CSV file: `file` is the name inside the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Self { file: file.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(&self.file);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
        Ok(())
    }
}

/// Shortest round-trip rendering, so reruns produce identical bytes.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    /// Acceptance criterion this check belongs to, e.g. `C3`.
    pub criterion: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything one criterion produced.
#[derive(Debug, Clone, Default)]
pub struct Section {
    pub assertions: Vec<Assertion>,
    pub tables: Vec<Table>,
    pub slopes: BTreeMap<String, f64>,
    pub wall_seconds: BTreeMap<String, f64>,
}

impl Section {
    pub fn check(&mut self, criterion: &str, name: &str, passed: bool, detail: String) {
        self.assertions.push(Assertion { criterion: criterion.into(), name: name.into(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn extend(&mut self, other: Section) {
        self.assertions.extend(other.assertions);
        self.tables.extend(other.tables);
        self.slopes.extend(other.slopes);
        self.wall_seconds.extend(other.wall_seconds);
    }

    /// `criterion → passed`, in first-seen order.
    pub fn verdicts(&self) -> Vec<(String, bool)> {
        let mut out: Vec<(String, bool)> = Vec::new();
        for a in &self.assertions {
            match out.iter_mut().find(|(c, _)| *c == a.criterion) {
                Some(entry) => entry.1 &= a.passed,
                None => out.push((a.criterion.clone(), a.passed)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub config_hash: String,
    pub git_describe: String,
    pub seed: u64,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    /// `criterion: name` of every failed assertion.
    pub failures: Vec<String>,
    pub fitted_slopes: BTreeMap<String, f64>,
    pub wall_seconds: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

impl Summary {
    pub fn new(experiment: Experiment, config: &RunConfig, section: &Section) -> Self {
        Self {
            experiment: experiment.name().into(),
            config_hash: config.hash(),
            git_describe: GIT_DESCRIBE.into(),
            seed: config.seed,
            passed: section.passed(),
            assertions: section.assertions.clone(),
            failures: section
                .assertions
                .iter()
                .filter(|a| !a.passed)
                .map(|a| format!("{}: {}", a.criterion, a.name))
                .collect(),
            fitted_slopes: section.slopes.clone(),
            wall_seconds: section.wall_seconds.clone(),
            files: section.tables.iter().map(|t| t.file.clone()).collect(),
        }
    }
}

/// Writes every table, `config.toml` and `summary.json` into `dir`.
pub fn emit_report(dir: &Path, experiment: Experiment, config: &RunConfig, section: &Section) -> Result<Summary> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.display().to_string(), source })?;
    for table in &section.tables {
        table.write(dir)?;
    }
    let config_path = dir.join("config.toml");
    std::fs::write(&config_path, config.to_toml())
        .map_err(|source| HarnessError::Io { path: config_path.display().to_string(), source })?;
    let summary = Summary::new(experiment, config, section);
    let path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(&path, json + "\n").map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_aggregate_by_criterion() {
        let mut s = Section::default();
        s.check("C1", "a", true, String::new());
        s.check("C2", "b", true, String::new());
        s.check("C1", "c", false, String::new());
        assert_eq!(s.verdicts(), vec![("C1".to_string(), false), ("C2".to_string(), true)]);
        assert!(!s.passed());
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn writes_csv_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("x.csv", &["N", "value"]);
        t.push(vec!["4".into(), num(0.5)]);
        t.write(dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("x.csv")).unwrap(), "N,value\n4,5e-1\n");
    }
}
