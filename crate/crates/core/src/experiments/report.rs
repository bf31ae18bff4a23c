use serde::Serialize;

/// One pass/fail verdict with the measured value and its target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, target: impl Into<String>, passed: bool) -> Self {
        Check { name: name.to_string(), value, target: target.into(), passed }
    }

    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check::new(name, value, format!("<= {limit}"), value <= limit)
    }

    /// `|value / expected - 1| <= rel`
    pub fn relative(name: &str, value: f64, expected: f64, rel: f64) -> Self {
        let ok = ((value / expected) - 1.0).abs() <= rel;
        Check::new(name, value, format!("{expected} +/- {}%", rel * 100.0), ok)
    }
}

/// Tabular experiment output plus scalar results and verdicts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutput {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    pub fn new(columns: &[&str]) -> Self {
        ExperimentOutput { columns: columns.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}
