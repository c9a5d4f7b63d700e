use std::io::Write;

use serde::{Deserialize, Serialize};
use wdrcm_core::fmt17;
use wdrcm_metrics::DistanceRow;

use crate::{ExperimentKind, RunConfig};

/// One tidy output row. Non-finite values are stored as missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub trial: u64,
    pub seed: u64,
    pub params: String,
    pub statistic: String,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub count: u64,
}

fn finite(x: Option<f64>) -> Option<f64> {
    x.filter(|v| v.is_finite())
}

impl Record {
    pub fn new(kind: ExperimentKind, trial: u64, seed: u64, params: &str, statistic: &str) -> Self {
        Record {
            experiment: kind.name().to_string(),
            trial,
            seed,
            params: params.to_string(),
            statistic: statistic.to_string(),
            value: None,
            stderr: None,
            count: 0,
        }
    }

    pub fn value(mut self, v: impl Into<Option<f64>>) -> Self {
        self.value = finite(v.into());
        self
    }

    pub fn stderr(mut self, s: impl Into<Option<f64>>) -> Self {
        self.stderr = finite(s.into());
        self
    }

    pub fn count(mut self, n: impl TryInto<u64>) -> Self {
        self.count = n.try_into().unwrap_or(u64::MAX);
        self
    }
}

/// One theory check as it appears in the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryEntry {
    pub lemma: String,
    pub params: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub pass: bool,
    /// `pass`, `fail` or `inapplicable`.
    pub verdict: String,
    pub tolerance: String,
}

impl TheoryEntry {
    pub fn is_failure(&self) -> bool {
        self.verdict == "fail"
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: ExperimentKind,
    pub config: RunConfig,
    /// Conditioning choices and tolerance notes that travel with the data.
    pub notes: Vec<String>,
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theory: Vec<TheoryEntry>,
    /// Per-trial distance tables, only kept when asked for.
    #[serde(skip)]
    pub distance_rows: Vec<(u64, Vec<DistanceRow>)>,
}

pub const CSV_HEADER: [&str; 8] = ["experiment", "trial", "seed", "params", "statistic", "value", "stderr", "count"];

impl ExperimentResult {
    pub fn failed_checks(&self) -> usize {
        self.theory.iter().filter(|e| e.is_failure()).count()
    }

    pub fn statistic<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.statistic == name)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(CSV_HEADER)?;
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        for r in &self.records {
            out.write_record([
                r.experiment.as_str(),
                &r.trial.to_string(),
                &r.seed.to_string(),
                &r.params,
                &r.statistic,
                &opt(r.value),
                &opt(r.stderr),
                &r.count.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}
