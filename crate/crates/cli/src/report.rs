//! Run reports: one JSON (or CSV) document per invocation, written
//! atomically and byte-identical for a fixed seed. Wall-clock timing is kept
//! out of the serialized JSON so reruns compare equal; it is echoed on
//! stderr instead. CSV rows do carry a trailing millis column and are
//! compared modulo that column.

use serde::Serialize;
use shatterlab_core::families::{CompositeSpace, TraceReport};
use std::io::Write;
use std::path::{Path, PathBuf};

/// One t-row of a shatter sweep. Timing is carried for the CSV form but
/// skipped in JSON so reruns with one seed serialize identically.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub t: usize,
    pub count: usize,
    pub forced: Vec<(Vec<String>, usize)>,
    pub strategy: String,
    pub config: serde_json::Value,
    #[serde(skip)]
    pub millis: u128,
}

impl ReportRow {
    pub fn from_trace(r: &TraceReport) -> ReportRow {
        ReportRow {
            t: r.t,
            count: r.count,
            forced: r.forced.clone(),
            strategy: r.strategy.clone(),
            config: serde_json::to_value(&r.config).expect("serializable"),
            millis: r.millis,
        }
    }
}

/// Exponent section of a report: either an exact symbolic value or a
/// log-log fit of empirical lower bounds.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "basis")]
pub enum ExponentOut {
    #[serde(rename = "symbolic")]
    Symbolic { s: usize },
    #[serde(rename = "empirical")]
    Empirical {
        slope: f64,
        nearest: i64,
        residual: f64,
        t_min: usize,
        t_max: usize,
        counts: Vec<(usize, usize)>,
    },
}

/// Outcome of one reproduce check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

/// The full document written by every subcommand.
#[derive(Debug, Serialize)]
pub struct RunReport {
    /// Echo of the invocation, argv joined by spaces.
    pub command: String,
    pub seed: u64,
    /// Corpus entry name when the family came from the corpus.
    pub entry: Option<String>,
    pub rows: Vec<ReportRow>,
    pub exponent: Option<ExponentOut>,
    pub checks: Vec<CheckOutcome>,
    /// Paths of artifacts written alongside the report.
    pub certificates: Vec<String>,
    #[serde(skip)]
    pub millis: u128,
}

impl RunReport {
    pub fn new(command: String, seed: u64, entry: Option<String>) -> RunReport {
        RunReport {
            command,
            seed,
            entry,
            rows: Vec::new(),
            exponent: None,
            checks: Vec::new(),
            certificates: Vec::new(),
            millis: 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        text
    }

    /// CSV form: the fixed sweep schema
    /// `t,count,forced_J...,strategy,seed,millis`.
    pub fn to_csv(&self, space: &CompositeSpace) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = TraceReport::csv_header(space);
        w.write_record(header.split(',')).expect("in-memory csv");
        for row in &self.rows {
            let mut cols = vec![row.t.to_string(), row.count.to_string()];
            for (_, c) in &row.forced {
                cols.push(c.to_string());
            }
            cols.push(row.strategy.clone());
            cols.push(self.seed.to_string());
            cols.push(row.millis.to_string());
            w.write_record(&cols).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }
}

/// Write `text` to `path` atomically: a sibling temp file then a rename.
pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let tmp: PathBuf = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
