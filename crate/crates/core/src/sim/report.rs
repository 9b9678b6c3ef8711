use std::fmt::Write as _;
use std::time::Duration;

use crate::mc::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// A Monte Carlo proportion with binomial SE.
    Rate,
    /// A Monte Carlo mean with its SE.
    Mean,
    /// An empirical quantile over replications.
    Quantile,
    /// A closed-form or exactly computed value.
    Exact,
    /// An integer tally.
    Count,
}

impl RowKind {
    fn as_str(self) -> &'static str {
        match self {
            RowKind::Rate => "rate",
            RowKind::Mean => "mean",
            RowKind::Quantile => "quantile",
            RowKind::Exact => "exact",
            RowKind::Count => "count",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub metric: String,
    pub n: Option<u64>,
    pub kind: RowKind,
    pub value: f64,
    pub se: Option<f64>,
    /// Free text such as an exact fraction or a threshold label.
    pub detail: String,
}

/// Everything a run produced. Rows appear in a fixed order determined by
/// the scenario alone.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub scenario: String,
    pub paradigm: &'static str,
    pub seed_root: u64,
    pub reps: u64,
    pub rows: Vec<Row>,
    pub wall_clock: Duration,
}

/// Scientific notation with 12 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl SimulationReport {
    pub(crate) fn new(scenario: &str, paradigm: &'static str, seed_root: u64, reps: u64) -> Self {
        SimulationReport {
            scenario: scenario.to_string(),
            paradigm,
            seed_root,
            reps,
            rows: Vec::new(),
            wall_clock: Duration::ZERO,
        }
    }

    pub(crate) fn push(&mut self, metric: &str, n: Option<u64>, kind: RowKind, value: f64, detail: impl Into<String>) {
        self.rows.push(Row {
            metric: metric.to_string(),
            n,
            kind,
            value,
            se: None,
            detail: detail.into(),
        });
    }

    pub(crate) fn push_estimate(&mut self, metric: &str, n: Option<u64>, kind: RowKind, e: &Estimate, detail: impl Into<String>) {
        self.rows.push(Row {
            metric: metric.to_string(),
            n,
            kind,
            value: e.value,
            se: Some(e.se),
            detail: detail.into(),
        });
    }

    /// First row with this metric name and detail, if any.
    pub fn find(&self, metric: &str, n: Option<u64>, detail: &str) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.n == n && r.detail == detail)
    }

    /// All rows with this metric name, in report order.
    pub fn series(&self, metric: &str) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.metric == metric).collect()
    }

    pub const CSV_HEADER: &'static str = "scenario,paradigm,seed_root,reps,metric,n,kind,value,se,detail";

    /// CSV with a header line; the wall-clock time is the final row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let prefix = format!(
            "{},{},{},{}",
            csv_field(&self.scenario),
            self.paradigm,
            self.seed_root,
            self.reps
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{prefix},{},{},{},{},{},{}",
                csv_field(&r.metric),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                r.kind.as_str(),
                format_float(r.value),
                r.se.map(format_float).unwrap_or_default(),
                csv_field(&r.detail),
            );
        }
        let _ = writeln!(
            out,
            "{prefix},wall_clock_seconds,,exact,{},,",
            format_float(self.wall_clock.as_secs_f64())
        );
        out
    }

    /// Human-readable table.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "scenario {} ({}), seed {}, {} replications\n",
            self.scenario, self.paradigm, self.seed_root, self.reps
        );
        for r in &self.rows {
            let n = r.n.map(|n| format!(" n={n}")).unwrap_or_default();
            let detail = if r.detail.is_empty() { String::new() } else { format!(" [{}]", r.detail) };
            let value = match r.se {
                Some(se) => format!("{:.6} ± {:.6}", r.value, se),
                None if r.kind == RowKind::Count => format!("{}", r.value),
                None => format!("{:.10e}", r.value),
            };
            let _ = writeln!(out, "  {}{n}{detail}: {value}", r.metric);
        }
        let _ = writeln!(out, "  wall clock: {:.3}s", self.wall_clock.as_secs_f64());
        out
    }
}
