//! CSV output. Every summary row carries the hash of the config that produced it.

use std::fmt::Display;
use std::path::Path;

use anyhow::{Context, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub config_hash: String,
    pub experiment: String,
    /// `key=value` pairs joined by `;`.
    pub parameters: String,
    pub metric: String,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    hash: String,
    experiment: String,
    rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(hash: &str, experiment: &str) -> Self {
        Self { hash: hash.to_string(), experiment: experiment.to_string(), rows: Vec::new() }
    }

    pub fn push(&mut self, parameters: &[(&str, String)], metric: &str, value: impl Display) {
        let parameters = parameters.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        self.rows.push(ReportRow {
            config_hash: self.hash.clone(),
            experiment: self.experiment.clone(),
            parameters,
            metric: metric.to_string(),
            value: value.to_string(),
        });
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = Table::create(path, &["config_hash", "experiment", "parameters", "metric", "value"])?;
        for r in &self.rows {
            w.row([&r.config_hash, &r.experiment, &r.parameters, &r.metric, &r.value])?;
        }
        w.finish()
    }
}

/// Thin wrapper over `csv::Writer` that always writes the header, even for empty tables.
pub struct Table {
    inner: csv::Writer<std::fs::File>,
    path: String,
}

impl Table {
    pub fn create<S: AsRef<str>>(path: &Path, header: &[S]) -> Result<Self> {
        let mut inner = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        inner.write_record(header.iter().map(|s| s.as_ref()))?;
        Ok(Self { inner, path: path.display().to_string() })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).with_context(|| format!("writing {}", self.path))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().with_context(|| format!("writing {}", self.path))
    }
}

/// Shortest representation that round-trips, so reruns are byte-identical.
/// Very small or large magnitudes use exponent notation.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}
