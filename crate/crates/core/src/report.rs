//! Deterministic CSV and JSON emission.
//!
//! Census CSV columns:
//! `trace,norm,length,holonomy,holonomy_reduced,realization_count,axis_class_count,primitive`.
//! Growth CSV columns:
//! `N,tau_hat,sigma_hat,mu_hat,N_over_log_N,mu_hat_log_N_over_N`.
//! Floats use the shortest representation that round-trips; missing values
//! are empty cells.

use serde::Serialize;

use crate::census::{CensusReport, GrowthRow};
use crate::error::{Error, Result};

pub const CENSUS_COLUMNS: [&str; 8] = [
    "trace",
    "norm",
    "length",
    "holonomy",
    "holonomy_reduced",
    "realization_count",
    "axis_class_count",
    "primitive",
];

pub const GROWTH_COLUMNS: [&str; 6] = ["N", "tau_hat", "sigma_hat", "mu_hat", "N_over_log_N", "mu_hat_log_N_over_N"];

fn io(e: impl std::fmt::Display) -> Error {
    Error::precondition(format!("report output failed: {e}"))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(io)?;
    String::from_utf8(bytes).map_err(io)
}

pub fn census_csv(report: &CensusReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CENSUS_COLUMNS).map_err(io)?;
    for r in &report.records {
        w.write_record([
            r.trace.to_string(),
            r.norm.to_string(),
            r.length.to_string(),
            r.holonomy.to_string(),
            r.holonomy_reduced.to_string(),
            r.realization_count.to_string(),
            r.axis_class_count.to_string(),
            r.primitive.to_string(),
        ])
        .map_err(io)?;
    }
    finish(w)
}

pub fn growth_csv(rows: &[GrowthRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(GROWTH_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.tau_hat.to_string(),
            r.sigma_hat.to_string(),
            opt(&r.mu_hat),
            opt(&r.n_over_log_n),
            opt(&r.mu_hat_log_n_over_n),
        ])
        .map_err(io)?;
    }
    finish(w)
}

/// Census summary without the record list.
#[derive(Serialize)]
pub struct CensusSummary<'a> {
    pub query: &'a crate::census::CensusQuery,
    pub records: usize,
    pub tau_hat: u64,
    pub sigma_hat: u64,
    pub mu_hat: &'a Option<String>,
    pub sigma_note: &'a str,
}

pub fn census_summary(report: &CensusReport) -> CensusSummary<'_> {
    CensusSummary {
        query: &report.query,
        records: report.records.len(),
        tau_hat: report.tau_hat,
        sigma_hat: report.sigma_hat,
        mu_hat: &report.mu_hat,
        sigma_note: &report.sigma_note,
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(io)?;
    s.push('\n');
    Ok(s)
}

/// One compact JSON object per line.
pub fn to_json_lines<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it).map_err(io)?);
        out.push('\n');
    }
    Ok(out)
}
