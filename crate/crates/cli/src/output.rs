//! CSV and JSON writers. Column orders are fixed.

use orbitspace::beltrami::BeltramiField;
use orbitspace::rescale::OrbitTrace;
use orbitspace::Point;
use serde::Serialize;

use crate::{CliError, Report, RunConfig};

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct PointRow {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct BeltramiRow {
    x: f64,
    y: f64,
    mu: f64,
    k: f64,
}

fn io_error(e: impl Into<std::io::Error>) -> CliError {
    CliError::Io { path: "<buffer>".into(), source: e.into() }
}

// The header is written up front so that an empty table still has one.
fn csv_bytes<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(io_error)?;
    for row in rows {
        w.serialize(row).map_err(io_error)?;
    }
    w.into_inner().map_err(|e| io_error(e.into_error()))
}

/// `t,re,im`, one row per sample, `t` decreasing.
pub fn trace_csv(trace: &OrbitTrace) -> Result<Vec<u8>, CliError> {
    csv_bytes(&["t", "re", "im"], trace.samples.iter().map(|s| TraceRow { t: s.t, re: s.value.re, im: s.value.im }))
}

/// `re,im`.
pub fn points_csv(points: impl IntoIterator<Item = Point>) -> Result<Vec<u8>, CliError> {
    csv_bytes(&["re", "im"], points.into_iter().map(|p| PointRow { re: p.re, im: p.im }))
}

/// `x,y,|mu|,K`. Points whose stencil straddled a seam are left out.
pub fn beltrami_csv(field: &BeltramiField) -> Result<Vec<u8>, CliError> {
    csv_bytes(&["x", "y", "|mu|", "K"], field.samples.iter().map(|s| BeltramiRow { x: s.z.re, y: s.z.im, mu: s.mu.norm(), k: s.distortion }))
}

/// Pretty-printed report with the resolved config, newline-terminated.
pub fn json<T: Serialize>(config: &RunConfig, result: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(&Report { config: config.clone(), result }).map_err(io_error)?;
    bytes.push(b'\n');
    Ok(bytes)
}
