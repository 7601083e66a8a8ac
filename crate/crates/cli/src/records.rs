//! Fixed-layout CSV rows. Column order is part of the interface.

use std::fs::OpenOptions;
use std::path::Path;

use serde::Serialize;

/// One row per `solve` call.
#[derive(Debug, Serialize)]
pub struct SolveRow {
    pub instance_id: String,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub rho: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective_x: f64,
    pub objective_polished: Option<f64>,
    pub primal_residual: f64,
    pub stationarity_residual: Option<f64>,
    pub wall_time_s: f64,
    pub mse: Option<f64>,
}

/// Per-seed rows and one trailing summary row of `bench`. Summary-only
/// columns are empty on seed rows and vice versa.
#[derive(Debug, Default, Serialize)]
pub struct BenchRow {
    /// `instance` or `summary`.
    pub row: &'static str,
    pub family: &'static str,
    pub seed: Option<u64>,
    pub n: usize,
    pub p: Option<usize>,
    pub m: Option<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub objective_polished: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub mse_ssal: Option<f64>,
    pub mse_baseline: Option<f64>,
    pub error: Option<String>,
    pub iterations_min: Option<usize>,
    pub iterations_max: Option<usize>,
    pub iterations_mean: Option<f64>,
    pub wall_time_min: Option<f64>,
    pub wall_time_max: Option<f64>,
    pub wall_time_mean: Option<f64>,
    pub failures: Option<usize>,
}

/// Appends `row`, writing the header first when the file is new or empty.
pub fn append_row<T: Serialize>(path: &Path, row: &T) -> Result<(), Box<dyn std::error::Error>> {
    let exists = path.metadata().map(|m| m.len() > 0).unwrap_or(false);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new().has_headers(!exists).from_writer(file);
    writer.serialize(row)?;
    writer.flush()?;
    Ok(())
}

pub fn write_rows<T: Serialize, W: std::io::Write>(out: W, rows: &[T]) -> Result<(), Box<dyn std::error::Error>> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
