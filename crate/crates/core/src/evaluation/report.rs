//! Report directory: `scores.csv`, `mse.csv`, `hpd.csv`, `volatility.csv`,
//! `diagnostics.csv` and the long-format `summary.csv`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::summary::{summarize, SummaryRow};
use super::{DiagnosticRecord, HpdRecord, LosoOutput, PointRecord};
use crate::epidata::VolatilityReport;
use crate::error::{DanteError, Result};
use crate::scoring::write_scores;

fn write_rows<T: Serialize>(rows: &[T], header: &[&str], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| DanteError::io(path, e))
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut rd = csv::Reader::from_path(path)?;
    rd.deserialize().map(|r| r.map_err(DanteError::from)).collect()
}

const RECORD_KEYS: [&str; 6] = ["model", "location", "scale", "season", "target", "forecast_week"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolatilityRow {
    pub region: String,
    /// Season start year, or `all` for the region average.
    pub season: String,
    pub volatility: Option<f64>,
    pub patient_mean: Option<f64>,
}

fn volatility_rows(v: &VolatilityReport) -> Vec<VolatilityRow> {
    let mut rows = Vec::new();
    for (r, region) in v.regions.iter().enumerate() {
        for (s, season) in v.seasons.iter().enumerate() {
            rows.push(VolatilityRow {
                region: region.clone(),
                season: season.to_string(),
                volatility: v.v_rs[r][s],
                patient_mean: None,
            });
        }
        rows.push(VolatilityRow {
            region: region.clone(),
            season: "all".into(),
            volatility: v.v_r[r],
            patient_mean: v.patient_means[r],
        });
    }
    rows
}

const VOLATILITY_HEADER: [&str; 4] = ["region", "season", "volatility", "patient_mean"];

/// Per-season volatility rows followed by one `all` row per region.
pub fn write_volatility(v: &VolatilityReport, path: &Path) -> Result<()> {
    write_rows(&volatility_rows(v), &VOLATILITY_HEADER, path)
}

/// Writes every report table into `dir`, creating it if needed. Empty
/// inputs produce header-only files.
pub fn emit_report(out: &LosoOutput, volatility: Option<&VolatilityReport>, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| DanteError::io(dir, e))?;
    write_scores(&out.scores, &dir.join("scores.csv"))?;
    let with = |extra: &[&'static str]| -> Vec<&'static str> {
        RECORD_KEYS.iter().chain(extra).copied().collect()
    };
    write_rows(&out.points, &with(&["prediction", "squared_error"]), &dir.join("mse.csv"))?;
    write_rows(&out.hpd, &with(&["level", "width"]), &dir.join("hpd.csv"))?;
    write_rows(
        &out.diagnostics,
        &["season", "nobs", "n_draws", "max_rhat", "min_ess", "n_warnings", "message"],
        &dir.join("diagnostics.csv"),
    )?;
    let vol = volatility.map(volatility_rows).unwrap_or_default();
    write_rows(&vol, &VOLATILITY_HEADER, &dir.join("volatility.csv"))?;
    write_rows(
        &summarize(out).rows,
        &["model", "metric", "grouping", "group", "value", "n"],
        &dir.join("summary.csv"),
    )
}

pub fn read_points(path: &Path) -> Result<Vec<PointRecord>> {
    read_rows(path)
}

pub fn read_hpd(path: &Path) -> Result<Vec<HpdRecord>> {
    read_rows(path)
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticRecord>> {
    read_rows(path)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    read_rows(path)
}

pub fn read_volatility(path: &Path) -> Result<Vec<VolatilityRow>> {
    read_rows(path)
}
