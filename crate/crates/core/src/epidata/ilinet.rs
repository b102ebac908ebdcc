//! ILINet CSV ingestion and per-row cleaning.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DanteError, Result};

/// Cleaned proportions below this are raised to it.
pub const ILI_FLOOR: f64 = 0.0005;
/// Cleaned proportions above this are lowered to it, keeping values inside (0, 1).
pub const ILI_CEILING: f64 = 1.0 - ILI_FLOOR;

/// One row of an ILINet extract. `ili_percent` is on the 0-100 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawIliRow {
    pub region_id: String,
    pub year: i32,
    pub epiweek: u32,
    pub ili_percent: Option<f64>,
    pub ilitotal: Option<u64>,
    pub total_patients: Option<u64>,
}

impl RawIliRow {
    /// Whether `ili_percent` agrees with `100 * ilitotal / total_patients`
    /// to within 0.01 percentage points (vacuously true when not checkable).
    pub fn is_consistent(&self) -> bool {
        match (self.ili_percent, self.ilitotal, self.total_patients) {
            (Some(ili), Some(num), Some(den)) if den > 0 => {
                (ili - 100.0 * num as f64 / den as f64).abs() <= 0.01 + 1e-12
            }
            _ => true,
        }
    }
}

const COLUMNS: [&str; 6] = ["region", "year", "week", "ili", "ilitotal", "total_patients"];

fn column_aliases(name: &str) -> &'static [&'static str] {
    match name {
        "region" => &["region", "region_id", "location"],
        "week" => &["week", "epiweek"],
        "ili" => &["ili", "ili_percent", "wili", "weighted_ili"],
        "ilitotal" => &["ilitotal", "ili_total"],
        "total_patients" => &["total_patients", "num_patients"],
        "year" => &["year"],
        _ => &[],
    }
}

fn parse_optional<T: std::str::FromStr>(field: &str) -> Option<T> {
    let field = field.trim();
    if field.is_empty() || field.eq_ignore_ascii_case("na") {
        return None;
    }
    field.parse().ok()
}

/// Parses an ILINet CSV file.
pub fn parse_ilinet(path: impl AsRef<Path>) -> Result<Vec<RawIliRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| DanteError::io(path, e))?;
    parse_ilinet_reader(file, path)
}

/// Parses ILINet CSV text from any reader; `origin` is used in error messages.
pub fn parse_ilinet_reader<R: Read>(reader: R, origin: &Path) -> Result<Vec<RawIliRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let parse_err = |line: u64, message: String| DanteError::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| {
                column_aliases(name)
                    .iter()
                    .any(|alias| h.eq_ignore_ascii_case(alias))
            })
            .ok_or_else(|| parse_err(1, format!("header is missing column `{name}`")))?;
    }

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let get = |i: usize| record.get(idx[i]).unwrap_or("");
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let year = get(1)
            .parse()
            .map_err(|_| parse_err(line, format!("bad year `{}`", get(1))))?;
        let epiweek = get(2)
            .parse()
            .map_err(|_| parse_err(line, format!("bad week `{}`", get(2))))?;
        rows.push(RawIliRow {
            region_id: get(0).to_string(),
            year,
            epiweek,
            ili_percent: parse_optional(get(3)),
            ilitotal: parse_optional(get(4)),
            total_patients: parse_optional(get(5)),
        });
    }
    Ok(rows)
}

/// Cleans a row into an ILI proportion in `(0, 1)`, or `None` when missing.
///
/// * zero patients: missing;
/// * `NA` ILI with zero ILI visits among a positive patient count: 0;
/// * otherwise `ili_percent / 100`;
/// * present values are clamped to `[ILI_FLOOR, ILI_CEILING]`.
pub fn clean_row(row: &RawIliRow) -> Result<Option<f64>> {
    if let (Some(num), Some(den)) = (row.ilitotal, row.total_patients) {
        if num > den {
            return Err(DanteError::Consistency(format!(
                "{} {}-W{}: ilitotal {num} exceeds total_patients {den}",
                row.region_id, row.year, row.epiweek
            )));
        }
    }
    let proportion = match (row.total_patients, row.ili_percent) {
        (Some(0), _) => None,
        (_, Some(ili)) if ili.is_finite() => Some(ili / 100.0),
        (Some(den), None) if den > 0 && row.ilitotal == Some(0) => Some(0.0),
        _ => None,
    };
    Ok(proportion.map(clamp_proportion))
}

pub fn clamp_proportion(y: f64) -> f64 {
    y.clamp(ILI_FLOOR, ILI_CEILING)
}
