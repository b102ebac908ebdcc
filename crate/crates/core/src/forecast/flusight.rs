//! FluSight submission CSV: `location,target,type,unit,bin_start_incl,bin_end_notincl,value`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::epidata::SeasonCalendar;
use crate::error::{DanteError, Result};
use crate::scoring::{BinScheme, TargetDistribution, TargetKind};

/// Tolerance on the total probability of each written target.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LocationForecast {
    pub location: String,
    pub targets: Vec<TargetDistribution>,
}

/// Epiweek number of each week of a season, plus the week after the last.
pub fn week_labels(calendar: &SeasonCalendar, season_year: i32) -> Vec<u32> {
    (1..=calendar.weeks_per_season + 1)
        .map(|t| calendar.to_epiweek(season_year, t).1)
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    location: String,
    target: String,
    #[serde(rename = "type")]
    kind: String,
    unit: String,
    bin_start_incl: String,
    bin_end_notincl: String,
    value: String,
}

/// Writes one block of Bin rows and a Point row per target. `labels` maps
/// week-of-season to epiweek numbers (see [`week_labels`]).
pub fn write_flusight_csv(forecasts: &[LocationForecast], labels: &[u32], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["location", "target", "type", "unit", "bin_start_incl", "bin_end_notincl", "value"])?;
    for f in forecasts {
        for d in &f.targets {
            d.validate(NORMALIZATION_TOLERANCE)
                .map_err(|e| DanteError::Distribution(format!("{}: {e}", f.location)))?;
            let target = d.kind.to_string();
            let unit = d.kind.unit();
            let point = d.point().map_or_else(|| "none".to_string(), |v| v.to_string());
            w.write_record([&f.location, &target, "Point", unit, "NA", "NA", &point])?;
            for (bin, p) in d.probs.iter().enumerate() {
                let (start, end) = bin_edges(d.scheme, bin, labels)?;
                w.write_record([&f.location, &target, "Bin", unit, &start, &end, &p.to_string()])?;
            }
        }
    }
    w.flush().map_err(|e| DanteError::io(path, e))
}

fn bin_edges(scheme: BinScheme, bin: usize, labels: &[u32]) -> Result<(String, String)> {
    Ok(match scheme {
        BinScheme::Percent => (
            format!("{:.1}", BinScheme::percent_bin_start(bin)),
            format!("{:.1}", BinScheme::percent_bin_end(bin)),
        ),
        BinScheme::Weeks { .. } if Some(bin) == scheme.none_bin() => ("none".into(), "none".into()),
        BinScheme::Weeks { .. } => {
            let (Some(a), Some(b)) = (labels.get(bin), labels.get(bin + 1)) else {
                return Err(DanteError::Consistency(format!("no epiweek label for week {}", bin + 1)));
            };
            (a.to_string(), b.to_string())
        }
    })
}

/// Reads a file written by [`write_flusight_csv`]. Point rows are skipped;
/// distributions are rebuilt from Bin rows in file order of first
/// appearance.
pub fn read_flusight_csv(path: &Path, labels: &[u32]) -> Result<Vec<LocationForecast>> {
    let n_weeks = labels.len().saturating_sub(1);
    let mut rd = csv::Reader::from_path(path)?;
    let mut order: Vec<(String, TargetKind)> = Vec::new();
    let mut probs: BTreeMap<(String, TargetKind), Vec<f64>> = BTreeMap::new();
    for (i, row) in rd.deserialize::<Row>().enumerate() {
        let row = row?;
        let line = i as u64 + 2;
        let parse_err = |message: String| DanteError::Parse { path: path.to_path_buf(), line, message };
        if !row.kind.eq_ignore_ascii_case("bin") {
            continue;
        }
        let kind: TargetKind = row.target.parse()?;
        let scheme = BinScheme::for_kind(kind, n_weeks);
        let bin = if row.bin_start_incl.trim() == "none" {
            scheme.none_bin().ok_or_else(|| parse_err(format!("{kind} has no none bin")))?
        } else if kind.is_week_valued() {
            let week: u32 = row
                .bin_start_incl
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad week {:?}", row.bin_start_incl)))?;
            labels[..n_weeks]
                .iter()
                .position(|&l| l == week)
                .ok_or_else(|| parse_err(format!("epiweek {week} is outside the season")))?
        } else {
            let start: f64 = row
                .bin_start_incl
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad bin {:?}", row.bin_start_incl)))?;
            BinScheme::percent_bin(start)
        };
        let key = (row.location.clone(), kind);
        let entry = probs.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            vec![0.0; scheme.n_bins()]
        });
        entry[bin] = row
            .value
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad probability {:?}", row.value)))?;
    }
    let mut out: Vec<LocationForecast> = Vec::new();
    for (location, kind) in order {
        let p = probs.remove(&(location.clone(), kind)).expect("key recorded");
        let dist = TargetDistribution { kind, scheme: BinScheme::for_kind(kind, n_weeks), probs: p };
        dist.validate(NORMALIZATION_TOLERANCE)
            .map_err(|e| DanteError::Distribution(format!("{location}: {e}")))?;
        match out.iter_mut().find(|f| f.location == location) {
            Some(f) => f.targets.push(dist),
            None => out.push(LocationForecast { location, targets: vec![dist] }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::PERCENT_BINS;

    #[test]
    fn roundtrip_is_exact() {
        let cal = SeasonCalendar::consecutive(2014, 1);
        let labels = week_labels(&cal, 2014);
        assert_eq!(labels[0], 40);
        assert_eq!(labels[13], 53);
        let mut p = vec![0.0; PERCENT_BINS];
        p[3] = 1.0 / 3.0;
        p[4] = 2.0 / 3.0;
        let pct = TargetDistribution::new(TargetKind::WeekAhead(2), BinScheme::Percent, p).unwrap();
        let onset_scheme = BinScheme::Weeks { n_weeks: 35, with_none: true };
        let onset = TargetDistribution::point_mass(TargetKind::Onset, onset_scheme, 35).padded();
        let peak = TargetDistribution::point_mass(
            TargetKind::PeakWeek,
            BinScheme::Weeks { n_weeks: 35, with_none: false },
            13,
        );
        let f = vec![
            LocationForecast { location: "US National".into(), targets: vec![pct, onset, peak] },
            LocationForecast {
                location: "HHS Region 1".into(),
                targets: vec![TargetDistribution::point_mass(TargetKind::WeekAhead(1), BinScheme::Percent, 130)],
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_flusight_csv(&f, &labels, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("US National,Season peak week,Bin,week,53,1,1\n"));
        assert!(text.contains("HHS Region 1,1 wk ahead,Bin,percent,13.0,100.0,1\n"));
        let back = read_flusight_csv(&path, &labels).unwrap();
        assert_eq!(back, f);
        let bins = text.lines().filter(|l| l.starts_with("US National,2 wk ahead,Bin")).count();
        assert_eq!(bins, 131);
    }

    #[test]
    fn refuses_unnormalized() {
        let d = TargetDistribution {
            kind: TargetKind::WeekAhead(1),
            scheme: BinScheme::Percent,
            probs: vec![0.0; PERCENT_BINS],
        };
        let f = [LocationForecast { location: "x".into(), targets: vec![d] }];
        let dir = tempfile::tempdir().unwrap();
        let r = write_flusight_csv(&f, &[40, 41], &dir.path().join("f.csv"));
        assert!(matches!(r, Err(DanteError::Distribution(_))));
    }
}
