//! Score records, their averaging, and the baselines and score tables.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::multibin::log_skill;
use super::targets::TargetKind;
use crate::epidata::panel::canonical_location;
use crate::error::{DanteError, Result};
use crate::forecast::Scale;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub model: String,
    pub location: String,
    pub scale: Scale,
    pub season: i32,
    pub target: TargetKind,
    pub forecast_week: usize,
    pub skill: f64,
    pub log_skill: f64,
}

impl ScoreRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        model: &str,
        location: &str,
        scale: Scale,
        season: i32,
        target: TargetKind,
        forecast_week: usize,
        skill: f64,
    ) -> Self {
        ScoreRecord {
            model: model.to_string(),
            location: location.to_string(),
            scale,
            season,
            target,
            forecast_week,
            skill,
            log_skill: log_skill(skill),
        }
    }
}

/// Geometric mean of skills with each log score floored at -10:
/// `exp(mean(log_skill))`. `None` for an empty selection.
pub fn average_scores<'a>(records: impl IntoIterator<Item = &'a ScoreRecord>) -> Option<f64> {
    let (sum, n) = records
        .into_iter()
        .fold((0.0, 0usize), |(s, n), r| (s + r.log_skill, n + 1));
    (n > 0).then(|| (sum / n as f64).exp())
}

pub fn write_scores(records: &[ScoreRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if records.is_empty() {
        w.write_record(["model", "location", "scale", "season", "target", "forecast_week", "skill", "log_skill"])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| DanteError::io(path, e))
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in rd.deserialize::<ScoreRecord>() {
        out.push(row?);
    }
    Ok(out)
}

/// CDC baselines keyed by canonical location name and season start year.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Baselines {
    values: HashMap<(String, i32), f64>,
}

#[derive(Debug, Deserialize)]
struct BaselineRow {
    location: String,
    season: String,
    baseline_percent: f64,
}

/// Accepts `2014` or `2014/2015` style season labels.
fn season_start_year(label: &str) -> Option<i32> {
    label.trim().split(['/', '-']).next()?.trim().parse().ok()
}

impl Baselines {
    pub fn insert(&mut self, location: &str, season: i32, baseline_percent: f64) {
        self.values
            .insert((canonical_location(location), season), baseline_percent);
    }

    pub fn get(&self, location: &str, season: i32) -> Option<f64> {
        self.values.get(&(canonical_location(location), season)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Reads `location,season,baseline_percent`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let mut out = Baselines::default();
        for (i, row) in rd.deserialize::<BaselineRow>().enumerate() {
            let row = row?;
            let season = season_start_year(&row.season).ok_or_else(|| DanteError::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 2,
                message: format!("unreadable season {:?}", row.season),
            })?;
            out.insert(&row.location, season, row.baseline_percent);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(skill: f64) -> ScoreRecord {
        ScoreRecord::new("dante", "HHS Region 6", Scale::Region, 2014, TargetKind::Onset, 5, skill)
    }

    #[test]
    fn average_examples() {
        assert_eq!(average_scores(&[rec(0.4)]), Some(0.4f64.ln().exp()));
        assert!(average_scores(&[]).is_none());
        let with_zero = average_scores(&[rec(0.0), rec(1.0)]).unwrap();
        assert!((with_zero - (-5.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn scores_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("scores.csv");
        let recs = vec![rec(0.27), rec(0.0)];
        write_scores(&recs, &p).unwrap();
        assert_eq!(read_scores(&p).unwrap(), recs);
        write_scores(&[], &p).unwrap();
        assert!(read_scores(&p).unwrap().is_empty());
    }

    #[test]
    fn baselines_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.csv");
        std::fs::write(&p, "location,season,baseline_percent\nHHS Region 6,2014/2015,3.2\nUS National,2014,2.0\n").unwrap();
        let b = Baselines::load(&p).unwrap();
        assert_eq!(b.get("Region 6", 2014), Some(3.2));
        assert_eq!(b.get("national", 2014), Some(2.0));
        assert_eq!(b.get("HHS Region 6", 2015), None);
    }
}
