//! FluSight targets and their observed values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{DanteError, Result};

/// Rounds a percentage to the nearest tenth, halves away from zero.
pub fn round_tenth(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetKind {
    /// `n`-week-ahead ILI, `n` in 1..=4.
    WeekAhead(u8),
    Onset,
    PeakWeek,
    PeakIntensity,
}

impl TargetKind {
    pub const ALL: [TargetKind; 7] = [
        TargetKind::Onset,
        TargetKind::PeakWeek,
        TargetKind::PeakIntensity,
        TargetKind::WeekAhead(1),
        TargetKind::WeekAhead(2),
        TargetKind::WeekAhead(3),
        TargetKind::WeekAhead(4),
    ];

    pub const SHORT_TERM: [TargetKind; 4] = [
        TargetKind::WeekAhead(1),
        TargetKind::WeekAhead(2),
        TargetKind::WeekAhead(3),
        TargetKind::WeekAhead(4),
    ];

    pub fn is_week_valued(self) -> bool {
        matches!(self, TargetKind::Onset | TargetKind::PeakWeek)
    }

    pub fn is_seasonal(self) -> bool {
        !matches!(self, TargetKind::WeekAhead(_))
    }

    pub fn unit(self) -> &'static str {
        if self.is_week_valued() {
            "week"
        } else {
            "percent"
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetKind::WeekAhead(n) => write!(f, "{n} wk ahead"),
            TargetKind::Onset => f.write_str("Season onset"),
            TargetKind::PeakWeek => f.write_str("Season peak week"),
            TargetKind::PeakIntensity => f.write_str("Season peak percentage"),
        }
    }
}

impl FromStr for TargetKind {
    type Err = DanteError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "Season onset" => return Ok(TargetKind::Onset),
            "Season peak week" => return Ok(TargetKind::PeakWeek),
            "Season peak percentage" => return Ok(TargetKind::PeakIntensity),
            _ => {}
        }
        if let Some(n) = t.strip_suffix(" wk ahead").and_then(|n| n.parse::<u8>().ok()) {
            if (1..=4).contains(&n) {
                return Ok(TargetKind::WeekAhead(n));
            }
        }
        Err(DanteError::UndefinedTarget(format!("unknown target {t:?}")))
    }
}

impl Serialize for TargetKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TargetKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// First week (1-based) of the earliest run of at least three consecutive
/// weeks at or above `baseline`.
pub fn compute_onset(traj: &[f64], baseline: Option<f64>) -> Result<Option<usize>> {
    let baseline = baseline.ok_or_else(|| {
        DanteError::UndefinedTarget("onset is not defined at the state level".into())
    })?;
    let mut run = 0;
    for (i, &v) in traj.iter().enumerate() {
        run = if v >= baseline { run + 1 } else { 0 };
        if run == 3 {
            return Ok(Some(i - 1));
        }
    }
    Ok(None)
}

/// Maximum of the trajectory and every (1-based) week attaining it.
pub fn compute_peak(traj: &[f64]) -> Option<(f64, Vec<usize>)> {
    let max = traj.iter().copied().reduce(f64::max)?;
    let weeks = traj
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == max)
        .map(|(i, _)| i + 1)
        .collect();
    Some((max, weeks))
}

/// Last week (1-based) at or above `baseline`, if any.
pub fn last_week_at_or_above(traj: &[f64], baseline: f64) -> Option<usize> {
    traj.iter().rposition(|&v| v >= baseline).map(|i| i + 1)
}

/// Observed value of one target, as the scorer consumes it.
#[derive(Debug, Clone, PartialEq)]
pub enum TruthValue {
    Percent(f64),
    Weeks(Vec<usize>),
    NoOnset,
}

/// Observed season at one location, in rounded percent.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonTruth {
    pub trajectory: Vec<Option<f64>>,
    pub baseline: Option<f64>,
    /// `None` when the trajectory has gaps or no baseline applies; inner
    /// `None` means no onset.
    pub onset: Option<Option<usize>>,
    /// Maximum over the weeks with data and every week attaining it.
    pub peak: Option<(f64, Vec<usize>)>,
}

impl SeasonTruth {
    /// `percent` holds unrounded percentages per week; `baseline` is absent at
    /// the state scale.
    pub fn from_percent(percent: &[Option<f64>], baseline: Option<f64>) -> Self {
        let trajectory: Vec<Option<f64>> = percent.iter().map(|v| v.map(round_tenth)).collect();
        let complete: Option<Vec<f64>> = trajectory.iter().copied().collect();
        let onset = match (&complete, baseline) {
            (Some(c), Some(_)) => compute_onset(c, baseline).ok(),
            _ => None,
        };
        let peak = trajectory.iter().flatten().copied().reduce(f64::max).map(|max| {
            let weeks = (1..=trajectory.len())
                .filter(|&t| trajectory[t - 1] == Some(max))
                .collect();
            (max, weeks)
        });
        SeasonTruth { trajectory, baseline, onset, peak }
    }

    pub fn n_weeks(&self) -> usize {
        self.trajectory.len()
    }

    /// Truth for `kind` when forecasting with `nobs` weeks observed; `None`
    /// when it cannot be scored.
    pub fn value(&self, kind: TargetKind, nobs: usize) -> Option<TruthValue> {
        match kind {
            TargetKind::WeekAhead(n) => self
                .trajectory
                .get(nobs + n as usize - 1)
                .copied()
                .flatten()
                .map(TruthValue::Percent),
            TargetKind::Onset => match self.onset? {
                Some(w) => Some(TruthValue::Weeks(vec![w])),
                None => Some(TruthValue::NoOnset),
            },
            TargetKind::PeakWeek => self.peak.as_ref().map(|(_, w)| TruthValue::Weeks(w.clone())),
            TargetKind::PeakIntensity => self.peak.as_ref().map(|(v, _)| TruthValue::Percent(*v)),
        }
    }
}
