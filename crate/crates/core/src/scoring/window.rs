//! Forecast weeks over which each target is scored.

use super::targets::{last_week_at_or_above, SeasonTruth, TargetKind};
use crate::forecast::Scale;

pub const FIRST_FORECAST_WEEK: usize = 5;
pub const LAST_FORECAST_WEEK: usize = 29;

/// Inclusive range of forecast weeks (weeks observed when the forecast was
/// made) scored for `kind`.
///
/// States are scored every week. Aggregates follow the FluSight rules:
/// onset through six weeks after the observed onset; peak targets through
/// the first week below baseline after which the season stays below;
/// short-term targets from four weeks before onset until three weeks after
/// that point. Seasons without an onset, or that never reach baseline, are
/// scored every week.
pub fn evaluation_window(kind: TargetKind, truth: &SeasonTruth, scale: Scale) -> (usize, usize) {
    let all = (FIRST_FORECAST_WEEK, LAST_FORECAST_WEEK);
    let (Some(baseline), false) = (truth.baseline, scale == Scale::State) else {
        return all;
    };
    let complete: Option<Vec<f64>> = truth.trajectory.iter().copied().collect();
    let Some(traj) = complete else {
        return all;
    };
    let onset = truth.onset.flatten();
    let below = last_week_at_or_above(&traj, baseline).map(|w| w + 1);
    let (lo, hi) = match kind {
        TargetKind::Onset => match onset {
            Some(o) => (FIRST_FORECAST_WEEK, o + 6),
            None => return all,
        },
        TargetKind::PeakWeek | TargetKind::PeakIntensity => match below {
            Some(b) => (FIRST_FORECAST_WEEK, b),
            None => return all,
        },
        TargetKind::WeekAhead(_) => match (onset, below) {
            (Some(o), Some(b)) => (o.saturating_sub(4), b + 3),
            _ => return all,
        },
    };
    (lo.max(FIRST_FORECAST_WEEK), hi.min(LAST_FORECAST_WEEK))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(values: &[f64], baseline: Option<f64>) -> SeasonTruth {
        let v: Vec<Option<f64>> = values.iter().map(|&x| Some(x)).collect();
        SeasonTruth::from_percent(&v, baseline)
    }

    fn season(onset: usize, last_above: usize) -> Vec<f64> {
        (1..=35)
            .map(|t| if t >= onset && t <= last_above { 4.0 } else { 1.0 })
            .collect()
    }

    #[test]
    fn onset_window_ends_six_weeks_after() {
        let t = truth(&season(8, 20), Some(3.2));
        assert_eq!(evaluation_window(TargetKind::Onset, &t, Scale::Region), (5, 14));
        let late = truth(&season(26, 30), Some(3.2));
        assert_eq!(evaluation_window(TargetKind::Onset, &late, Scale::National), (5, 29));
    }

    #[test]
    fn states_use_every_week() {
        let t = truth(&season(8, 20), None);
        for k in TargetKind::ALL {
            assert_eq!(evaluation_window(k, &t, Scale::State), (5, 29));
        }
    }

    #[test]
    fn peak_and_short_term() {
        let t = truth(&season(10, 18), Some(3.2));
        assert_eq!(evaluation_window(TargetKind::PeakWeek, &t, Scale::Region), (5, 19));
        assert_eq!(evaluation_window(TargetKind::WeekAhead(2), &t, Scale::Region), (6, 22));
    }

    #[test]
    fn fallbacks() {
        let t = truth(&[1.0; 35], Some(3.2));
        for k in TargetKind::ALL {
            assert_eq!(evaluation_window(k, &t, Scale::Region), (5, 29));
        }
    }
}
