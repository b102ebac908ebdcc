//! Which state-seasons have a well-defined peak truth despite missing weeks.

use super::panel::IliPanel;
use crate::scoring::round_tenth;

/// Weeks of buffer added on each side of the historic peak-week range.
pub const PEAK_BUFFER_WEEKS: usize = 3;

/// Inclusive 1-based range of historic peak weeks.
pub type PeakRange = (usize, usize);

fn peak_weeks(series: &[Option<f64>]) -> Vec<usize> {
    let rounded: Vec<Option<f64>> = series
        .iter()
        .map(|v| v.map(|y| round_tenth(100.0 * y)))
        .collect();
    let Some(max) = rounded.iter().flatten().copied().reduce(f64::max) else {
        return Vec::new();
    };
    rounded
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == Some(max))
        .map(|(t, _)| t + 1)
        .collect()
}

/// Earliest and latest peak week over the region's seasons. Seasons without
/// missing weeks are used when any exist; otherwise every season with data.
pub fn historic_peak_range(panel: &IliPanel, r: usize) -> Option<PeakRange> {
    let seasons: Vec<&[Option<f64>]> = (0..panel.n_seasons()).map(|s| panel.series(r, s)).collect();
    let complete: Vec<&[Option<f64>]> = seasons
        .iter()
        .copied()
        .filter(|series| series.iter().all(Option::is_some))
        .collect();
    let pool = if complete.is_empty() { seasons } else { complete };
    let weeks: Vec<usize> = pool.iter().flat_map(|series| peak_weeks(series)).collect();
    Some((*weeks.iter().min()?, *weeks.iter().max()?))
}

/// Whether a season's seasonal targets can be scored: no missing week may
/// fall inside the buffered historic peak range.
pub fn season_is_scorable(series: &[Option<f64>], range: Option<PeakRange>) -> bool {
    let missing: Vec<usize> = series
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(t, _)| t + 1)
        .collect();
    if missing.is_empty() {
        return true;
    }
    if missing.len() == series.len() {
        return false;
    }
    let Some((lo, hi)) = range else {
        return false;
    };
    let lo = lo.saturating_sub(PEAK_BUFFER_WEEKS);
    let hi = hi + PEAK_BUFFER_WEEKS;
    !missing.iter().any(|t| (lo..=hi).contains(t))
}

/// Scorability of seasonal targets per `(region, season)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorableMask {
    n_seasons: usize,
    flags: Vec<bool>,
}

impl ScorableMask {
    pub fn is_scorable(&self, r: usize, s: usize) -> bool {
        self.flags[r * self.n_seasons + s]
    }
}

pub fn scorable_seasonal_targets(panel: &IliPanel) -> ScorableMask {
    let mut flags = Vec::with_capacity(panel.n_regions() * panel.n_seasons());
    for r in 0..panel.n_regions() {
        let range = historic_peak_range(panel, r);
        for s in 0..panel.n_seasons() {
            flags.push(season_is_scorable(panel.series(r, s), range));
        }
    }
    ScorableMask {
        n_seasons: panel.n_seasons(),
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidata::SeasonCalendar;

    fn season_with_gap(gap: usize) -> Vec<Option<f64>> {
        (1..=35).map(|t| (t != gap).then_some(0.01)).collect()
    }

    #[test]
    fn gap_outside_buffered_window_is_scorable() {
        // Historic peaks in weeks 10..=20; a late-May gap cannot be the peak.
        assert!(season_is_scorable(&season_with_gap(30), Some((10, 20))));
    }

    #[test]
    fn gap_inside_buffered_window_is_not() {
        assert!(!season_is_scorable(&season_with_gap(14), Some((10, 20))));
        // The buffer is inclusive on both ends.
        assert!(!season_is_scorable(&season_with_gap(7), Some((10, 20))));
        assert!(!season_is_scorable(&season_with_gap(23), Some((10, 20))));
        assert!(season_is_scorable(&season_with_gap(24), Some((10, 20))));
    }

    #[test]
    fn complete_and_empty_seasons() {
        assert!(season_is_scorable(&[Some(0.01); 35], None));
        assert!(!season_is_scorable(&[None; 35], Some((1, 35))));
    }

    #[test]
    fn panel_mask_uses_historic_peaks() {
        let cal = SeasonCalendar::consecutive(2010, 3);
        let mut p = IliPanel::empty(vec!["DC".into()], cal);
        for s in 0..3 {
            for t in 0..35 {
                let peak = 12 + 2 * s;
                let y = 0.05 - 0.001 * (t as f64 - peak as f64).abs();
                p.set(0, s, t, Some(y));
            }
        }
        assert_eq!(historic_peak_range(&p, 0), Some((13, 17)));
        p.set(0, 2, 33, None);
        p.set(0, 1, 12, None);
        let mask = scorable_seasonal_targets(&p);
        assert!(mask.is_scorable(0, 0));
        assert!(!mask.is_scorable(0, 1));
        assert!(mask.is_scorable(0, 2));
    }
}
