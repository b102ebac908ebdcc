use std::collections::HashSet;

use super::calendar::SeasonCalendar;
use super::ilinet::{clean_row, RawIliRow};
use super::weights::{WeightMatrix, NATIONAL};
use crate::error::{DanteError, Result};

/// Cleaned ILI proportions indexed by `(region, season, week-of-season)`.
///
/// Indices are 0-based here; week index `t` corresponds to week-of-season
/// `t + 1` in the calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct IliPanel {
    pub region_names: Vec<String>,
    pub calendar: SeasonCalendar,
    values: Vec<Option<f64>>,
}

impl IliPanel {
    pub fn empty(region_names: Vec<String>, calendar: SeasonCalendar) -> Self {
        let n = region_names.len() * calendar.n_seasons() * calendar.weeks_per_season;
        IliPanel {
            region_names,
            calendar,
            values: vec![None; n],
        }
    }

    pub fn n_regions(&self) -> usize {
        self.region_names.len()
    }

    pub fn n_seasons(&self) -> usize {
        self.calendar.n_seasons()
    }

    pub fn n_weeks(&self) -> usize {
        self.calendar.weeks_per_season
    }

    pub fn season_labels(&self) -> &[i32] {
        &self.calendar.season_years
    }

    fn offset(&self, r: usize, s: usize, t: usize) -> usize {
        assert!(r < self.n_regions() && s < self.n_seasons() && t < self.n_weeks());
        (r * self.n_seasons() + s) * self.n_weeks() + t
    }

    pub fn get(&self, r: usize, s: usize, t: usize) -> Option<f64> {
        self.values[self.offset(r, s, t)]
    }

    pub fn set(&mut self, r: usize, s: usize, t: usize, value: Option<f64>) {
        let i = self.offset(r, s, t);
        self.values[i] = value;
    }

    pub fn series(&self, r: usize, s: usize) -> &[Option<f64>] {
        let start = self.offset(r, s, 0);
        &self.values[start..start + self.n_weeks()]
    }

    pub fn region_index(&self, name: &str) -> Option<usize> {
        self.region_names.iter().position(|n| n == name)
    }

    pub fn n_present(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Copy with every week after the first `nobs` of `season` made missing.
    pub fn truncated(&self, season: usize, nobs: usize) -> IliPanel {
        let mut out = self.clone();
        for r in 0..self.n_regions() {
            for t in nobs..self.n_weeks() {
                out.set(r, season, t, None);
            }
        }
        out
    }
}

/// Places cleaned rows for the listed regions into a panel.
///
/// Rows for other regions and epiweeks outside every season window are
/// ignored; regions or seasons without rows stay missing.
pub fn build_panel(
    rows: &[RawIliRow],
    calendar: &SeasonCalendar,
    regions: &[String],
) -> Result<IliPanel> {
    build_panel_with(rows, calendar, regions, |id| id.to_string())
}

fn build_panel_with(
    rows: &[RawIliRow],
    calendar: &SeasonCalendar,
    regions: &[String],
    canonical: impl Fn(&str) -> String,
) -> Result<IliPanel> {
    let mut panel = IliPanel::empty(regions.to_vec(), calendar.clone());
    let mut seen = HashSet::new();
    for row in rows {
        let name = canonical(&row.region_id);
        let Some(r) = panel.region_index(&name) else {
            continue;
        };
        if !seen.insert((r, row.year, row.epiweek)) {
            return Err(DanteError::Duplicate {
                region: row.region_id.clone(),
                year: row.year,
                week: row.epiweek,
            });
        }
        let Some((s, t)) = calendar.locate(row.year, row.epiweek) else {
            continue;
        };
        let value = clean_row(row)?;
        panel.set(r, s, t - 1, value);
    }
    Ok(panel)
}

/// Maps the common spellings of regional and national identifiers onto the
/// location names used by [`WeightMatrix`].
pub fn canonical_location(id: &str) -> String {
    let lower = id.trim().to_ascii_lowercase();
    if matches!(lower.as_str(), "national" | "nat" | "us" | "us national" | "usa") {
        return NATIONAL.to_string();
    }
    let compact: String = lower.chars().filter(|c| !c.is_whitespace()).collect();
    for prefix in ["hhsregion", "hhs", "region"] {
        if let Some(rest) = compact.strip_prefix(prefix) {
            if let Ok(n) = rest.parse::<u8>() {
                if (1..=10).contains(&n) {
                    return super::weights::region_location(n);
                }
            }
        }
    }
    id.trim().to_string()
}

/// Builds the reported regional/national (w)ILI panel from aggregate rows.
/// Returns `None` when the input holds no aggregate rows at all.
pub fn build_aggregate_panel(
    rows: &[RawIliRow],
    calendar: &SeasonCalendar,
    weights: &WeightMatrix,
) -> Result<Option<IliPanel>> {
    let any = rows
        .iter()
        .any(|r| weights.location_index(&canonical_location(&r.region_id)).is_some());
    if !any {
        return Ok(None);
    }
    build_panel_with(rows, calendar, &weights.locations, canonical_location).map(Some)
}

/// Reconstructs aggregate (w)ILI from state values, dropping missing states
/// and renormalizing the remaining weights.
pub fn reconstruct_aggregates(states: &IliPanel, weights: &WeightMatrix) -> Result<IliPanel> {
    let order = state_order(states, weights)?;
    let mut out = IliPanel::empty(weights.locations.clone(), states.calendar.clone());
    for loc in 0..weights.n_locations() {
        for s in 0..states.n_seasons() {
            for t in 0..states.n_weeks() {
                let mut num = 0.0;
                let mut den = 0.0;
                for (r, &pr) in order.iter().enumerate() {
                    let w = weights.weight(r, loc);
                    if let (true, Some(y)) = (w > 0.0, states.get(pr, s, t)) {
                        num += w * y;
                        den += w;
                    }
                }
                out.set(loc, s, t, (den > 0.0).then(|| num / den));
            }
        }
    }
    Ok(out)
}

/// Panel row index of each weight-matrix state.
pub fn state_order(panel: &IliPanel, weights: &WeightMatrix) -> Result<Vec<usize>> {
    weights
        .states
        .iter()
        .map(|name| {
            panel.region_index(name).ok_or_else(|| {
                DanteError::Weights(format!("state {name} has weights but no panel row"))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(region: &str, year: i32, week: u32, ili: Option<f64>) -> RawIliRow {
        RawIliRow {
            region_id: region.into(),
            year,
            epiweek: week,
            ili_percent: ili,
            ilitotal: Some(1),
            total_patients: Some(100),
        }
    }

    #[test]
    fn places_rows_on_the_season_axis() {
        let cal = SeasonCalendar::consecutive(2015, 2);
        let regions = vec!["AL".to_string(), "FL".to_string()];
        let rows = vec![
            raw("AL", 2015, 40, Some(1.0)),
            raw("AL", 2016, 22, Some(2.0)),
            raw("AL", 2016, 23, Some(3.0)),
            raw("AL", 2016, 39, Some(4.0)),
            raw("AL", 2016, 40, Some(5.0)),
            raw("XX", 2016, 40, Some(5.0)),
        ];
        let p = build_panel(&rows, &cal, &regions).unwrap();
        assert_eq!(p.get(0, 0, 0), Some(0.01));
        assert_eq!(p.get(0, 0, 34), Some(0.02));
        assert_eq!(p.get(0, 1, 0), Some(0.05));
        assert_eq!(p.n_present(), 3);
        for s in 0..2 {
            assert!(p.series(1, s).iter().all(Option::is_none));
        }
    }

    #[test]
    fn duplicate_rows_are_fatal() {
        let cal = SeasonCalendar::consecutive(2015, 1);
        let rows = vec![raw("AL", 2015, 41, Some(1.0)), raw("AL", 2015, 41, Some(1.1))];
        let err = build_panel(&rows, &cal, &["AL".to_string()]).unwrap_err();
        assert!(matches!(err, DanteError::Duplicate { week: 41, .. }));
    }

    #[test]
    fn present_values_respect_bounds() {
        let cal = SeasonCalendar::consecutive(2015, 1);
        let rows = vec![raw("AL", 2015, 40, Some(0.0)), raw("AL", 2015, 41, Some(100.0))];
        let p = build_panel(&rows, &cal, &["AL".to_string()]).unwrap();
        for v in p.series(0, 0).iter().flatten() {
            assert!(*v >= 0.0005 && *v < 1.0);
        }
    }

    #[test]
    fn location_spellings() {
        assert_eq!(canonical_location("HHS9"), "HHS Region 9");
        assert_eq!(canonical_location("Region 10"), "HHS Region 10");
        assert_eq!(canonical_location("National"), NATIONAL);
        assert_eq!(canonical_location("AL"), "AL");
    }

    #[test]
    fn truncation_masks_only_the_target_season() {
        let cal = SeasonCalendar::consecutive(2015, 2);
        let mut p = IliPanel::empty(vec!["AL".into()], cal);
        for s in 0..2 {
            for t in 0..35 {
                p.set(0, s, t, Some(0.01));
            }
        }
        let q = p.truncated(1, 5);
        assert_eq!(q.series(0, 0).iter().flatten().count(), 35);
        assert_eq!(q.series(0, 1).iter().flatten().count(), 5);
    }
}
