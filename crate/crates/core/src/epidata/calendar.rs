use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

/// First day (a Sunday) of MMWR week 1 in `year`: the week containing 4 January.
fn mmwr_year_start(year: i32) -> NaiveDate {
    let jan4 = NaiveDate::from_ymd_opt(year, 1, 4).expect("4 January exists");
    let back = jan4.weekday().num_days_from_sunday() as i64;
    jan4 - Duration::days(back)
}

/// Number of MMWR epiweeks (52 or 53) in `year`.
pub fn weeks_in_year(year: i32) -> u32 {
    let days = (mmwr_year_start(year + 1) - mmwr_year_start(year)).num_days();
    (days / 7) as u32
}

/// Sunday that starts the given epiweek.
pub fn epiweek_start(year: i32, week: u32) -> NaiveDate {
    mmwr_year_start(year) + Duration::weeks(week as i64 - 1)
}

/// `(year, week)` of the epiweek containing `date`.
pub fn epiweek_of(date: NaiveDate) -> (i32, u32) {
    let sunday = date - Duration::days(date.weekday().num_days_from_sunday() as i64);
    debug_assert_eq!(sunday.weekday(), Weekday::Sun);
    let mut year = date.year() + 1;
    while mmwr_year_start(year) > sunday {
        year -= 1;
    }
    let week = (sunday - mmwr_year_start(year)).num_weeks() as u32 + 1;
    (year, week)
}

/// Maps `(season, week-of-season)` onto calendar epiweeks.
///
/// Week-of-season `t` is 1-based and counts epiweeks elapsed since the start
/// epiweek (inclusive), so in a 53-week year epiweek 53 occupies its own slot
/// and the season ends one epiweek earlier in the following year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonCalendar {
    pub start_epiweek: u32,
    pub weeks_per_season: usize,
    /// Calendar year in which each season starts, e.g. 2010 for 2010/11.
    pub season_years: Vec<i32>,
}

impl SeasonCalendar {
    pub const DEFAULT_START_EPIWEEK: u32 = 40;
    pub const DEFAULT_WEEKS: usize = 35;

    pub fn new(season_years: Vec<i32>) -> Self {
        SeasonCalendar {
            start_epiweek: Self::DEFAULT_START_EPIWEEK,
            weeks_per_season: Self::DEFAULT_WEEKS,
            season_years,
        }
    }

    /// Seasons `first..first + n`.
    pub fn consecutive(first_year: i32, n: usize) -> Self {
        Self::new((0..n as i32).map(|k| first_year + k).collect())
    }

    pub fn with_season_shape(mut self, start_epiweek: u32, weeks: usize) -> Self {
        self.start_epiweek = start_epiweek;
        self.weeks_per_season = weeks;
        self
    }

    pub fn n_seasons(&self) -> usize {
        self.season_years.len()
    }

    pub fn season_index(&self, season_year: i32) -> Option<usize> {
        self.season_years.iter().position(|&y| y == season_year)
    }

    /// Calendar `(year, epiweek)` of week-of-season `t` (1-based) for a season
    /// starting in `season_year`.
    pub fn to_epiweek(&self, season_year: i32, t: usize) -> (i32, u32) {
        assert!(t >= 1, "week of season is 1-based");
        let raw = self.start_epiweek + t as u32 - 1;
        let first = weeks_in_year(season_year);
        if raw <= first {
            (season_year, raw)
        } else {
            (season_year + 1, raw - first)
        }
    }

    /// Inverse of [`to_epiweek`](Self::to_epiweek): the season start year and
    /// 1-based week-of-season, or `None` when the epiweek falls outside every
    /// season window of length `weeks_per_season`.
    pub fn from_epiweek(&self, year: i32, week: u32) -> Option<(i32, usize)> {
        if week == 0 || week > weeks_in_year(year) {
            return None;
        }
        let (season_year, t) = if week >= self.start_epiweek {
            (year, (week - self.start_epiweek + 1) as usize)
        } else {
            let prev = weeks_in_year(year - 1);
            (year - 1, (prev - self.start_epiweek + 1 + week) as usize)
        };
        (t >= 1 && t <= self.weeks_per_season).then_some((season_year, t))
    }

    /// Like [`from_epiweek`](Self::from_epiweek) but resolved to a season index.
    pub fn locate(&self, year: i32, week: u32) -> Option<(usize, usize)> {
        let (season_year, t) = self.from_epiweek(year, week)?;
        Some((self.season_index(season_year)?, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_53_week_years() {
        for year in [2008, 2014, 2020] {
            assert_eq!(weeks_in_year(year), 53, "{year}");
        }
        for year in [2010, 2011, 2012, 2013, 2015, 2016, 2017, 2018, 2019] {
            assert_eq!(weeks_in_year(year), 52, "{year}");
        }
    }

    #[test]
    fn epiweek_roundtrip_on_known_dates() {
        // 2017-12-03 opens EW49 of 2017.
        let d = NaiveDate::from_ymd_opt(2017, 12, 3).unwrap();
        assert_eq!(epiweek_of(d), (2017, 49));
        assert_eq!(epiweek_start(2017, 49), d);
        // 2015-01-03 is the last day of EW53 of 2014.
        let d = NaiveDate::from_ymd_opt(2015, 1, 3).unwrap();
        assert_eq!(epiweek_of(d), (2014, 53));
    }

    #[test]
    fn first_week_is_epiweek_40() {
        let cal = SeasonCalendar::consecutive(2010, 8);
        assert_eq!(cal.to_epiweek(2015, 1), (2015, 40));
        assert_eq!(cal.locate(2015, 40), Some((5, 1)));
    }

    #[test]
    fn last_week_wraps_into_next_year() {
        let cal = SeasonCalendar::consecutive(2010, 8);
        // 52-week year: 40 + 34 - 52 = 22.
        assert_eq!(cal.to_epiweek(2015, 35), (2016, 22));
        // 53-week 2014: EW53 takes t = 14 and the season ends at EW21.
        assert_eq!(cal.to_epiweek(2014, 14), (2014, 53));
        assert_eq!(cal.to_epiweek(2014, 35), (2015, 21));
        assert_eq!(cal.from_epiweek(2015, 22), None);
        assert_eq!(cal.from_epiweek(2016, 22), Some((2015, 35)));
        assert_eq!(cal.from_epiweek(2016, 23), None);
        assert_eq!(cal.from_epiweek(2015, 39), None);
    }

    #[test]
    fn calendar_roundtrips_every_week() {
        let cal = SeasonCalendar::consecutive(2010, 12);
        for &year in &cal.season_years {
            for t in 1..=cal.weeks_per_season {
                let (y, w) = cal.to_epiweek(year, t);
                assert_eq!(cal.from_epiweek(y, w), Some((year, t)));
            }
        }
    }
}
