//! Census population weights for bottom-up aggregation.

use std::path::Path;

use serde::Deserialize;

use crate::error::{DanteError, Result};

pub const NATIONAL: &str = "US National";

pub fn region_location(number: u8) -> String {
    format!("HHS Region {number}")
}

/// Weights `w[r][ρ]` of each state `r` in each aggregate location `ρ`.
///
/// Aggregate columns are the HHS regions that have at least one member state,
/// in region-number order, followed by the national column.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub states: Vec<String>,
    pub state_regions: Vec<u8>,
    pub populations: Vec<f64>,
    pub locations: Vec<String>,
    /// Row-major `[state][location]`.
    w: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct WeightRow {
    state: String,
    hhs_region: String,
    population: f64,
}

fn parse_region_number(text: &str) -> Option<u8> {
    let digits: String = text.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.parse().ok().filter(|n| (1..=10).contains(n))
}

impl WeightMatrix {
    /// Builds weights proportional to population within each region and
    /// within the nation. State order is preserved and is the canonical
    /// summation order for aggregation.
    pub fn from_populations(entries: &[(String, u8, f64)]) -> Result<Self> {
        if entries.is_empty() {
            return Err(DanteError::Weights("no states".into()));
        }
        for (state, region, pop) in entries {
            if !(pop.is_finite() && *pop > 0.0) {
                return Err(DanteError::Weights(format!(
                    "state {state} has non-positive population {pop}"
                )));
            }
            if !(1..=10).contains(region) {
                return Err(DanteError::Weights(format!(
                    "state {state} has invalid HHS region {region}"
                )));
            }
        }
        for (i, (a, ..)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(b, ..)| a == b) {
                return Err(DanteError::Weights(format!("state {a} listed twice")));
            }
        }
        let mut regions: Vec<u8> = entries.iter().map(|e| e.1).collect();
        regions.sort_unstable();
        regions.dedup();

        let mut locations: Vec<String> = regions.iter().map(|&n| region_location(n)).collect();
        locations.push(NATIONAL.to_string());
        let n_loc = locations.len();

        let mut w = vec![0.0; entries.len() * n_loc];
        for (col, &region) in regions.iter().enumerate() {
            let total: f64 = entries.iter().filter(|e| e.1 == region).map(|e| e.2).sum();
            for (r, e) in entries.iter().enumerate() {
                if e.1 == region {
                    w[r * n_loc + col] = e.2 / total;
                }
            }
        }
        let total: f64 = entries.iter().map(|e| e.2).sum();
        for (r, e) in entries.iter().enumerate() {
            w[r * n_loc + n_loc - 1] = e.2 / total;
        }

        let matrix = WeightMatrix {
            states: entries.iter().map(|e| e.0.clone()).collect(),
            state_regions: entries.iter().map(|e| e.1).collect(),
            populations: entries.iter().map(|e| e.2).collect(),
            locations,
            w,
        };
        matrix.validate()?;
        Ok(matrix)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn weight(&self, state: usize, location: usize) -> f64 {
        self.w[state * self.n_locations() + location]
    }

    pub fn is_member(&self, state: usize, location: usize) -> bool {
        self.weight(state, location) > 0.0
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn column(&self, location: usize) -> Vec<f64> {
        (0..self.n_states()).map(|r| self.weight(r, location)).collect()
    }

    /// Checks non-negativity and that every column sums to one within 1e-9.
    pub fn validate(&self) -> Result<()> {
        for (loc, name) in self.locations.iter().enumerate() {
            let mut sum = 0.0;
            for r in 0..self.n_states() {
                let w = self.weight(r, loc);
                if !(w >= 0.0) {
                    return Err(DanteError::Weights(format!("negative weight in {name}")));
                }
                sum += w;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(DanteError::Weights(format!(
                    "column {name} sums to {sum}, not 1"
                )));
            }
        }
        Ok(())
    }
}

/// Reads a `state,hhs_region,population` CSV.
pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DanteError::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;
    let mut entries = Vec::new();
    for record in rdr.deserialize::<WeightRow>() {
        let row = record.map_err(|e| DanteError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let region = parse_region_number(&row.hhs_region).ok_or_else(|| {
            DanteError::Weights(format!("state {}: bad region `{}`", row.state, row.hhs_region))
        })?;
        entries.push((row.state, region, row.population));
    }
    WeightMatrix::from_populations(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn hhs9() -> WeightMatrix {
        WeightMatrix::from_populations(&[
            ("AZ".into(), 9, 6_407_774.0),
            ("CA".into(), 9, 37_320_903.0),
            ("HI".into(), 9, 1_363_963.0),
            ("NV".into(), 9, 2_702_464.0),
            ("OR".into(), 10, 3_831_074.0),
        ])
        .unwrap()
    }

    #[test]
    fn hhs9_census_weights() {
        let m = hhs9();
        let col = m.location_index("HHS Region 9").unwrap();
        let expected = [0.134, 0.781, 0.029, 0.057];
        for (r, e) in expected.iter().enumerate() {
            assert!((m.weight(r, col) - e).abs() < 5e-4, "{}", m.states[r]);
        }
        assert_eq!(m.weight(4, col), 0.0);
        assert!(!m.is_member(4, col));
    }

    #[test]
    fn single_state_region_has_unit_weight() {
        let m = hhs9();
        let col = m.location_index("HHS Region 10").unwrap();
        assert_eq!(m.weight(4, col), 1.0);
    }

    #[test]
    fn columns_sum_to_one_and_national_covers_regions() {
        let m = hhs9();
        m.validate().unwrap();
        let nat = m.location_index(NATIONAL).unwrap();
        for loc in 0..m.n_locations() {
            for r in 0..m.n_states() {
                if m.is_member(r, loc) {
                    assert!(m.is_member(r, nat));
                }
            }
        }
    }

    #[test]
    fn zero_population_is_fatal() {
        let err = WeightMatrix::from_populations(&[("AZ".into(), 9, 0.0)]).unwrap_err();
        assert!(matches!(err, DanteError::Weights(_)));
    }

    #[test]
    fn region_labels() {
        assert_eq!(parse_region_number("HHS Region 9"), Some(9));
        assert_eq!(parse_region_number("10"), Some(10));
        assert_eq!(parse_region_number("Region 11"), None);
    }

    #[test]
    fn loads_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        std::fs::write(&path, "state,hhs_region,population\nAZ,9,6407774\nCA,HHS9,37320903\n").unwrap();
        let m = load_weights(&path).unwrap();
        assert_eq!(m.locations, vec!["HHS Region 9".to_string(), NATIONAL.to_string()]);
    }
}
