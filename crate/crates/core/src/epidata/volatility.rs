//! Average standardized week-to-week volatility.

use serde::Serialize;

use super::ilinet::RawIliRow;
use super::panel::IliPanel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolatilityReport {
    pub regions: Vec<String>,
    pub seasons: Vec<i32>,
    /// `[region][season]`; `None` for degenerate seasons.
    pub v_rs: Vec<Vec<Option<f64>>>,
    /// Mean of the non-degenerate `v_rs` of each region.
    pub v_r: Vec<Option<f64>>,
    /// Mean weekly patient count per region, when raw rows were supplied.
    pub patient_means: Vec<Option<f64>>,
}

/// Root-mean-square of first differences over consecutive present weeks.
pub fn successive_difference_rms(series: &[Option<f64>]) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for pair in series.windows(2) {
        if let [Some(a), Some(b)] = pair {
            sum += (b - a).powi(2);
            n += 1;
        }
    }
    (n > 0).then(|| (sum / n as f64).sqrt())
}

/// Volatility of one season after centering and scaling to unit sample
/// standard deviation. `None` with fewer than two present weeks or zero spread.
pub fn season_volatility(series: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = series.iter().flatten().copied().collect();
    if present.len() < 2 {
        return None;
    }
    let n = present.len() as f64;
    let mean = present.iter().sum::<f64>() / n;
    let var = present.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > f64::EPSILON * mean.abs().max(1.0)) {
        return None;
    }
    let standardized: Vec<Option<f64>> = series.iter().map(|v| v.map(|y| (y - mean) / sd)).collect();
    successive_difference_rms(&standardized)
}

pub fn standardized_volatility(panel: &IliPanel) -> VolatilityReport {
    let mut v_rs = Vec::with_capacity(panel.n_regions());
    let mut v_r = Vec::with_capacity(panel.n_regions());
    for r in 0..panel.n_regions() {
        let row: Vec<Option<f64>> = (0..panel.n_seasons())
            .map(|s| season_volatility(panel.series(r, s)))
            .collect();
        let used: Vec<f64> = row.iter().flatten().copied().collect();
        v_r.push((!used.is_empty()).then(|| used.iter().sum::<f64>() / used.len() as f64));
        v_rs.push(row);
    }
    VolatilityReport {
        regions: panel.region_names.clone(),
        seasons: panel.season_labels().to_vec(),
        v_rs,
        v_r,
        patient_means: vec![None; panel.n_regions()],
    }
}

impl VolatilityReport {
    pub fn with_patient_means(mut self, rows: &[RawIliRow]) -> Self {
        self.patient_means = self
            .regions
            .iter()
            .map(|region| {
                let counts: Vec<f64> = rows
                    .iter()
                    .filter(|row| &row.region_id == region)
                    .filter_map(|row| row.total_patients)
                    .map(|n| n as f64)
                    .collect();
                (!counts.is_empty()).then(|| counts.iter().sum::<f64>() / counts.len() as f64)
            })
            .collect();
        self
    }
}
