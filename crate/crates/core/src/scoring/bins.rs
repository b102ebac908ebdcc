//! Binned target distributions.

use serde::{Deserialize, Serialize};

use super::targets::TargetKind;
use crate::error::{DanteError, Result};

/// Number of 0.1-percent bins: `[0.0, 0.1)` through `[12.9, 13.0)` plus `[13.0, 100]`.
pub const PERCENT_BINS: usize = 131;
pub const PERCENT_BIN_WIDTH: f64 = 0.1;
pub const WEEK_PAD: f64 = 0.00018;
pub const PERCENT_PAD: f64 = 0.00005;
/// Bins on either side of the truth counted by the percent-target score.
pub const PERCENT_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinScheme {
    Percent,
    /// One bin per week of the season; onset adds a trailing `none` bin.
    Weeks { n_weeks: usize, with_none: bool },
}

impl BinScheme {
    pub fn for_kind(kind: TargetKind, n_weeks: usize) -> Self {
        match kind {
            TargetKind::Onset => BinScheme::Weeks { n_weeks, with_none: true },
            TargetKind::PeakWeek => BinScheme::Weeks { n_weeks, with_none: false },
            _ => BinScheme::Percent,
        }
    }

    pub fn n_bins(self) -> usize {
        match self {
            BinScheme::Percent => PERCENT_BINS,
            BinScheme::Weeks { n_weeks, with_none } => n_weeks + usize::from(with_none),
        }
    }

    pub fn pad(self) -> f64 {
        match self {
            BinScheme::Percent => PERCENT_PAD,
            BinScheme::Weeks { .. } => WEEK_PAD,
        }
    }

    /// Width of one bin in target units.
    pub fn bin_width(self) -> f64 {
        match self {
            BinScheme::Percent => PERCENT_BIN_WIDTH,
            BinScheme::Weeks { .. } => 1.0,
        }
    }

    pub fn none_bin(self) -> Option<usize> {
        match self {
            BinScheme::Weeks { n_weeks, with_none: true } => Some(n_weeks),
            _ => None,
        }
    }

    /// Bin of a percentage already rounded to a tenth.
    pub fn percent_bin(value: f64) -> usize {
        ((value * 10.0).round().max(0.0) as usize).min(PERCENT_BINS - 1)
    }

    /// Bin of a 1-based week.
    pub fn week_bin(week: usize) -> usize {
        week - 1
    }

    /// Lower edge of a percent bin.
    pub fn percent_bin_start(bin: usize) -> f64 {
        bin as f64 / 10.0
    }

    /// Upper (excluded) edge of a percent bin; the last bin closes at 100.
    pub fn percent_bin_end(bin: usize) -> f64 {
        if bin + 1 == PERCENT_BINS {
            100.0
        } else {
            (bin + 1) as f64 / 10.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDistribution {
    pub kind: TargetKind,
    pub scheme: BinScheme,
    pub probs: Vec<f64>,
}

impl TargetDistribution {
    pub fn new(kind: TargetKind, scheme: BinScheme, probs: Vec<f64>) -> Result<Self> {
        let d = TargetDistribution { kind, scheme, probs };
        d.validate(1e-9)?;
        Ok(d)
    }

    /// All mass on one bin.
    pub fn point_mass(kind: TargetKind, scheme: BinScheme, bin: usize) -> Self {
        let mut probs = vec![0.0; scheme.n_bins()];
        probs[bin] = 1.0;
        TargetDistribution { kind, scheme, probs }
    }

    /// Empirical distribution of per-draw bin weights. Each draw contributes
    /// a total weight of one, split over its entries.
    pub fn from_weighted_bins(
        kind: TargetKind,
        scheme: BinScheme,
        draws: impl IntoIterator<Item = Vec<(usize, f64)>>,
    ) -> Result<Self> {
        let mut probs = vec![0.0; scheme.n_bins()];
        let mut n = 0usize;
        for entries in draws {
            for (bin, w) in entries {
                probs[bin] += w;
            }
            n += 1;
        }
        if n == 0 {
            return Err(DanteError::Distribution(format!("{kind}: no draws")));
        }
        for p in &mut probs {
            *p /= n as f64;
        }
        Self::new(kind, scheme, probs)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn validate(&self, tolerance: f64) -> Result<()> {
        if self.probs.len() != self.scheme.n_bins() {
            return Err(DanteError::Distribution(format!(
                "{}: {} bins where the scheme has {}",
                self.kind,
                self.probs.len(),
                self.scheme.n_bins()
            )));
        }
        if self.probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(DanteError::Distribution(format!("{}: negative or non-finite probability", self.kind)));
        }
        let total = self.total();
        if (total - 1.0).abs() > tolerance {
            return Err(DanteError::Distribution(format!("{}: probabilities sum to {total}", self.kind)));
        }
        Ok(())
    }

    /// Raises every bin to at least the scheme's floor, then renormalizes.
    pub fn padded(&self) -> Self {
        let pad = self.scheme.pad();
        let raised: Vec<f64> = self.probs.iter().map(|p| p.max(pad)).collect();
        let total: f64 = raised.iter().sum();
        TargetDistribution {
            kind: self.kind,
            scheme: self.scheme,
            probs: raised.into_iter().map(|p| p / total).collect(),
        }
    }

    /// Percent targets: probability-weighted mean of bin midpoints (the last
    /// bin counts at 13.05). Week targets: the modal bin's week, earliest on
    /// ties; `None` when the mode is the `none` bin.
    pub fn point(&self) -> Option<f64> {
        match self.scheme {
            BinScheme::Percent => Some(
                self.probs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p * (BinScheme::percent_bin_start(i) + 0.05))
                    .sum::<f64>()
                    / self.total(),
            ),
            BinScheme::Weeks { .. } => {
                let mode = self.mode();
                (Some(mode) != self.scheme.none_bin()).then(|| (mode + 1) as f64)
            }
        }
    }

    /// Index of the most probable bin, earliest on ties.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    /// Number of highest-probability bins needed to reach `level`, times the
    /// bin width. Bins are taken in descending probability, earlier bins
    /// first among equals.
    pub fn hpd_width(&self, level: f64) -> f64 {
        let mut order: Vec<usize> = (0..self.probs.len()).collect();
        order.sort_by(|&a, &b| self.probs[b].total_cmp(&self.probs[a]).then(a.cmp(&b)));
        let target = level * self.total() - 1e-12;
        let mut mass = 0.0;
        let mut count = 0;
        for i in order {
            if mass >= target && count > 0 {
                break;
            }
            mass += self.probs[i];
            count += 1;
        }
        count as f64 * self.scheme.bin_width()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(scheme: BinScheme) -> TargetDistribution {
        let n = scheme.n_bins();
        TargetDistribution::new(TargetKind::PeakIntensity, scheme, vec![1.0 / n as f64; n]).unwrap()
    }

    #[test]
    fn percent_bin_edges() {
        assert_eq!(BinScheme::percent_bin(0.0), 0);
        assert_eq!(BinScheme::percent_bin(2.5), 25);
        assert_eq!(BinScheme::percent_bin(12.9), 129);
        assert_eq!(BinScheme::percent_bin(13.0), 130);
        assert_eq!(BinScheme::percent_bin(47.3), 130);
        assert_eq!(BinScheme::percent_bin_end(130), 100.0);
        for k in 0..=130 {
            assert_eq!(BinScheme::percent_bin(k as f64 / 10.0), k);
        }
    }

    #[test]
    fn padding_keeps_uniform_uniform() {
        let u = uniform(BinScheme::Percent);
        let p = u.padded();
        for (a, b) in u.probs.iter().zip(&p.probs) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn padding_floor() {
        let scheme = BinScheme::Weeks { n_weeks: 35, with_none: true };
        let d = TargetDistribution::point_mass(TargetKind::Onset, scheme, 3).padded();
        assert!(d.probs.iter().all(|&p| p >= WEEK_PAD / 1.01));
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hpd_examples() {
        let pm = TargetDistribution::point_mass(TargetKind::WeekAhead(1), BinScheme::Percent, 20);
        assert!((pm.hpd_width(0.9) - 0.1).abs() < 1e-12);
        assert!((uniform(BinScheme::Percent).hpd_width(0.9) - 11.8).abs() < 1e-9);
        let mut probs = vec![0.0; PERCENT_BINS];
        probs[10] = 0.5;
        probs[40] = 0.5;
        let bimodal = TargetDistribution::new(TargetKind::WeekAhead(1), BinScheme::Percent, probs).unwrap();
        assert!((bimodal.hpd_width(0.9) - 0.2).abs() < 1e-12);
        assert!((uniform(BinScheme::Percent).hpd_width(1.0) - 13.1).abs() < 1e-9);
    }

    #[test]
    fn point_predictions() {
        let pm = TargetDistribution::point_mass(TargetKind::WeekAhead(1), BinScheme::Percent, 20);
        assert!((pm.point().unwrap() - 2.05).abs() < 1e-12);
        let mut probs = vec![0.0; PERCENT_BINS];
        probs[20] = 0.5;
        probs[30] = 0.5;
        let split = TargetDistribution::new(TargetKind::WeekAhead(1), BinScheme::Percent, probs).unwrap();
        assert!((split.point().unwrap() - 2.55).abs() < 1e-12);
        let scheme = BinScheme::Weeks { n_weeks: 10, with_none: true };
        let mut w = vec![0.05; 11];
        w[4] = 0.275;
        w[7] = 0.275;
        let d = TargetDistribution::new(TargetKind::Onset, scheme, w).unwrap();
        assert_eq!(d.point(), Some(5.0));
        let none = TargetDistribution::point_mass(TargetKind::Onset, scheme, 10);
        assert_eq!(none.point(), None);
    }

    #[test]
    fn rejects_unnormalized() {
        let r = TargetDistribution::new(TargetKind::WeekAhead(1), BinScheme::Percent, vec![0.5; PERCENT_BINS]);
        assert!(matches!(r, Err(DanteError::Distribution(_))));
    }
}
