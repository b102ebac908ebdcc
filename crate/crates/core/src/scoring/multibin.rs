//! CDC multibin log score.

use std::collections::BTreeSet;

use super::bins::{BinScheme, TargetDistribution, PERCENT_BINS, PERCENT_WINDOW};
use super::targets::TruthValue;
use crate::error::{DanteError, Result};

/// Log scores below this are clamped.
pub const LOG_SCORE_FLOOR: f64 = -10.0;

/// Bins whose probability counts toward the score for `truth`.
pub fn scoring_bins(scheme: BinScheme, truth: &TruthValue) -> Result<BTreeSet<usize>> {
    match (scheme, truth) {
        (BinScheme::Percent, TruthValue::Percent(v)) => {
            let centre = BinScheme::percent_bin(*v);
            let lo = centre.saturating_sub(PERCENT_WINDOW);
            let hi = (centre + PERCENT_WINDOW).min(PERCENT_BINS - 1);
            Ok((lo..=hi).collect())
        }
        (BinScheme::Weeks { n_weeks, .. }, TruthValue::Weeks(weeks)) => {
            let mut out = BTreeSet::new();
            for &w in weeks {
                if w == 0 || w > n_weeks {
                    return Err(DanteError::UndefinedTarget(format!("week {w} outside the season")));
                }
                for u in w.saturating_sub(1).max(1)..=(w + 1).min(n_weeks) {
                    out.insert(BinScheme::week_bin(u));
                }
            }
            Ok(out)
        }
        (BinScheme::Weeks { .. }, TruthValue::NoOnset) => scheme
            .none_bin()
            .map(|b| BTreeSet::from([b]))
            .ok_or_else(|| DanteError::UndefinedTarget("no `none` bin for this target".into())),
        _ => Err(DanteError::UndefinedTarget(format!(
            "truth {truth:?} does not fit bin scheme {scheme:?}"
        ))),
    }
}

/// Probability mass in the scoring window of `truth` (the skill).
pub fn multibin_score(dist: &TargetDistribution, truth: &TruthValue) -> Result<f64> {
    let bins = scoring_bins(dist.scheme, truth)?;
    Ok(bins.iter().map(|&b| dist.probs[b]).sum::<f64>().min(1.0))
}

/// `max(ln skill, -10)`.
pub fn log_skill(skill: f64) -> f64 {
    if skill > 0.0 {
        skill.ln().max(LOG_SCORE_FLOOR)
    } else {
        LOG_SCORE_FLOOR
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::targets::TargetKind;

    #[test]
    fn percent_windows() {
        let bins = scoring_bins(BinScheme::Percent, &TruthValue::Percent(2.5)).unwrap();
        assert_eq!(bins, (20..=30).collect());
        let bins = scoring_bins(BinScheme::Percent, &TruthValue::Percent(0.3)).unwrap();
        assert_eq!(bins, (0..=8).collect());
        let bins = scoring_bins(BinScheme::Percent, &TruthValue::Percent(12.8)).unwrap();
        assert_eq!(bins, (123..=130).collect());
    }

    #[test]
    fn multiple_peaks_union() {
        let scheme = BinScheme::Weeks { n_weeks: 35, with_none: false };
        let a = scoring_bins(scheme, &TruthValue::Weeks(vec![3])).unwrap();
        let b = scoring_bins(scheme, &TruthValue::Weeks(vec![5])).unwrap();
        let both = scoring_bins(scheme, &TruthValue::Weeks(vec![3, 5])).unwrap();
        assert_eq!(both, a.union(&b).copied().collect());
        assert_eq!(both.len(), 5);
        let edge = scoring_bins(scheme, &TruthValue::Weeks(vec![1])).unwrap();
        assert_eq!(edge, BTreeSet::from([0, 1]));
    }

    #[test]
    fn none_only_when_truth_is_none() {
        let scheme = BinScheme::Weeks { n_weeks: 35, with_none: true };
        assert_eq!(scoring_bins(scheme, &TruthValue::NoOnset).unwrap(), BTreeSet::from([35]));
        assert!(!scoring_bins(scheme, &TruthValue::Weeks(vec![35])).unwrap().contains(&35));
        let peak = BinScheme::Weeks { n_weeks: 35, with_none: false };
        assert!(scoring_bins(peak, &TruthValue::NoOnset).is_err());
    }

    #[test]
    fn uniform_interior_score() {
        let n = PERCENT_BINS;
        let d = TargetDistribution::new(TargetKind::WeekAhead(1), BinScheme::Percent, vec![1.0 / n as f64; n])
            .unwrap();
        let s = multibin_score(&d, &TruthValue::Percent(5.0)).unwrap();
        assert!((s - 11.0 / 131.0).abs() < 1e-12);
    }

    #[test]
    fn floor() {
        assert_eq!(log_skill(0.0), -10.0);
        assert_eq!(log_skill(1e-9), -10.0);
        assert_eq!(log_skill(1.0), 0.0);
    }
}
