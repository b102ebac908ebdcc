//! Per-draw target values and their binned empirical distributions.

use super::bins::{BinScheme, TargetDistribution};
use super::targets::{compute_onset, compute_peak, round_tenth, TargetKind};
use crate::error::{DanteError, Result};
use crate::forecast::TrajectoryDraws;

/// Padded distributions of every target defined at this location: the four
/// week-ahead targets, peak week and intensity, and onset when a baseline
/// is given. Each draw's trajectory is the observed prefix spliced with its
/// predictive suffix, converted to percent and rounded to tenths. A draw
/// whose peak is tied across several weeks spreads its unit mass equally
/// over them.
pub fn target_distributions(
    traj: &TrajectoryDraws,
    loc: usize,
    nobs: usize,
    baseline: Option<f64>,
) -> Result<Vec<TargetDistribution>> {
    let nt = traj.n_weeks;
    if traj.n_draws == 0 {
        return Err(DanteError::Distribution("no trajectory draws".into()));
    }
    let paths: Vec<Vec<f64>> = (0..traj.n_draws)
        .map(|m| traj.path(loc, m).iter().map(|y| round_tenth(100.0 * y)).collect())
        .collect();
    let mut out = Vec::with_capacity(7);
    for n in 1..=4u8 {
        let t = nobs + n as usize - 1;
        if t >= nt {
            continue;
        }
        let kind = TargetKind::WeekAhead(n);
        let bins = paths.iter().map(|p| vec![(BinScheme::percent_bin(p[t]), 1.0)]);
        out.push(TargetDistribution::from_weighted_bins(kind, BinScheme::Percent, bins)?);
    }
    let peaks: Vec<(f64, Vec<usize>)> = paths
        .iter()
        .map(|p| compute_peak(p).expect("trajectories are non-empty"))
        .collect();
    out.push(TargetDistribution::from_weighted_bins(
        TargetKind::PeakIntensity,
        BinScheme::Percent,
        peaks.iter().map(|(v, _)| vec![(BinScheme::percent_bin(*v), 1.0)]),
    )?);
    let peak_scheme = BinScheme::for_kind(TargetKind::PeakWeek, nt);
    out.push(TargetDistribution::from_weighted_bins(
        TargetKind::PeakWeek,
        peak_scheme,
        peaks.iter().map(|(_, weeks)| {
            let share = 1.0 / weeks.len() as f64;
            weeks.iter().map(|&w| (BinScheme::week_bin(w), share)).collect()
        }),
    )?);
    if baseline.is_some() {
        let scheme = BinScheme::for_kind(TargetKind::Onset, nt);
        let none = scheme.none_bin().expect("onset has a none bin");
        let bins = paths
            .iter()
            .map(|p| compute_onset(p, baseline).map(|o| vec![(o.map_or(none, BinScheme::week_bin), 1.0)]))
            .collect::<Result<Vec<_>>>()?;
        out.push(TargetDistribution::from_weighted_bins(TargetKind::Onset, scheme, bins)?);
    }
    Ok(out.into_iter().map(|d| d.padded()).collect())
}
