//! Split R-hat and multi-chain effective sample size.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

pub const RHAT_WARNING: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamDiagnostics {
    pub name: String,
    /// Absent with a single chain.
    pub rhat: Option<f64>,
    pub ess: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub params: Vec<ParamDiagnostics>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    /// `chains[c][i]` is the flat parameter vector of draw `i` of chain `c`.
    pub fn compute(names: &[String], chains: &[Vec<Vec<f64>>]) -> Self {
        let mut params = Vec::with_capacity(names.len());
        let mut warnings = Vec::new();
        let mut planner = FftPlanner::new();
        for (j, name) in names.iter().enumerate() {
            let series: Vec<Vec<f64>> = chains
                .iter()
                .map(|c| c.iter().map(|draw| draw[j]).collect())
                .collect();
            let rhat = if chains.len() > 1 { split_rhat(&series) } else { None };
            let ess = effective_sample_size(&series, &mut planner);
            if let Some(r) = rhat.filter(|&r| r > RHAT_WARNING) {
                warnings.push(format!("{name}: R-hat {r:.3} exceeds {RHAT_WARNING}"));
            }
            params.push(ParamDiagnostics { name: name.clone(), rhat, ess });
        }
        Diagnostics { params, warnings }
    }

    pub fn max_rhat(&self) -> Option<f64> {
        self.params.iter().filter_map(|p| p.rhat).reduce(f64::max)
    }

    pub fn min_ess(&self) -> Option<f64> {
        self.params.iter().map(|p| p.ess).filter(|e| e.is_finite()).reduce(f64::min)
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Between/within variance ratio over chains of equal length `n`:
/// returns `(W, var_plus)`.
fn variance_components(chains: &[&[f64]]) -> (f64, f64) {
    let n = chains[0].len() as f64;
    let w = chains.iter().map(|c| sample_var(c)).sum::<f64>() / chains.len() as f64;
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let b_over_n = if chains.len() > 1 { sample_var(&means) } else { 0.0 };
    (w, (n - 1.0) / n * w + b_over_n)
}

/// Potential scale reduction with each chain split in half.
/// `None` for constant parameters or chains too short to split.
pub fn split_rhat(chains: &[Vec<f64>]) -> Option<f64> {
    let n = chains.iter().map(Vec::len).min()?;
    let half = n / 2;
    if half < 2 {
        return None;
    }
    let halves: Vec<&[f64]> = chains
        .iter()
        .flat_map(|c| [&c[..half], &c[n - half..n]])
        .collect();
    let (w, var_plus) = variance_components(&halves);
    (w > 0.0).then(|| (var_plus / w).sqrt())
}

fn autocovariance(x: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|v| Complex::new(v - m, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in &mut buf {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    buf.iter().take(n).map(|c| c.re / (len as f64 * n as f64)).collect()
}

/// Multi-chain ESS with Geyer's initial monotone positive sequence.
/// Constant series report the raw draw count.
pub fn effective_sample_size(chains: &[Vec<f64>], planner: &mut FftPlanner<f64>) -> f64 {
    let Some(n) = chains.iter().map(Vec::len).min() else {
        return 0.0;
    };
    let total = (n * chains.len()) as f64;
    if n < 4 {
        return total;
    }
    let trimmed: Vec<&[f64]> = chains.iter().map(|c| &c[..n]).collect();
    let (w, var_plus) = variance_components(&trimmed);
    if w <= 0.0 || var_plus <= 0.0 {
        return total;
    }
    let acov: Vec<Vec<f64>> = trimmed.iter().map(|c| autocovariance(c, planner)).collect();
    let rho = |lag: usize| {
        let mean_acov = acov.iter().map(|a| a[lag]).sum::<f64>() / acov.len() as f64;
        1.0 - (w - mean_acov) / var_plus
    };
    let mut tau = 0.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let head = if lag == 0 { 1.0 } else { rho(lag) };
        let mut pair = head + rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        pair = pair.min(prev_pair);
        tau += pair;
        prev_pair = pair;
        lag += 2;
    }
    let tau = (2.0 * tau - 1.0).max(1.0 / total.log10().max(1.0));
    total / tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn ar1(rng: &mut ChaCha8Rng, phi: f64, n: usize, offset: f64) -> Vec<f64> {
        let mut x = 0.0;
        (0..n)
            .map(|_| {
                let e: f64 = rng.sample(StandardNormal);
                x = phi * x + e;
                x + offset
            })
            .collect()
    }

    #[test]
    fn iid_chains_have_rhat_near_one_and_full_ess() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let chains: Vec<_> = (0..4).map(|_| ar1(&mut rng, 0.0, 2000, 0.0)).collect();
        let rhat = split_rhat(&chains).unwrap();
        assert!((rhat - 1.0).abs() < 0.01, "{rhat}");
        let ess = effective_sample_size(&chains, &mut FftPlanner::new());
        assert!(ess > 6500.0 && ess < 9500.0, "{ess}");
    }

    #[test]
    fn ar1_ess_matches_theory() {
        // ESS/N = (1 - phi) / (1 + phi) for an AR(1) chain.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let chains: Vec<_> = (0..4).map(|_| ar1(&mut rng, 0.8, 20_000, 0.0)).collect();
        let ess = effective_sample_size(&chains, &mut FftPlanner::new());
        let expected = 80_000.0 * 0.2 / 1.8;
        assert!((ess / expected - 1.0).abs() < 0.2, "{ess} vs {expected}");
    }

    #[test]
    fn disagreeing_chains_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ar1(&mut rng, 0.0, 500, 0.0);
        let b = ar1(&mut rng, 0.0, 500, 3.0);
        let to_draws = |c: &Vec<f64>| c.iter().map(|&v| vec![v]).collect::<Vec<_>>();
        let d = Diagnostics::compute(&["x".into()], &[to_draws(&a), to_draws(&b)]);
        assert!(d.params[0].rhat.unwrap() > 1.5);
        assert_eq!(d.warnings.len(), 1);
    }

    #[test]
    fn single_chain_has_no_rhat() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<Vec<f64>> = ar1(&mut rng, 0.0, 100, 0.0).into_iter().map(|v| vec![v]).collect();
        let d = Diagnostics::compute(&["x".into()], &[a]);
        assert!(d.params[0].rhat.is_none());
        assert!(d.params[0].ess > 0.0);
    }
}
