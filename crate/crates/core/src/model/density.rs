//! Log-densities and samplers for the distributions used by the model.
//!
//! The t distribution is parameterized by location, *precision* and degrees of
//! freedom; Normal by mean and variance; Gamma by shape and rate.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn ln_normal(x: f64, mean: f64, var: f64) -> f64 {
    if !(var > 0.0) {
        return f64::NEG_INFINITY;
    }
    let d = x - mean;
    -LN_SQRT_2PI - 0.5 * var.ln() - 0.5 * d * d / var
}

/// Normal(0, 1/precision) restricted to `[0, ∞)`.
pub fn ln_half_normal(x: f64, precision: f64) -> f64 {
    if x < 0.0 || !(precision > 0.0) {
        return f64::NEG_INFINITY;
    }
    LN_2 + ln_normal(x, 0.0, 1.0 / precision)
}

pub fn ln_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

pub fn ln_beta_fn(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Beta log-density from `ln x` and `ln(1 - x)`, stable near the boundaries.
pub fn ln_beta_pdf_logs(ln_x: f64, ln_1mx: f64, a: f64, b: f64) -> f64 {
    (a - 1.0) * ln_x + (b - 1.0) * ln_1mx - ln_beta_fn(a, b)
}

pub fn ln_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) || !(a > 0.0 && b > 0.0) {
        return f64::NEG_INFINITY;
    }
    ln_beta_pdf_logs(x.ln(), (-x).ln_1p(), a, b)
}

/// Non-standardized t with location `mu`, precision `lambda`, `k` dof.
pub fn ln_t(x: f64, mu: f64, lambda: f64, k: f64) -> f64 {
    if !(lambda > 0.0) {
        return f64::NEG_INFINITY;
    }
    let d = x - mu;
    ln_gamma(0.5 * (k + 1.0)) - ln_gamma(0.5 * k) + 0.5 * (lambda / (k * PI)).ln()
        - 0.5 * (k + 1.0) * (lambda * d * d / k).ln_1p()
}

/// `P(0 < X <= upper)` for `X ~ t(0, lambda, k)`.
pub fn t_mass_from_zero(upper: f64, lambda: f64, k: f64) -> f64 {
    if !(upper > 0.0) {
        return 0.0;
    }
    if upper.is_infinite() {
        return 0.5;
    }
    let z2 = lambda * upper * upper;
    let x = z2 / (k + z2);
    if x >= 1.0 {
        return 0.5;
    }
    0.5 * beta_reg(0.5, 0.5 * k, x)
}

/// t(0, lambda, k) folded onto `[0, ∞)`.
pub fn ln_half_t(x: f64, lambda: f64, k: f64) -> f64 {
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    LN_2 + ln_t(x, 0.0, lambda, k)
}

/// t(0, lambda, k) truncated to `[0, upper]`, normalized by its mass there.
pub fn ln_truncated_t(x: f64, lambda: f64, k: f64, upper: f64) -> f64 {
    if x < 0.0 || x > upper {
        return f64::NEG_INFINITY;
    }
    let mass = t_mass_from_zero(upper, lambda, k);
    if !(mass > 0.0) {
        return f64::NEG_INFINITY;
    }
    ln_t(x, 0.0, lambda, k) - mass.ln()
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, var: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    mean + var.sqrt() * z
}

pub fn sample_half_normal<R: Rng + ?Sized>(rng: &mut R, precision: f64) -> f64 {
    sample_normal(rng, 0.0, 1.0 / precision).abs()
}

pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> f64 {
    Gamma::new(shape, 1.0 / rate)
        .expect("positive gamma parameters")
        .sample(rng)
}

/// `ln G` for `G ~ Gamma(shape, 1)`, exact for shapes far below one.
pub fn sample_ln_gamma_unit<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape >= 1.0 {
        return sample_gamma(rng, shape, 1.0).ln();
    }
    let boosted = sample_gamma(rng, shape + 1.0, 1.0).ln();
    let u: f64 = rng.random::<f64>();
    boosted + (1.0 - u).ln() / shape
}

/// Draws `X ~ Beta(a, b)` and returns `(ln X, ln(1 - X))` without underflow.
pub fn sample_beta_logs<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> (f64, f64) {
    let ga = sample_ln_gamma_unit(rng, a);
    let gb = sample_ln_gamma_unit(rng, b);
    let total = log_add_exp(ga, gb);
    (ga - total, gb - total)
}

/// Draws strictly inside `(0, 1)`.
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    loop {
        let (ln_x, _) = sample_beta_logs(rng, a, b);
        let x = ln_x.exp();
        if x > 0.0 && x < 1.0 {
            return x;
        }
    }
}

pub fn sample_t<R: Rng + ?Sized>(rng: &mut R, lambda: f64, k: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    let chi2 = sample_gamma(rng, 0.5 * k, 0.5);
    z / (chi2 / k).sqrt() / lambda.sqrt()
}

pub fn sample_half_t<R: Rng + ?Sized>(rng: &mut R, lambda: f64, k: f64) -> f64 {
    sample_t(rng, lambda, k).abs()
}

/// t(0, lambda, k) restricted to `[0, upper]` by inverting its CDF.
pub fn sample_truncated_t<R: Rng + ?Sized>(rng: &mut R, lambda: f64, k: f64, upper: f64) -> f64 {
    let total = t_mass_from_zero(upper, lambda, k);
    let target = rng.random::<f64>() * total;
    let (mut lo, mut hi) = (0.0, upper);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_mass_from_zero(mid, lambda, k) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn half_t_at_zero_doubles_student_t() {
        // Student t(3) density at 0 is Γ(2)/(Γ(1.5)√(3π)).
        let student0 = (ln_gamma(2.0) - ln_gamma(1.5) - 0.5 * (3.0 * PI).ln()).exp();
        assert!((ln_half_t(0.0, 1.0, 3.0) - (LN_2 + student0.ln())).abs() < 1e-13);
    }

    #[test]
    fn t3_mass_matches_closed_form() {
        for &x in &[0.01, 0.3, 1.0, 2.5, 40.0] {
            let closed = (x / (3f64.sqrt() * (1.0 + x * x / 3.0)) + (x / 3f64.sqrt()).atan()) / PI;
            assert!((t_mass_from_zero(x, 1.0, 3.0) - closed).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn support_violations_are_neg_infinite() {
        assert_eq!(ln_half_normal(-1e-9, 1.0), f64::NEG_INFINITY);
        assert_eq!(ln_truncated_t(2.0, 1.0, 3.0, 1.0), f64::NEG_INFINITY);
        assert_eq!(ln_gamma_pdf(0.0, 5.0, 5.0), f64::NEG_INFINITY);
        assert_eq!(ln_beta_pdf(1.0, 2.0, 2.0), f64::NEG_INFINITY);
    }

    #[test]
    fn logistic_is_stable_and_inverts_logit() {
        assert_eq!(logistic(0.0), 0.5);
        assert!(logistic(-800.0) > 0.0 || logistic(-800.0) == 0.0);
        assert!((logistic(logit(0.02)) - 0.02).abs() < 1e-15);
        assert!(logistic(1.0) < logistic(1.0 + 1e-9));
    }

    #[test]
    fn log_space_beta_handles_tiny_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let (lx, l1x) = sample_beta_logs(&mut rng, 1e-3, 1.0);
            assert!(lx.is_finite() && l1x.is_finite() && lx <= 0.0 && l1x <= 0.0);
        }
    }

    #[test]
    fn truncated_t_draws_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x = sample_truncated_t(&mut rng, 2.0, 3.0, 0.05);
            assert!((0.0..=0.05).contains(&x));
        }
    }
}
