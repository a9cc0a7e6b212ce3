//! Densities shared by the step-function and B-spline rate priors.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Gamma distribution in shape/rate form (mean `shape / rate`).
///
/// A zero rate is accepted and denotes the improper limit whose density
/// kernel is `x^(shape - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::InvalidParameter { name: "gamma shape", value: shape });
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter { name: "gamma rate", value: rate });
        }
        Ok(Self { shape, rate })
    }

    pub fn is_proper(&self) -> bool {
        self.rate > 0.0
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        gamma_ln_density(x, self.shape, self.rate)
    }

    pub fn mean(&self) -> Option<f64> {
        self.is_proper().then(|| self.shape / self.rate)
    }
}

/// Log density of Gamma(shape, rate) at `x`; the rate-zero limit drops the
/// normalizing constant and the exponential factor.
pub fn gamma_ln_density(x: f64, shape: f64, rate: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return f64::NEG_INFINITY;
    }
    let kernel = (shape - 1.0) * x.ln();
    if rate == 0.0 {
        kernel
    } else {
        shape * rate.ln() - ln_gamma(shape) + kernel - rate * x
    }
}

/// Draws from Gamma(shape, rate). Both parameters must be strictly positive.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::InvalidParameter { name: "gamma shape", value: shape });
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter { name: "gamma rate", value: rate });
    }
    let dist = Gamma::new(shape, 1.0 / rate)
        .map_err(|_| Error::InvalidParameter { name: "gamma shape", value: shape })?;
    Ok(dist.sample(rng))
}

/// Poisson(lambda) conditioned on `k <= k_max`, renormalized over `0..=k_max`.
#[derive(Debug, Clone)]
pub struct TruncatedPoisson {
    lambda: f64,
    k_max: usize,
    ln_pmf: Vec<f64>,
}

impl TruncatedPoisson {
    pub fn new(lambda: f64, k_max: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter { name: "lambda", value: lambda });
        }
        let unnorm: Vec<f64> = (0..=k_max)
            .map(|k| k as f64 * lambda.ln() - lambda - ln_factorial(k as u64))
            .collect();
        let top = unnorm.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ln_z = top + unnorm.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
        Ok(Self {
            lambda,
            k_max,
            ln_pmf: unnorm.into_iter().map(|v| v - ln_z).collect(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn ln_pmf(&self, k: usize) -> f64 {
        self.ln_pmf.get(k).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.ln_pmf(k).exp()
    }

    pub fn mode(&self) -> usize {
        (0..=self.k_max)
            .max_by(|&a, &b| self.ln_pmf[a].total_cmp(&self.ln_pmf[b]))
            .unwrap_or(0)
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for k in 0..=self.k_max {
            acc += self.pmf(k);
            if u < acc {
                return k;
            }
        }
        self.k_max
    }
}

/// Log density of `points` (sorted, interior to `[start, end]`) as the
/// even-numbered order statistics of `2k + 1` uniforms on `[start, end]`:
/// `(2k+1)! / L^(2k+1) * prod of the k + 1 gaps`.
pub fn even_order_stats_ln_density(start: f64, end: f64, points: &[f64]) -> f64 {
    let k = points.len();
    let len = end - start;
    if !(len > 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut prev = start;
    let mut ln_gaps = 0.0;
    for &p in points.iter().chain(std::iter::once(&end)) {
        let gap = p - prev;
        if !(gap > 0.0) {
            return f64::NEG_INFINITY;
        }
        ln_gaps += gap.ln();
        prev = p;
    }
    let m = 2 * k + 1;
    ln_factorial(m as u64) - m as f64 * len.ln() + ln_gaps
}

/// Forward draw of `k` even-numbered order statistics on `[start, end]`.
pub fn sample_even_order_stats<R: Rng + ?Sized>(
    start: f64,
    end: f64,
    k: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut u: Vec<f64> = (0..2 * k + 1)
        .map(|_| start + (end - start) * rng.random::<f64>())
        .collect();
    u.sort_by(f64::total_cmp);
    u.into_iter().skip(1).step_by(2).take(k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn truncated_poisson_normalizes() {
        let p = TruncatedPoisson::new(10.0, 50).unwrap();
        let total: f64 = (0..=50).map(|k| p.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(p.mode(), 10);
        assert_eq!(p.ln_pmf(51), f64::NEG_INFINITY);
    }

    #[test]
    fn truncated_poisson_renormalizes_heavy_truncation() {
        let p = TruncatedPoisson::new(10.0, 2).unwrap();
        // Ratios of the untruncated pmf are preserved: 1 : 10 : 50.
        let z = 1.0 + 10.0 + 50.0;
        assert!((p.pmf(0) - 1.0 / z).abs() < 1e-12);
        assert!((p.pmf(2) - 50.0 / z).abs() < 1e-12);
    }

    #[test]
    fn no_changepoints_contributes_nothing() {
        assert!(even_order_stats_ln_density(-3.0, 7.0, &[]).abs() < 1e-12);
    }

    #[test]
    fn one_changepoint_density_is_beta_2_2() {
        // s_1 is the middle of 3 uniforms: density 6 x (1 - x) on [0, 1].
        let d = even_order_stats_ln_density(0.0, 1.0, &[0.3]).exp();
        assert!((d - 6.0 * 0.3 * 0.7).abs() < 1e-12);
        let scaled = even_order_stats_ln_density(0.0, 2.0, &[0.6]).exp();
        assert!((scaled - 6.0 * 0.3 * 0.7 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_have_zero_density() {
        assert_eq!(even_order_stats_ln_density(0.0, 1.0, &[0.5, 0.5]), f64::NEG_INFINITY);
        assert_eq!(even_order_stats_ln_density(0.0, 1.0, &[0.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn gamma_density_matches_statrs() {
        use statrs::distribution::{Continuous, Gamma as SGamma};
        let g = SGamma::new(2.5, 1.7).unwrap();
        for &x in &[0.1, 1.0, 3.3] {
            assert!((gamma_ln_density(x, 2.5, 1.7) - g.ln_pdf(x)).abs() < 1e-12);
        }
        assert_eq!(gamma_ln_density(0.0, 2.0, 1.0), f64::NEG_INFINITY);
        assert!((gamma_ln_density(2.0, 3.0, 0.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn forward_order_stats_are_sorted_and_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..20 {
            let s = sample_even_order_stats(-2.0, 5.0, k, &mut rng);
            assert_eq!(s.len(), k);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|&x| x > -2.0 && x < 5.0));
        }
    }

    #[test]
    fn gamma_prior_rejects_bad_parameters() {
        assert!(GammaPrior::new(0.0, 1.0).is_err());
        assert!(GammaPrior::new(1.0, -1.0).is_err());
        assert!(GammaPrior::new(1.0, 0.0).unwrap().mean().is_none());
    }
}
