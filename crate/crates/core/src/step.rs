//! Step-function infection rate and its priors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::RateFunction;
use crate::error::{Error, Result};
use crate::prior::{
    even_order_stats_ln_density, gamma_ln_density, sample_even_order_stats, sample_gamma,
    TruncatedPoisson,
};

/// Piecewise-constant rate on `[start, end]`: height `heights[j]` on
/// `[s_j, s_{j+1})` with `s_0 = start` and `s_{k+1} = end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRate {
    start: f64,
    end: f64,
    changepoints: Vec<f64>,
    heights: Vec<f64>,
}

impl StepRate {
    pub fn new(start: f64, end: f64, changepoints: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidRate(format!("support [{start}, {end}] is empty")));
        }
        if heights.len() != changepoints.len() + 1 {
            return Err(Error::InvalidRate(format!(
                "{} changepoints need {} heights, got {}",
                changepoints.len(),
                changepoints.len() + 1,
                heights.len()
            )));
        }
        let mut prev = start;
        for &s in changepoints.iter().chain(std::iter::once(&end)) {
            if !(s > prev) {
                return Err(Error::InvalidRate(
                    "changepoints must be strictly increasing inside the support".into(),
                ));
            }
            prev = s;
        }
        if heights.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidRate("heights must be positive".into()));
        }
        Ok(Self { start, end, changepoints, heights })
    }

    pub fn constant(start: f64, end: f64, height: f64) -> Result<Self> {
        Self::new(start, end, Vec::new(), vec![height])
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// Number of changepoints.
    pub fn k(&self) -> usize {
        self.changepoints.len()
    }

    pub fn changepoints(&self) -> &[f64] {
        &self.changepoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub(crate) fn heights_mut(&mut self) -> &mut [f64] {
        &mut self.heights
    }

    pub(crate) fn changepoints_mut(&mut self) -> &mut [f64] {
        &mut self.changepoints
    }

    pub(crate) fn set_start(&mut self, start: f64) {
        self.start = start;
    }

    pub(crate) fn insert(&mut self, j: usize, at: f64, left: f64, right: f64) {
        self.changepoints.insert(j, at);
        self.heights[j] = left;
        self.heights.insert(j + 1, right);
    }

    pub(crate) fn remove(&mut self, j: usize, merged: f64) {
        self.changepoints.remove(j);
        self.heights.remove(j + 1);
        self.heights[j] = merged;
    }

    /// `s_j` for `j` in `0..=k+1`.
    pub fn boundary(&self, j: usize) -> f64 {
        if j == 0 {
            self.start
        } else if j <= self.changepoints.len() {
            self.changepoints[j - 1]
        } else {
            self.end
        }
    }

    /// Index of the segment `[s_j, s_{j+1})` containing `t`; `t = end` maps to
    /// the last segment.
    pub fn segment_of(&self, t: f64) -> usize {
        self.changepoints.partition_point(|&s| s <= t)
    }

    /// Segment used by the left limit at `t`: a changepoint belongs to the
    /// segment on its left.
    pub fn segment_of_left(&self, t: f64) -> usize {
        self.changepoints.partition_point(|&s| s < t)
    }
}

impl RateFunction for StepRate {
    fn support(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    fn value_at(&self, t: f64) -> f64 {
        self.heights[self.segment_of(t)]
    }

    fn left_limit_at(&self, t: f64) -> f64 {
        self.heights[self.segment_of_left(t)]
    }

    fn integral(&self) -> f64 {
        let mut prev = self.start;
        let mut acc = 0.0;
        for (h, &s) in self.heights.iter().zip(self.changepoints.iter().chain(std::iter::once(&self.end))) {
            acc += h * (s - prev);
            prev = s;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightVariant {
    /// Heights i.i.d. Gamma(kappa, mu) with a Gamma(a, b) hyperprior on mu.
    Independent,
    /// `h_0 ~ Gamma(alpha_0, beta_0)`, `h_i | h_{i-1} ~ Gamma(alpha, alpha / h_{i-1})`.
    Martingale,
}

/// Hyperparameters of the step-function prior. Rates `mu_rate` and `beta_0`
/// may be zero (improper limit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPriorConfig {
    pub lambda: f64,
    pub k_max: usize,
    pub kappa: f64,
    pub mu_shape: f64,
    pub mu_rate: f64,
    pub alpha_0: f64,
    pub beta_0: f64,
    pub alpha: f64,
    pub variant: HeightVariant,
}

impl Default for StepPriorConfig {
    fn default() -> Self {
        Self {
            lambda: 10.0,
            k_max: 50,
            kappa: 1.0,
            mu_shape: 1.0,
            mu_rate: 0.0,
            alpha_0: 1.0,
            beta_0: 0.0,
            alpha: 1.0,
            variant: HeightVariant::Independent,
        }
    }
}

impl StepPriorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("kappa", self.kappa),
            ("a", self.mu_shape),
            ("alpha_0", self.alpha_0),
            ("alpha", self.alpha),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        for (name, value) in [("b", self.mu_rate), ("beta_0", self.beta_0)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    pub fn k_prior(&self) -> Result<TruncatedPoisson> {
        TruncatedPoisson::new(self.lambda, self.k_max)
    }
}

/// Log density of the height vector under the martingale prior.
pub fn martingale_ln_density(heights: &[f64], alpha_0: f64, beta_0: f64, alpha: f64) -> f64 {
    let mut acc = gamma_ln_density(heights[0], alpha_0, beta_0);
    for w in heights.windows(2) {
        acc += gamma_ln_density(w[1], alpha, alpha / w[0]);
    }
    acc
}

/// Log prior of a step rate: truncated Poisson on `k`, even-order-statistics
/// changepoints and the configured height prior (`mu` is ignored by the
/// martingale variant).
pub fn step_log_prior(rate: &StepRate, cfg: &StepPriorConfig, mu: f64) -> Result<f64> {
    let k = rate.k();
    if k > cfg.k_max {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_k = cfg.k_prior()?.ln_pmf(k);
    let ln_s = even_order_stats_ln_density(rate.start, rate.end, &rate.changepoints);
    let ln_h = match cfg.variant {
        HeightVariant::Independent => {
            if !(mu > 0.0) {
                return Err(Error::InvalidParameter { name: "mu", value: mu });
            }
            rate.heights.iter().map(|&h| gamma_ln_density(h, cfg.kappa, mu)).sum()
        }
        HeightVariant::Martingale => {
            martingale_ln_density(&rate.heights, cfg.alpha_0, cfg.beta_0, cfg.alpha)
        }
    };
    Ok(ln_k + ln_s + ln_h)
}

/// Forward draw from the step prior; requires proper hyperpriors. Returns
/// the rate and, for the independent variant, the drawn `mu`.
pub fn sample_step_prior<R: Rng + ?Sized>(
    start: f64,
    end: f64,
    cfg: &StepPriorConfig,
    rng: &mut R,
) -> Result<(StepRate, Option<f64>)> {
    let k = cfg.k_prior()?.sample(rng);
    let changepoints = sample_even_order_stats(start, end, k, rng);
    let (heights, mu) = match cfg.variant {
        HeightVariant::Independent => {
            let mu = sample_gamma(cfg.mu_shape, cfg.mu_rate, rng)?;
            let h = (0..=k)
                .map(|_| sample_gamma(cfg.kappa, mu, rng))
                .collect::<Result<Vec<_>>>()?;
            (h, Some(mu))
        }
        HeightVariant::Martingale => {
            let mut h = vec![sample_gamma(cfg.alpha_0, cfg.beta_0, rng)?];
            for i in 1..=k {
                let prev = h[i - 1];
                h.push(sample_gamma(cfg.alpha, cfg.alpha / prev, rng)?);
            }
            (h, None)
        }
    };
    Ok((StepRate::new(start, end, changepoints, heights)?, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::function::gamma::ln_gamma;

    fn two_step() -> StepRate {
        StepRate::new(0.0, 2.0, vec![1.0], vec![2.0, 5.0]).unwrap()
    }

    #[test]
    fn constant_rate_everywhere() {
        let r = StepRate::constant(-1.0, 4.0, 3.0).unwrap();
        for t in [-1.0, 0.0, 2.2, 4.0] {
            assert_eq!(r.evaluate(t).unwrap(), 3.0);
        }
    }

    #[test]
    fn right_continuous_at_changepoint() {
        let r = two_step();
        assert_eq!(r.evaluate(1.0).unwrap(), 5.0);
        assert_eq!(r.left_limit(1.0).unwrap(), 2.0);
        assert_eq!(r.evaluate(2.0).unwrap(), 5.0);
        assert_eq!(r.evaluate(0.0).unwrap(), 2.0);
    }

    #[test]
    fn outside_support_is_error() {
        let r = two_step();
        assert!(r.evaluate(-0.1).is_err());
        assert!(r.evaluate(2.1).is_err());
    }

    #[test]
    fn integrals_are_rectangle_sums() {
        assert_eq!(StepRate::constant(0.0, 3.0, 2.0).unwrap().integral(), 6.0);
        let r = StepRate::new(0.0, 2.0, vec![1.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(r.integral(), 4.0);
    }

    #[test]
    fn rejects_malformed_rates() {
        assert!(StepRate::new(0.0, 1.0, vec![0.5], vec![1.0]).is_err());
        assert!(StepRate::new(0.0, 1.0, vec![1.0], vec![1.0, 1.0]).is_err());
        assert!(StepRate::new(0.0, 1.0, vec![0.6, 0.4], vec![1.0; 3]).is_err());
        assert!(StepRate::new(0.0, 1.0, vec![], vec![0.0]).is_err());
    }

    #[test]
    fn k_zero_prior_has_no_changepoint_term() {
        let cfg = StepPriorConfig::default();
        let r = StepRate::constant(-2.0, 5.0, 1.5).unwrap();
        let lp = step_log_prior(&r, &cfg, 2.0).unwrap();
        let expected = cfg.k_prior().unwrap().ln_pmf(0) + gamma_ln_density(1.5, 1.0, 2.0);
        assert!((lp - expected).abs() < 1e-12);
    }

    #[test]
    fn independent_prior_matches_direct_formula() {
        let cfg = StepPriorConfig { lambda: 3.0, k_max: 5, kappa: 2.5, ..Default::default() };
        let (mu, a, b, s, h1, h2) = (1.3f64, -1.0f64, 3.0f64, 0.4f64, 0.8f64, 2.2f64);
        let r = StepRate::new(a, b, vec![s], vec![h1, h2]).unwrap();
        // Written out independently of the helpers in `prior`.
        let z: f64 = (0..=5u32)
            .map(|k| 3f64.powi(k as i32) / (1..=k).map(f64::from).product::<f64>())
            .sum();
        let ln_pk = 3f64.ln() - z.ln();
        let ln_s = (6.0f64).ln() - 3.0 * (b - a).ln() + (s - a).ln() + (b - s).ln();
        let g = |x: f64| 2.5 * mu.ln() - ln_gamma(2.5) + 1.5 * x.ln() - mu * x;
        let expected = ln_pk + ln_s + g(h1) + g(h2);
        let lp = step_log_prior(&r, &cfg, mu).unwrap();
        assert!((lp - expected).abs() < 1e-12, "{lp} vs {expected}");
    }

    #[test]
    fn too_many_changepoints_is_impossible() {
        let cfg = StepPriorConfig { k_max: 1, ..Default::default() };
        let r = StepRate::new(0.0, 3.0, vec![1.0, 2.0], vec![1.0; 3]).unwrap();
        assert_eq!(step_log_prior(&r, &cfg, 1.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn martingale_conditional_mean_is_previous_height() {
        let cfg = StepPriorConfig {
            lambda: 1.0,
            k_max: 1,
            alpha: 1.0,
            alpha_0: 2.0,
            beta_0: 1.0,
            variant: HeightVariant::Martingale,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let prev = 2.7;
        let n = 200_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_gamma(cfg.alpha, cfg.alpha / prev, &mut rng).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((mean - prev).abs() < 3.0 * sd / (n as f64).sqrt());
    }

    #[test]
    fn martingale_prior_density() {
        let cfg = StepPriorConfig {
            lambda: 2.0,
            k_max: 4,
            alpha_0: 1.5,
            beta_0: 0.5,
            alpha: 3.0,
            variant: HeightVariant::Martingale,
            ..Default::default()
        };
        let r = StepRate::new(0.0, 4.0, vec![1.0, 2.5], vec![1.0, 2.0, 0.5]).unwrap();
        let lp = step_log_prior(&r, &cfg, f64::NAN).unwrap();
        let expected = cfg.k_prior().unwrap().ln_pmf(2)
            + even_order_stats_ln_density(0.0, 4.0, &[1.0, 2.5])
            + gamma_ln_density(1.0, 1.5, 0.5)
            + gamma_ln_density(2.0, 3.0, 3.0 / 1.0)
            + gamma_ln_density(0.5, 3.0, 3.0 / 2.0);
        assert!((lp - expected).abs() < 1e-12);
    }

    #[test]
    fn forward_prior_respects_k_max() {
        let cfg = StepPriorConfig { lambda: 10.0, k_max: 3, mu_rate: 1.0, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (r, mu) = sample_step_prior(0.0, 1.0, &cfg, &mut rng).unwrap();
            assert!(r.k() <= 3);
            assert!(mu.unwrap() > 0.0);
        }
    }
}
