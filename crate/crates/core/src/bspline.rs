//! Continuous piecewise-quadratic (second-order B-spline) infection rate.
//!
//! The knot vector is `t_0 = t_1 = t_2 = start < t_3 < ... < t_{k+2} <
//! t_{k+3} = t_{k+4} = t_{k+5} = end` and the rate is
//! `h(t) = sum_{i=0}^{k+2} P_{i+1} b_{i,2}(t)` with `P_1 = P_{k+3} = 0`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::RateFunction;
use crate::error::{Error, Result};
use crate::prior::{
    even_order_stats_ln_density, gamma_ln_density, sample_even_order_stats, sample_gamma,
    TruncatedPoisson,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SplineRate {
    knots: Vec<f64>,
    /// `P_1..P_{k+3}`.
    coefficients: Vec<f64>,
}

impl SplineRate {
    /// Builds a spline from its interior knots and the `k + 1` free
    /// coefficients `P_2..P_{k+2}`.
    pub fn new(start: f64, end: f64, interior: Vec<f64>, free: Vec<f64>) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidRate(format!("support [{start}, {end}] is empty")));
        }
        if free.len() != interior.len() + 1 {
            return Err(Error::InvalidRate(format!(
                "{} interior knots need {} free coefficients, got {}",
                interior.len(),
                interior.len() + 1,
                free.len()
            )));
        }
        let mut prev = start;
        for &t in interior.iter().chain(std::iter::once(&end)) {
            if !(t > prev) {
                return Err(Error::InvalidRate(
                    "interior knots must be strictly increasing inside the support".into(),
                ));
            }
            prev = t;
        }
        if free.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidRate("coefficients must be non-negative".into()));
        }
        Ok(Self::from_parts_unchecked(start, end, &interior, &free))
    }

    pub(crate) fn from_parts_unchecked(start: f64, end: f64, interior: &[f64], free: &[f64]) -> Self {
        let mut knots = Vec::with_capacity(interior.len() + 6);
        knots.extend_from_slice(&[start; 3]);
        knots.extend_from_slice(interior);
        knots.extend_from_slice(&[end; 3]);
        let mut coefficients = Vec::with_capacity(free.len() + 2);
        coefficients.push(0.0);
        coefficients.extend_from_slice(free);
        coefficients.push(0.0);
        Self { knots, coefficients }
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Number of interior knots.
    pub fn k(&self) -> usize {
        self.knots.len() - 6
    }

    /// The full knot vector `t_0..t_{k+5}`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn interior_knots(&self) -> &[f64] {
        &self.knots[3..self.knots.len() - 3]
    }

    /// `P_1..P_{k+3}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `P_2..P_{k+2}`.
    pub fn free_coefficients(&self) -> &[f64] {
        &self.coefficients[1..self.coefficients.len() - 1]
    }

    /// `t_i`.
    fn t(&self, i: usize) -> f64 {
        self.knots[i]
    }

    /// `P_j` (1-based as in the usual notation).
    fn p(&self, j: usize) -> f64 {
        self.coefficients[j - 1]
    }

    pub(crate) fn set_start(&mut self, start: f64) {
        self.knots[..3].fill(start);
    }

    pub(crate) fn set_free(&mut self, j: usize, value: f64) {
        self.coefficients[j + 1] = value;
    }

    pub(crate) fn set_interior(&mut self, j: usize, at: f64) {
        self.knots[j + 3] = at;
    }

    /// Inserts interior knot `at` into segment `j` and splits free coefficient
    /// `j` into `left` and `right`.
    pub(crate) fn insert(&mut self, j: usize, at: f64, left: f64, right: f64) {
        self.knots.insert(j + 3, at);
        self.coefficients[j + 1] = left;
        self.coefficients.insert(j + 2, right);
    }

    /// Removes interior knot `j` (0-based) and merges free coefficients `j`
    /// and `j + 1` into `merged`.
    pub(crate) fn remove(&mut self, j: usize, merged: f64) {
        self.knots.remove(j + 3);
        self.coefficients.remove(j + 2);
        self.coefficients[j + 1] = merged;
    }

    /// Index `m` in `2..=k+2` with `t` in `[t_m, t_{m+1})`.
    fn span_of(&self, t: f64) -> usize {
        2 + self.interior_knots().partition_point(|&x| x <= t)
    }

    fn span_value(&self, j: usize, t: f64) -> f64 {
        let (tjm1, tj, tj1, tj2) = (self.t(j - 1), self.t(j), self.t(j + 1), self.t(j + 2));
        let width = tj1 - tj;
        let rising = (self.p(j + 1) * (t - tj).powi(2) + self.p(j) * (tj2 - t) * (t - tj))
            / ((tj2 - tj) * width);
        let falling = (self.p(j) * (tj1 - t) * (t - tjm1) + self.p(j - 1) * (tj1 - t).powi(2))
            / ((tj1 - tjm1) * width);
        rising + falling
    }

    /// Sum of coefficient-weighted basis functions via the Cox–de Boor
    /// recursion; slower than [`RateFunction::value_at`], kept as a check.
    pub fn value_by_basis(&self, t: f64) -> f64 {
        (0..self.coefficients.len())
            .map(|i| self.coefficients[i] * basis_unchecked(i, 2, t, &self.knots))
            .sum()
    }
}

impl RateFunction for SplineRate {
    fn support(&self) -> (f64, f64) {
        (self.start(), self.end())
    }

    fn value_at(&self, t: f64) -> f64 {
        if t >= self.end() {
            return 0.0;
        }
        self.span_value(self.span_of(t), t).max(0.0)
    }

    fn left_limit_at(&self, t: f64) -> f64 {
        self.value_at(t)
    }

    fn integral(&self) -> f64 {
        let k = self.k();
        (1..=k + 3).map(|j| self.p(j) * (self.t(j + 2) - self.t(j - 1))).sum::<f64>() / 3.0
    }
}

/// `b_{i,order}(t)` for the knot vector `knots`, with any term whose
/// denominator vanishes taken as zero.
pub fn bspline_basis(i: usize, order: usize, t: f64, knots: &[f64]) -> Result<f64> {
    let count = knots.len().saturating_sub(order + 1);
    if i >= count {
        return Err(Error::BasisIndex { index: i, count });
    }
    Ok(basis_unchecked(i, order, t, knots))
}

fn basis_unchecked(i: usize, order: usize, t: f64, knots: &[f64]) -> f64 {
    if order == 0 {
        return if knots[i] <= t && t < knots[i + 1] { 1.0 } else { 0.0 };
    }
    let left_den = knots[i + order] - knots[i];
    let right_den = knots[i + order + 1] - knots[i + 1];
    let left = if left_den > 0.0 {
        (t - knots[i]) / left_den * basis_unchecked(i, order - 1, t, knots)
    } else {
        0.0
    };
    let right = if right_den > 0.0 {
        (knots[i + order + 1] - t) / right_den * basis_unchecked(i + 1, order - 1, t, knots)
    } else {
        0.0
    };
    left + right
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplinePriorConfig {
    pub lambda: f64,
    pub k_max: usize,
    pub kappa: f64,
    pub mu_shape: f64,
    pub mu_rate: f64,
}

impl Default for SplinePriorConfig {
    fn default() -> Self {
        Self { lambda: 10.0, k_max: 50, kappa: 1.0, mu_shape: 1.0, mu_rate: 0.0 }
    }
}

impl SplinePriorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("lambda", self.lambda), ("kappa", self.kappa), ("a", self.mu_shape)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if !(self.mu_rate.is_finite() && self.mu_rate >= 0.0) {
            return Err(Error::InvalidParameter { name: "b", value: self.mu_rate });
        }
        Ok(())
    }

    pub fn k_prior(&self) -> Result<TruncatedPoisson> {
        TruncatedPoisson::new(self.lambda, self.k_max)
    }
}

/// Truncated Poisson on `k`, even-order-statistics interior knots and
/// independent Gamma(kappa, mu) free coefficients.
pub fn bspline_log_prior(rate: &SplineRate, cfg: &SplinePriorConfig, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter { name: "mu", value: mu });
    }
    let k = rate.k();
    if k > cfg.k_max || rate.coefficients.iter().any(|&p| p < 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_k = cfg.k_prior()?.ln_pmf(k);
    let ln_t = even_order_stats_ln_density(rate.start(), rate.end(), rate.interior_knots());
    let ln_p: f64 = rate
        .free_coefficients()
        .iter()
        .map(|&p| gamma_ln_density(p, cfg.kappa, mu))
        .sum();
    Ok(ln_k + ln_t + ln_p)
}

/// Forward draw from the spline prior (requires `mu_rate > 0`); returns the
/// rate and the drawn `mu`.
pub fn sample_spline_prior<R: Rng + ?Sized>(
    start: f64,
    end: f64,
    cfg: &SplinePriorConfig,
    rng: &mut R,
) -> Result<(SplineRate, f64)> {
    let k = cfg.k_prior()?.sample(rng);
    let interior = sample_even_order_stats(start, end, k, rng);
    let mu = sample_gamma(cfg.mu_shape, cfg.mu_rate, rng)?;
    let free = (0..=k).map(|_| sample_gamma(cfg.kappa, mu, rng)).collect::<Result<Vec<_>>>()?;
    Ok((SplineRate::new(start, end, interior, free)?, mu))
}

#[derive(Serialize, Deserialize)]
struct SplineRepr {
    start: f64,
    end: f64,
    interior: Vec<f64>,
    free: Vec<f64>,
}

impl Serialize for SplineRate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SplineRepr {
            start: self.start(),
            end: self.end(),
            interior: self.interior_knots().to_vec(),
            free: self.free_coefficients().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SplineRate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SplineRepr::deserialize(d)?;
        SplineRate::new(r.start, r.end, r.interior, r.free).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spline(k: usize, seed: u64) -> SplineRate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let interior = sample_even_order_stats(-3.0, 9.0, k, &mut rng);
        let free = (0..=k).map(|_| 5.0 * rng.random::<f64>()).collect();
        SplineRate::new(-3.0, 9.0, interior, free).unwrap()
    }

    #[test]
    fn order_zero_is_indicator() {
        let knots = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(bspline_basis(1, 0, 1.5, &knots).unwrap(), 1.0);
        assert_eq!(bspline_basis(1, 0, 2.0, &knots).unwrap(), 0.0);
        assert_eq!(bspline_basis(1, 0, 0.5, &knots).unwrap(), 0.0);
        assert!(bspline_basis(3, 0, 0.5, &knots).is_err());
    }

    #[test]
    fn partition_of_unity() {
        let s = spline(5, 1);
        for step in 0..500 {
            let t = -3.0 + 12.0 * step as f64 / 500.0;
            let total: f64 = (0..s.k() + 3)
                .map(|i| bspline_basis(i, 2, t, s.knots()).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "t={t}: {total}");
        }
    }

    #[test]
    fn closed_form_matches_recursion() {
        for seed in 0..10 {
            let s = spline(seed as usize % 6, seed);
            for step in 0..=100 {
                let t = -3.0 + 12.0 * step as f64 / 100.0;
                let a = s.value_at(t);
                let b = s.value_by_basis(t);
                assert!((a - b).abs() < 1e-12, "seed {seed} t {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn vanishes_at_both_ends() {
        let s = spline(3, 4);
        assert_eq!(s.evaluate(-3.0).unwrap(), 0.0);
        assert_eq!(s.evaluate(9.0).unwrap(), 0.0);
        assert!(s.evaluate(9.0 - 1e-12).unwrap() < 1e-9);
        assert!(s.evaluate(9.5).is_err());
    }

    #[test]
    fn continuous_at_single_knot() {
        let s = SplineRate::new(0.0, 4.0, vec![1.5], vec![2.0, 7.0]).unwrap();
        let eps = 1e-9;
        let left = s.span_value(2, 1.5);
        let right = s.span_value(3, 1.5);
        assert!((left - right).abs() < 1e-12);
        assert!((s.value_at(1.5 - eps) - s.value_at(1.5)).abs() < 1e-7);
    }

    #[test]
    fn constant_coefficients_give_constant_interior() {
        let k = 40;
        let interior: Vec<f64> = (1..=k).map(|i| i as f64 / (k + 1) as f64).collect();
        let s = SplineRate::new(0.0, 1.0, interior, vec![2.5; k + 1]).unwrap();
        assert!((s.value_at(0.5) - 2.5).abs() < 1e-12);
        assert!((s.value_by_basis(0.5) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn single_free_coefficient_is_a_parabola() {
        // k = 0: h(t) = 2 P_2 x (L - x) / L^2, integral P_2 L / 3.
        let s = SplineRate::new(0.0, 3.0, vec![], vec![6.0]).unwrap();
        assert!((s.value_at(1.0) - 2.0 * 6.0 * 1.0 * 2.0 / 9.0).abs() < 1e-12);
        assert!((s.integral() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coefficients_integrate_to_zero() {
        let s = SplineRate::new(0.0, 3.0, vec![1.0, 2.0], vec![0.0; 3]).unwrap();
        assert_eq!(s.integral(), 0.0);
    }

    #[test]
    fn prior_rejects_negative_and_oversized() {
        let cfg = SplinePriorConfig { k_max: 1, ..Default::default() };
        let s = SplineRate::new(0.0, 3.0, vec![1.0, 2.0], vec![1.0; 3]).unwrap();
        assert_eq!(bspline_log_prior(&s, &cfg, 1.0).unwrap(), f64::NEG_INFINITY);
        assert!(SplineRate::new(0.0, 3.0, vec![], vec![-1.0]).is_err());
        let mut neg = SplineRate::new(0.0, 3.0, vec![], vec![1.0]).unwrap();
        neg.set_free(0, -1.0);
        assert_eq!(bspline_log_prior(&neg, &SplinePriorConfig::default(), 1.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn minimal_model_prior() {
        let cfg = SplinePriorConfig { kappa: 2.0, ..Default::default() };
        let s = SplineRate::new(0.0, 3.0, vec![], vec![1.7]).unwrap();
        let expected = cfg.k_prior().unwrap().ln_pmf(0) + gamma_ln_density(1.7, 2.0, 0.9);
        assert!((bspline_log_prior(&s, &cfg, 0.9).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn insert_and_remove_are_inverse() {
        let mut s = spline(3, 8);
        let orig = s.clone();
        let at = 0.5 * (s.interior_knots()[1] + s.interior_knots()[2]);
        let p = s.free_coefficients()[2];
        s.insert(2, at, 1.0, 2.0);
        assert_eq!(s.k(), 4);
        assert_eq!(s.interior_knots()[2], at);
        assert_eq!(&s.free_coefficients()[2..4], &[1.0, 2.0]);
        s.remove(2, p);
        assert_eq!(s, orig);
    }

    #[test]
    fn serde_round_trip() {
        let s = spline(2, 9);
        let json = serde_json::to_string(&s).unwrap();
        let back: SplineRate = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}
