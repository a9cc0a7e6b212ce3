//! Observed removal times, latent infection times and the augmented
//! likelihood of an infection-rate function.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered removal times, shifted so that the first removal is at time zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalData {
    removals: Vec<f64>,
}

impl RemovalData {
    /// Sorts and shifts `times` so that `R_1 = 0`.
    pub fn new(mut times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyData);
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("removal times"));
        }
        times.sort_by(f64::total_cmp);
        let origin = times[0];
        for t in &mut times {
            *t -= origin;
        }
        Ok(Self { removals: times })
    }

    /// Reads a single-column CSV of removal times in days. A non-numeric
    /// first row is treated as a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut times = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let field = match record.get(0) {
                Some(f) if !f.is_empty() => f,
                _ => continue,
            };
            match field.parse::<f64>() {
                Ok(t) => times.push(t),
                Err(_) if row == 0 => continue,
                Err(_) => {
                    return Err(Error::Parse(format!("row {}: {field:?} is not a number", row + 1)))
                }
            }
        }
        Self::new(times)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn times(&self) -> &[f64] {
        &self.removals
    }

    pub fn len(&self) -> usize {
        self.removals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removals.is_empty()
    }

    /// `R_n`, the end of the epidemic.
    pub fn last(&self) -> f64 {
        *self.removals.last().expect("non-empty by construction")
    }
}

/// Infection times aligned by index with [`RemovalData::times`], plus the
/// label of the initial infective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentInfections {
    infections: Vec<f64>,
    omega: usize,
}

impl LatentInfections {
    /// The initial infective is taken to be the earliest infection.
    pub fn new(infections: Vec<f64>) -> Result<Self> {
        if infections.is_empty() {
            return Err(Error::EmptyData);
        }
        if infections.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("infection times"));
        }
        let omega = infections
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        Ok(Self { infections, omega })
    }

    pub fn times(&self) -> &[f64] {
        &self.infections
    }

    pub fn len(&self) -> usize {
        self.infections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infections.is_empty()
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    /// `I_omega`.
    pub fn first_infection_time(&self) -> f64 {
        self.infections[self.omega]
    }

    pub(crate) fn set(&mut self, i: usize, t: f64) {
        self.infections[i] = t;
    }

    pub(crate) fn swap_with_first(&mut self, other: usize) {
        self.infections.swap(self.omega, other);
        self.omega = other;
    }

    /// Infection times in increasing order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.infections.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `sum_i (R_i - I_i)`.
    pub fn total_infectious_time(&self, removals: &RemovalData) -> f64 {
        removals
            .times()
            .iter()
            .zip(&self.infections)
            .map(|(r, i)| r - i)
            .sum()
    }

    /// Every individual is infected strictly before being removed.
    pub fn periods_positive(&self, removals: &RemovalData) -> bool {
        self.infections.iter().zip(removals.times()).all(|(i, r)| i < r)
    }
}

/// Capability shared by every concrete infection-rate model.
pub trait RateFunction {
    /// `[I_omega, R_n]`.
    fn support(&self) -> (f64, f64);

    /// `h(t)`; callers guarantee `t` lies in the support.
    fn value_at(&self, t: f64) -> f64;

    /// `h(t-)`; callers guarantee `t` lies in the support.
    fn left_limit_at(&self, t: f64) -> f64;

    /// Integral of `h` over the support.
    fn integral(&self) -> f64;

    fn evaluate(&self, t: f64) -> Result<f64> {
        self.check_support(t)?;
        Ok(self.value_at(t))
    }

    fn left_limit(&self, t: f64) -> Result<f64> {
        self.check_support(t)?;
        Ok(self.left_limit_at(t))
    }

    fn check_support(&self, t: f64) -> Result<()> {
        let (start, end) = self.support();
        if t.is_nan() || t < start || t > end {
            return Err(Error::OutsideSupport { t, start, end });
        }
        Ok(())
    }
}

/// Checks that `I_(i+1) <= R_(i)` for every `i`, comparing ordered
/// infection times against ordered removal times.
pub fn chi_valid(infections: &LatentInfections, removals: &RemovalData) -> Result<bool> {
    if infections.len() != removals.len() {
        return Err(Error::LengthMismatch {
            infections: infections.len(),
            removals: removals.len(),
        });
    }
    Ok(chi_holds_sorted(&infections.sorted(), removals.times()))
}

/// `chi` on already ordered infection and removal times.
pub(crate) fn chi_holds_sorted(sorted_infections: &[f64], sorted_removals: &[f64]) -> bool {
    sorted_infections
        .iter()
        .skip(1)
        .zip(sorted_removals)
        .all(|(i, r)| i <= r)
}

/// `sum ln h(I_(i)-) - integral of h` over the infections other than the
/// first, which must be given in increasing order.
pub fn rate_log_terms<H: RateFunction + ?Sized>(rate: &H, later_infections: &[f64]) -> f64 {
    let mut acc = -rate.integral();
    for &t in later_infections {
        let h = rate.left_limit_at(t);
        if !(h > 0.0) {
            return f64::NEG_INFINITY;
        }
        acc += h.ln();
    }
    acc
}

/// Augmented log-likelihood of `(I_{-omega}, R)` given `h`, `gamma` and
/// `I_omega`, up to an additive constant:
/// `n ln(gamma) + sum_{i>=2} ln h(I_(i)-) - gamma sum (R_i - I_i) - int h`.
///
/// Returns `-inf` when `chi` fails, an infectious period is non-positive or
/// `h` vanishes at an infection time.
pub fn log_likelihood<H: RateFunction + ?Sized>(
    infections: &LatentInfections,
    removals: &RemovalData,
    rate: &H,
    gamma: f64,
) -> Result<f64> {
    if !gamma.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    if gamma <= 0.0 {
        return Err(Error::InvalidParameter { name: "gamma", value: gamma });
    }
    if !chi_valid(infections, removals)? || !infections.periods_positive(removals) {
        return Ok(f64::NEG_INFINITY);
    }
    let sorted = infections.sorted();
    for &t in &sorted[1..] {
        rate.check_support(t)?;
    }
    let n = removals.len() as f64;
    let periods = infections.total_infectious_time(removals);
    Ok(n * gamma.ln() - gamma * periods + rate_log_terms(rate, &sorted[1..]))
}
