use serde::Serialize;

use crate::error::Result;
use crate::prior::TruncatedPoisson;

/// Birth and death probabilities `b_k`, `d_k` for `k = 0..=k_max`, scaled so
/// that the largest `b_k + d_k` is 0.9.
#[derive(Debug, Clone, Serialize)]
pub struct MoveSchedule {
    birth: Vec<f64>,
    death: Vec<f64>,
    scale: f64,
}

const MAX_JUMP_PROBABILITY: f64 = 0.9;

impl MoveSchedule {
    pub fn new(k_prior: &TruncatedPoisson) -> Self {
        let k_max = k_prior.k_max();
        let ratio = |from: usize, to: usize| (k_prior.ln_pmf(to) - k_prior.ln_pmf(from)).exp().min(1.0);
        let raw_birth: Vec<f64> = (0..=k_max)
            .map(|k| if k < k_max { ratio(k, k + 1) } else { 0.0 })
            .collect();
        let raw_death: Vec<f64> = (0..=k_max)
            .map(|k| if k > 0 { ratio(k, k - 1) } else { 0.0 })
            .collect();
        let peak = raw_birth
            .iter()
            .zip(&raw_death)
            .map(|(b, d)| b + d)
            .fold(0.0, f64::max);
        let scale = if peak > 0.0 { MAX_JUMP_PROBABILITY / peak } else { 0.0 };
        Self {
            birth: raw_birth.into_iter().map(|b| b * scale).collect(),
            death: raw_death.into_iter().map(|d| d * scale).collect(),
            scale,
        }
    }

    pub fn from_prior(lambda: f64, k_max: usize) -> Result<Self> {
        Ok(Self::new(&TruncatedPoisson::new(lambda, k_max)?))
    }

    pub fn birth(&self, k: usize) -> f64 {
        self.birth.get(k).copied().unwrap_or(0.0)
    }

    pub fn death(&self, k: usize) -> f64 {
        self.death.get(k).copied().unwrap_or(0.0)
    }

    /// The constant `c`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn k_max(&self) -> usize {
        self.birth.len() - 1
    }
}
