//! Conjugate Gibbs updates for the removal rate and the height
//! hyperparameter.

use rand::Rng;

use crate::error::{Error, Result};
use crate::prior::sample_gamma;

/// `gamma ~ Gamma(kappa_gamma + n, mu_gamma + sum (R_i - I_i))`.
pub fn gibbs_gamma<R: Rng + ?Sized>(
    kappa_gamma: f64,
    mu_gamma: f64,
    n: usize,
    total_infectious_time: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(total_infectious_time >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "total infectious time",
            value: total_infectious_time,
        });
    }
    sample_gamma(kappa_gamma + n as f64, mu_gamma + total_infectious_time, rng)
}

/// `mu ~ Gamma(a + m kappa, b + sum of the m heights)`.
pub fn gibbs_mu<R: Rng + ?Sized>(
    a: f64,
    b: f64,
    kappa: f64,
    heights: &[f64],
    rng: &mut R,
) -> Result<f64> {
    let total: f64 = heights.iter().sum();
    sample_gamma(a + heights.len() as f64 * kappa, b + total, rng)
}
