//! Proposal transforms and acceptance log-ratios of the reversible-jump
//! moves, free of any chain state so they can be checked in isolation.

use statrs::function::gamma::ln_gamma;

use super::schedule::MoveSchedule;

/// Splits height `h` over an interval cut into lengths `left_len` and
/// `right_len`, keeping the length-weighted geometric mean and giving
/// `right / left = (1 - u) / u`.
pub fn split_heights(h: f64, left_len: f64, right_len: f64, u: f64) -> (f64, f64) {
    let len = left_len + right_len;
    let ln_r = ((1.0 - u) / u).ln();
    let left = h * (-right_len / len * ln_r).exp();
    let right = h * (left_len / len * ln_r).exp();
    (left, right)
}

/// Length-weighted geometric mean; inverse of [`split_heights`].
pub fn merge_heights(left: f64, right: f64, left_len: f64, right_len: f64) -> f64 {
    ((left_len * left.ln() + right_len * right.ln()) / (left_len + right_len)).exp()
}

/// The `u` that [`split_heights`] would have needed to produce `left`, `right`.
pub fn split_fraction(left: f64, right: f64) -> f64 {
    left / (left + right)
}

/// Height prior entering the birth/death and change-height ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeightPrior {
    /// Independent Gamma(kappa, mu).
    Independent { kappa: f64, mu: f64 },
    /// `h_0 ~ Gamma(alpha_0, beta_0)`, `h_i ~ Gamma(alpha, alpha / h_{i-1})`.
    Martingale { alpha_0: f64, beta_0: f64, alpha: f64 },
}

impl HeightPrior {
    /// `(alpha_j, beta_j)` of height `j` given its predecessor.
    fn conditional(&self, previous: Option<f64>) -> (f64, f64) {
        match *self {
            HeightPrior::Martingale { alpha_0, beta_0, alpha } => match previous {
                None => (alpha_0, beta_0),
                Some(p) => (alpha, alpha / p),
            },
            HeightPrior::Independent { kappa, mu } => (kappa, mu),
        }
    }
}

/// Heights around a split: `previous = h_{j-1}`, `old = h_j`,
/// `next = h_{j+1}` (all before the birth) and the proposed pair.
#[derive(Debug, Clone, Copy)]
pub struct SplitHeights {
    pub previous: Option<f64>,
    pub old: f64,
    pub next: Option<f64>,
    pub left: f64,
    pub right: f64,
}

/// Log of the height-density factor of the birth prior ratio.
pub fn birth_height_log_ratio(prior: &HeightPrior, hs: &SplitHeights) -> f64 {
    let SplitHeights { old, left, right, .. } = *hs;
    match *prior {
        HeightPrior::Independent { kappa, mu } => {
            kappa * mu.ln() - ln_gamma(kappa) + (kappa - 1.0) * (left * right / old).ln()
                - mu * (left + right - old)
        }
        HeightPrior::Martingale { alpha, .. } => {
            let (alpha_j, beta_j) = prior.conditional(hs.previous);
            let norm = alpha * alpha.ln() - ln_gamma(alpha);
            match hs.next {
                Some(next) => {
                    norm + (alpha_j - 1.0 - alpha) * (left / old).ln() - right.ln()
                        - beta_j * (left - old)
                        - alpha * (right / left + next / right - next / old)
                }
                None => {
                    norm + (alpha_j - 1.0 - alpha) * left.ln() + (alpha - 1.0) * right.ln()
                        - (alpha_j - 1.0) * old.ln()
                        - beta_j * (left - old)
                        - alpha * right / left
                }
            }
        }
    }
}

/// Geometry of a birth: the model has `k` changepoints before the move,
/// the support has length `support_len` and the new point cuts its segment
/// into `left_len` and `right_len`.
#[derive(Debug, Clone, Copy)]
pub struct BirthGeometry {
    pub k: usize,
    pub support_len: f64,
    pub left_len: f64,
    pub right_len: f64,
}

/// Log of prior ratio x proposal ratio x Jacobian for a birth (likelihood
/// excluded). The matching death from `k + 1` uses the negative.
pub fn birth_log_ratio(
    geom: &BirthGeometry,
    ln_pk: f64,
    ln_pk1: f64,
    schedule: &MoveSchedule,
    prior: &HeightPrior,
    hs: &SplitHeights,
) -> f64 {
    let BirthGeometry { k, support_len, left_len, right_len } = *geom;
    if !(left_len > 0.0 && right_len > 0.0) {
        return f64::NEG_INFINITY;
    }
    let kf = k as f64;
    let ln_prior_k = ln_pk1 - ln_pk;
    let ln_positions = (2.0 * (kf + 1.0) * (2.0 * kf + 3.0)).ln() - 2.0 * support_len.ln()
        + (left_len * right_len / (left_len + right_len)).ln();
    let ln_heights = birth_height_log_ratio(prior, hs);
    let ln_proposal = schedule.death(k + 1).ln() + support_len.ln()
        - schedule.birth(k).ln()
        - (kf + 1.0).ln();
    let ln_jacobian = 2.0 * (hs.left + hs.right).ln() - hs.old.ln();
    ln_prior_k + ln_positions + ln_heights + ln_proposal + ln_jacobian
}

/// Log prior-times-proposal ratio for changing height `j` from `old` to
/// `new` under a log-uniform proposal.
pub fn change_height_log_ratio(
    prior: &HeightPrior,
    previous: Option<f64>,
    old: f64,
    new: f64,
    next: Option<f64>,
) -> f64 {
    let ln_ratio = (new / old).ln();
    match *prior {
        HeightPrior::Independent { kappa, mu } => kappa * ln_ratio - mu * (new - old),
        HeightPrior::Martingale { alpha, .. } => {
            let (alpha_j, beta_j) = prior.conditional(previous);
            match next {
                Some(next) => {
                    (alpha_j - alpha) * ln_ratio - beta_j * (new - old)
                        - alpha * next * (1.0 / new - 1.0 / old)
                }
                None => alpha_j * ln_ratio - beta_j * (new - old),
            }
        }
    }
}

/// Log prior ratio for moving a changepoint from `old` to `new` between
/// neighbours `lower` and `upper`.
pub fn move_position_log_ratio(lower: f64, old: f64, new: f64, upper: f64) -> f64 {
    if !(new > lower && new < upper) {
        return f64::NEG_INFINITY;
    }
    (upper - new).ln() + (new - lower).ln() - (upper - old).ln() - (old - lower).ln()
}

/// Position-prior part of the first-infection acceptance:
/// `(first_cut - new)/(first_cut - old) * ((end - old)/(end - new))^(2k+1)`,
/// where `first_cut` is the first changepoint/knot, or `end` when `k = 0`.
pub fn first_infection_log_ratio(k: usize, first_cut: f64, end: f64, old: f64, new: f64) -> f64 {
    let m = (2 * k + 1) as f64;
    (first_cut - new).ln() - (first_cut - old).ln() + m * ((end - old).ln() - (end - new).ln())
}
