//! Prior-recovery check: a data-free reversible-jump chain must reproduce
//! draws taken directly from the prior.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bspline::sample_spline_prior;
use crate::data::RemovalData;
use crate::error::{Error, Result};
use crate::prior::TruncatedPoisson;
use crate::rjmcmc::{run_chain, RateModelConfig, SamplerConfig};
use crate::sample::RateSample;
use crate::stats::{empirical_pmf, ks_two_sample, total_variation};
use crate::step::{sample_step_prior, HeightVariant};

pub const TV_THRESHOLD: f64 = 0.05;
pub const KS_P_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct PriorCheck {
    pub chain_draws: usize,
    pub ks_draws: usize,
    pub forward_draws: usize,
    pub k_pmf_chain: Vec<f64>,
    /// Exact truncated-Poisson prior on `k`.
    pub k_pmf_prior: Vec<f64>,
    pub k_tv: f64,
    /// Dimension used for the conditional first-position test.
    pub mode_k: usize,
    pub first_position_ks: f64,
    pub first_position_p: f64,
    pub first_height_ks: f64,
    pub first_height_p: f64,
    pub elapsed_secs: f64,
}

impl PriorCheck {
    /// Dimension and changepoint checks: the trans-dimensional part.
    pub fn structure_passed(&self) -> bool {
        self.k_tv < TV_THRESHOLD && self.first_position_p > KS_P_THRESHOLD
    }

    pub fn passed(&self) -> bool {
        self.structure_passed() && self.first_height_p > KS_P_THRESHOLD
    }
}

/// `(k, first changepoint or interior knot, first height or free coefficient)`.
fn summary_of(rate: &RateSample) -> (usize, Option<f64>, f64) {
    match rate {
        RateSample::Step { k, s, h, .. } => (*k, s.first().copied(), h[0]),
        RateSample::Bspline { k, t_interior, p, .. } => (*k, t_interior.first().copied(), p[1]),
        RateSample::MassAction { .. } => unreachable!("prior checks cover the nonparametric families"),
    }
}

fn require_proper(model: &RateModelConfig) -> Result<()> {
    let proper = match model {
        RateModelConfig::Step(c) => match c.variant {
            HeightVariant::Independent => c.mu_rate > 0.0,
            HeightVariant::Martingale => c.beta_0 > 0.0,
        },
        RateModelConfig::Bspline(c) => c.mu_rate > 0.0,
    };
    if proper {
        Ok(())
    } else {
        Err(Error::Config("prior recovery needs a proper height hyperprior".into()))
    }
}

/// Runs `cfg` as a prior-only chain on `data` and compares it against
/// `forward_draws` independent prior draws on the same support.
///
/// The `k` histogram uses every retained chain draw. The KS tests assume
/// independent draws, so they use only every `ks_stride`-th retained draw.
pub fn check_prior(
    data: &RemovalData,
    cfg: &SamplerConfig,
    forward_draws: usize,
    ks_stride: usize,
) -> Result<PriorCheck> {
    require_proper(&cfg.model)?;
    let started = std::time::Instant::now();
    let chain_cfg = SamplerConfig { prior_only: true, ..cfg.clone() };
    let out = run_chain(data, &chain_cfg)?;
    let first = out.samples.first().ok_or(Error::NoSamples)?;
    let (start, end) = match &first.rate {
        RateSample::Step { start, end, .. } | RateSample::Bspline { start, end, .. } => (*start, *end),
        RateSample::MassAction { .. } => unreachable!(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_f00d);
    let mut forward = Vec::with_capacity(forward_draws);
    for _ in 0..forward_draws {
        let rate: RateSample = match &cfg.model {
            RateModelConfig::Step(c) => (&sample_step_prior(start, end, c, &mut rng)?.0).into(),
            RateModelConfig::Bspline(c) => (&sample_spline_prior(start, end, c, &mut rng)?.0).into(),
        };
        forward.push(summary_of(&rate));
    }
    let chain: Vec<_> = out.samples.iter().map(|s| summary_of(&s.rate)).collect();

    let k_len = cfg.model.k_max() + 1;
    let k_pmf_chain = empirical_pmf(chain.iter().map(|c| c.0), k_len);
    let k_prior = TruncatedPoisson::new(cfg.model.lambda(), cfg.model.k_max())?;
    let k_pmf_prior: Vec<f64> = (0..k_len).map(|k| k_prior.pmf(k)).collect();
    let k_tv = total_variation(&k_pmf_chain, &k_pmf_prior);

    // Condition on the most common non-zero dimension so a position exists.
    let mode_k = (1..k_len)
        .max_by(|&a, &b| k_pmf_prior[a].total_cmp(&k_pmf_prior[b]))
        .unwrap_or(1);
    let sparse: Vec<_> = chain.iter().step_by(ks_stride.max(1)).copied().collect();
    let positions = |v: &[(usize, Option<f64>, f64)]| -> Vec<f64> {
        v.iter().filter(|c| c.0 == mode_k).filter_map(|c| c.1).collect()
    };
    let (first_position_ks, first_position_p) = ks_or_fail(&positions(&sparse), &positions(&forward));
    let heights = |v: &[(usize, Option<f64>, f64)]| -> Vec<f64> { v.iter().map(|c| c.2).collect() };
    let (first_height_ks, first_height_p) = ks_or_fail(&heights(&sparse), &heights(&forward));

    Ok(PriorCheck {
        chain_draws: chain.len(),
        ks_draws: sparse.len(),
        forward_draws,
        k_pmf_chain,
        k_pmf_prior,
        k_tv,
        mode_k,
        first_position_ks,
        first_position_p,
        first_height_ks,
        first_height_p,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

fn ks_or_fail(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        (1.0, 0.0)
    } else {
        ks_two_sample(a, b)
    }
}
