use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1};
use serde::Serialize;

use super::config::{RateModelConfig, SamplerConfig};
use super::gibbs::{gibbs_gamma, gibbs_mu};
use super::model::PiecewiseRate;
use super::moves::{
    birth_log_ratio, change_height_log_ratio, first_infection_log_ratio, merge_heights,
    move_position_log_ratio, split_heights, BirthGeometry, HeightPrior, SplitHeights,
};
use super::schedule::MoveSchedule;
use crate::bspline::SplineRate;
use crate::data::{chi_holds_sorted, rate_log_terms, LatentInfections, RemovalData};
use crate::error::{Error, Result};
use crate::prior::TruncatedPoisson;
use crate::sample::{PosteriorSample, RateSample};
use crate::step::{HeightVariant, StepRate};

const INIT_ATTEMPTS: usize = 100;

/// Rate models the reversible-jump sampler can drive.
pub trait ChainModel: PiecewiseRate + Send {
    /// Starting rate with `k` evenly spaced changepoints or knots, its values
    /// set from the empirical intensity of the initial infection times.
    fn initial(start: f64, end: f64, k: usize, later: &[f64]) -> Result<Self>;
    fn to_sample(&self) -> RateSample;
}

fn even_positions(start: f64, end: f64, k: usize) -> Vec<f64> {
    (1..=k).map(|i| start + (end - start) * i as f64 / (k + 1) as f64).collect()
}

/// Infections per unit time in `[a, b)`, floored at half an event so the
/// starting rate is strictly positive.
fn intensity(later: &[f64], a: f64, b: f64) -> f64 {
    let count = later.partition_point(|&t| t < b) - later.partition_point(|&t| t < a);
    (count as f64).max(0.5) / (b - a)
}

impl ChainModel for StepRate {
    fn initial(start: f64, end: f64, k: usize, later: &[f64]) -> Result<Self> {
        let cuts = even_positions(start, end, k);
        let bounds: Vec<f64> = std::iter::once(start).chain(cuts.iter().copied()).chain([end]).collect();
        let heights = bounds.windows(2).map(|w| intensity(later, w[0], w[1])).collect();
        StepRate::new(start, end, cuts, heights)
    }

    fn to_sample(&self) -> RateSample {
        self.into()
    }
}

impl ChainModel for SplineRate {
    fn initial(start: f64, end: f64, k: usize, later: &[f64]) -> Result<Self> {
        let interior = even_positions(start, end, k);
        let knots: Vec<f64> = [start, start, start]
            .into_iter()
            .chain(interior.iter().copied())
            .chain([end, end, end])
            .collect();
        // Free coefficient P_{f+2} weights a basis function supported on
        // [t_{f+1}, t_{f+4}].
        let free = (0..=k).map(|f| intensity(later, knots[f + 1], knots[f + 4])).collect();
        SplineRate::new(start, end, interior, free)
    }

    fn to_sample(&self) -> RateSample {
        self.into()
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct MoveCounter {
    pub proposed: u64,
    pub accepted: u64,
}

impl MoveCounter {
    pub(crate) fn record(&mut self, accepted: bool) -> bool {
        self.proposed += 1;
        self.accepted += u64::from(accepted);
        accepted
    }

    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ChainStats {
    pub iterations: usize,
    pub birth: MoveCounter,
    pub death: MoveCounter,
    pub move_position: MoveCounter,
    pub change_value: MoveCounter,
    pub infection_time: MoveCounter,
    pub first_infection: MoveCounter,
    pub omega: MoveCounter,
    /// Largest `|cached - recomputed|` log-likelihood seen at a check.
    pub max_cache_drift: f64,
    /// Acceptance log-ratios that came out NaN (should stay zero).
    pub nan_ratios: u64,
    pub elapsed_secs: f64,
}

/// Full state of one chain: rate, `gamma`, `mu`, latent infections and the
/// cached likelihood pieces.
#[derive(Debug, Clone)]
pub struct ChainState<M> {
    rate: M,
    gamma: f64,
    mu: Option<f64>,
    latents: LatentInfections,
    /// Infection times other than `I_omega`, ascending.
    later: Vec<f64>,
    total_period: f64,
    /// `sum ln h(I_(i)-) - int h`.
    rate_terms: f64,
}

impl<M: ChainModel> ChainState<M> {
    pub fn rate(&self) -> &M {
        &self.rate
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    pub fn latents(&self) -> &LatentInfections {
        &self.latents
    }

    /// Cached augmented log-likelihood.
    pub fn log_likelihood(&self) -> f64 {
        let n = self.latents.len() as f64;
        n * self.gamma.ln() - self.gamma * self.total_period + self.rate_terms
    }

    /// Log-likelihood recomputed from scratch.
    pub fn recomputed_log_likelihood(&self, data: &RemovalData) -> Result<f64> {
        crate::data::log_likelihood(&self.latents, data, &self.rate, self.gamma)
    }
}

#[derive(Debug, Clone, Copy)]
enum Heights {
    Independent { kappa: f64, a: f64, b: f64 },
    Martingale { alpha_0: f64, beta_0: f64, alpha: f64 },
}

/// Reversible-jump sampler for one rate family.
pub struct Sampler<'a, M> {
    data: &'a RemovalData,
    cfg: SamplerConfig,
    heights: Heights,
    k_prior: TruncatedPoisson,
    schedule: MoveSchedule,
    kappa_gamma: f64,
    mu_gamma: f64,
    infection_updates: usize,
    state: ChainState<M>,
    rng: ChaCha8Rng,
    stats: ChainStats,
    iteration: usize,
}

impl<'a, M: ChainModel> Sampler<'a, M> {
    pub fn new(data: &'a RemovalData, cfg: &SamplerConfig) -> Result<Self> {
        cfg.validate()?;
        let n = data.len();
        let kappa_gamma = cfg.kappa_gamma.resolve(n);
        let mu_gamma = cfg.mu_gamma.resolve(n);
        if !(kappa_gamma >= 0.0 && mu_gamma >= 0.0) {
            return Err(Error::Config("gamma prior parameters must be non-negative".into()));
        }
        let heights = match &cfg.model {
            RateModelConfig::Step(c) => match c.variant {
                HeightVariant::Independent => {
                    Heights::Independent { kappa: c.kappa, a: c.mu_shape, b: c.mu_rate }
                }
                HeightVariant::Martingale => {
                    Heights::Martingale { alpha_0: c.alpha_0, beta_0: c.beta_0, alpha: c.alpha }
                }
            },
            RateModelConfig::Bspline(c) => {
                Heights::Independent { kappa: c.kappa, a: c.mu_shape, b: c.mu_rate }
            }
        };
        let k_prior = TruncatedPoisson::new(cfg.model.lambda(), cfg.model.k_max())?;
        let schedule = MoveSchedule::new(&k_prior);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mean_period = if kappa_gamma > 0.0 && mu_gamma > 0.0 { mu_gamma / kappa_gamma } else { 1.0 };
        let state = initial_state::<M>(data, mean_period, heights, k_prior.mode(), &mut rng)?;
        Ok(Self {
            data,
            cfg: cfg.clone(),
            heights,
            k_prior,
            schedule,
            kappa_gamma,
            mu_gamma,
            infection_updates: cfg.infection_updates_for(n),
            state,
            rng,
            stats: ChainStats::default(),
            iteration: 0,
        })
    }

    pub fn state(&self) -> &ChainState<M> {
        &self.state
    }

    pub fn stats(&self) -> &ChainStats {
        &self.stats
    }

    pub fn schedule(&self) -> &MoveSchedule {
        &self.schedule
    }

    /// Runs all configured iterations, handing each retained sample to `sink`.
    pub fn run<F>(&mut self, mut sink: F) -> Result<ChainStats>
    where
        F: FnMut(PosteriorSample) -> Result<()>,
    {
        let started = Instant::now();
        while self.iteration < self.cfg.iterations {
            self.iterate()?;
            let it = self.iteration;
            if it > self.cfg.burn_in && (it - self.cfg.burn_in).is_multiple_of(self.cfg.thin) {
                sink(self.sample())?;
            }
        }
        self.stats.elapsed_secs = started.elapsed().as_secs_f64();
        Ok(self.stats.clone())
    }

    pub fn sample(&self) -> PosteriorSample {
        let s = &self.state;
        PosteriorSample {
            iter: self.iteration,
            gamma: s.gamma,
            mu: s.mu,
            rate: s.rate.to_sample(),
            i_omega: s.latents.first_infection_time(),
            omega: s.latents.omega(),
            loglik: if self.cfg.prior_only { 0.0 } else { s.log_likelihood() },
            infections: self.cfg.store_infections.then(|| s.latents.times().to_vec()),
        }
    }

    /// One full sweep: `gamma`, one scheduled rate move, `mu`, then the
    /// latent infection updates.
    pub fn iterate(&mut self) -> Result<()> {
        if !self.cfg.prior_only {
            self.state.gamma = gibbs_gamma(
                self.kappa_gamma,
                self.mu_gamma,
                self.data.len(),
                self.state.total_period,
                &mut self.rng,
            )?;
        }
        self.rate_move();
        self.update_mu()?;
        if !self.cfg.prior_only {
            for _ in 0..self.infection_updates {
                self.update_infection_time();
            }
            self.update_first_infection();
            self.update_omega();
        }
        self.iteration += 1;
        self.stats.iterations = self.iteration;
        if self.iteration.is_multiple_of(self.cfg.check_every) && !self.cfg.prior_only {
            self.resync();
        }
        Ok(())
    }

    fn resync(&mut self) {
        let fresh = rate_log_terms(&self.state.rate, &self.state.later);
        let drift = (fresh - self.state.rate_terms).abs();
        self.stats.max_cache_drift = self.stats.max_cache_drift.max(drift);
        self.state.rate_terms = fresh;
        debug_assert!(self.state.later.iter().zip(self.data.times()).all(|(i, r)| i <= r));
    }

    fn height_prior(&self) -> HeightPrior {
        match self.heights {
            Heights::Independent { kappa, .. } => {
                HeightPrior::Independent { kappa, mu: self.state.mu.unwrap_or(f64::NAN) }
            }
            Heights::Martingale { alpha_0, beta_0, alpha } => {
                HeightPrior::Martingale { alpha_0, beta_0, alpha }
            }
        }
    }

    fn accept(&mut self, ln_ratio: f64) -> bool {
        if ln_ratio.is_nan() {
            self.stats.nan_ratios += 1;
            return false;
        }
        if ln_ratio >= 0.0 {
            return true;
        }
        let u: f64 = self.rng.random();
        u.ln() < ln_ratio
    }

    /// Change in `rate_terms` from `old` to `new`, which agree outside
    /// `[lo, hi]`.
    fn rate_delta(&self, old: &M, new: &M, lo: f64, hi: f64) -> f64 {
        if self.cfg.prior_only {
            return 0.0;
        }
        let later = &self.state.later;
        let gained = new.log_sum_in(later, lo, hi);
        if gained == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        gained - old.log_sum_in(later, lo, hi) - new.integral() + old.integral()
    }

    fn rate_move(&mut self) {
        let k = self.state.rate.k();
        let u: f64 = self.rng.random();
        let (b, d) = (self.schedule.birth(k), self.schedule.death(k));
        if u < b {
            self.birth();
        } else if u < b + d {
            self.death();
        } else {
            for _ in 0..self.cfg.within_model_repeats {
                self.move_position();
            }
            for _ in 0..self.cfg.within_model_repeats {
                self.change_value();
            }
        }
    }

    fn birth(&mut self) {
        let rate = &self.state.rate;
        let k = rate.k();
        if k >= self.k_prior.k_max() {
            return;
        }
        let (start, end) = rate.support();
        let at = start + (end - start) * self.rng.random::<f64>();
        let u: f64 = self.rng.random();
        let j = segment_containing(rate, at);
        let (a, b) = (rate.position(j), rate.position(j + 1));
        if !(at > a && at < b) || u <= 0.0 {
            self.stats.birth.record(false);
            return;
        }
        let old = rate.value(j);
        let (left, right) = split_heights(old, at - a, b - at, u);
        if !(left > 0.0 && right > 0.0 && left.is_finite() && right.is_finite()) {
            self.stats.birth.record(false);
            return;
        }
        let hs = SplitHeights {
            previous: (j > 0).then(|| rate.value(j - 1)),
            old,
            next: (j < k).then(|| rate.value(j + 1)),
            left,
            right,
        };
        let geom = BirthGeometry { k, support_len: end - start, left_len: at - a, right_len: b - at };
        let ln_prior = birth_log_ratio(
            &geom,
            self.k_prior.ln_pmf(k),
            self.k_prior.ln_pmf(k + 1),
            &self.schedule,
            &self.height_prior(),
            &hs,
        );
        let mut proposal = rate.clone();
        proposal.insert(j, at, left, right);
        let (lo, hi) = union(rate.influence(j, j), proposal.influence(j, j + 1));
        let delta = self.rate_delta(rate, &proposal, lo, hi);
        let accepted = self.accept(ln_prior + delta);
        if self.stats.birth.record(accepted) {
            self.state.rate = proposal;
            self.state.rate_terms += delta;
        }
    }

    fn death(&mut self) {
        let rate = &self.state.rate;
        let k = rate.k();
        if k == 0 {
            return;
        }
        let j = self.rng.random_range(0..k);
        let (a, mid, b) = (rate.position(j), rate.position(j + 1), rate.position(j + 2));
        let (left, right) = (rate.value(j), rate.value(j + 1));
        let merged = merge_heights(left, right, mid - a, b - mid);
        let hs = SplitHeights {
            previous: (j > 0).then(|| rate.value(j - 1)),
            old: merged,
            next: (j + 2 <= k).then(|| rate.value(j + 2)),
            left,
            right,
        };
        let (start, end) = rate.support();
        let geom = BirthGeometry { k: k - 1, support_len: end - start, left_len: mid - a, right_len: b - mid };
        let ln_prior = -birth_log_ratio(
            &geom,
            self.k_prior.ln_pmf(k - 1),
            self.k_prior.ln_pmf(k),
            &self.schedule,
            &self.height_prior(),
            &hs,
        );
        let mut proposal = rate.clone();
        proposal.remove(j, merged);
        let (lo, hi) = union(rate.influence(j, j + 1), proposal.influence(j, j));
        let delta = self.rate_delta(rate, &proposal, lo, hi);
        let accepted = self.accept(ln_prior + delta);
        if self.stats.death.record(accepted) {
            self.state.rate = proposal;
            self.state.rate_terms += delta;
        }
    }

    fn move_position(&mut self) {
        let rate = &self.state.rate;
        let k = rate.k();
        if k == 0 {
            return;
        }
        let p = self.rng.random_range(1..=k);
        let (lower, old, upper) = (rate.position(p - 1), rate.position(p), rate.position(p + 1));
        let new = lower + (upper - lower) * self.rng.random::<f64>();
        let ln_prior = move_position_log_ratio(lower, old, new, upper);
        if ln_prior == f64::NEG_INFINITY {
            self.stats.move_position.record(false);
            return;
        }
        let mut proposal = rate.clone();
        proposal.set_position(p, new);
        let (lo, hi) = union(rate.influence(p - 1, p), proposal.influence(p - 1, p));
        let delta = self.rate_delta(rate, &proposal, lo, hi);
        let accepted = self.accept(ln_prior + delta);
        if self.stats.move_position.record(accepted) {
            self.state.rate = proposal;
            self.state.rate_terms += delta;
        }
    }

    fn change_value(&mut self) {
        let rate = &self.state.rate;
        let k = rate.k();
        let j = self.rng.random_range(0..=k);
        let old = rate.value(j);
        let new = old * (self.rng.random::<f64>() - 0.5).exp();
        let ln_prior = change_height_log_ratio(
            &self.height_prior(),
            (j > 0).then(|| rate.value(j - 1)),
            old,
            new,
            (j < k).then(|| rate.value(j + 1)),
        );
        let mut proposal = rate.clone();
        proposal.set_value(j, new);
        let (lo, hi) = rate.influence(j, j);
        let delta = self.rate_delta(rate, &proposal, lo, hi);
        let accepted = self.accept(ln_prior + delta);
        if self.stats.change_value.record(accepted) {
            self.state.rate = proposal;
            self.state.rate_terms += delta;
        }
    }

    fn update_mu(&mut self) -> Result<()> {
        if let Heights::Independent { kappa, a, b } = self.heights {
            self.state.mu = Some(gibbs_mu(a, b, kappa, self.state.rate.values(), &mut self.rng)?);
        }
        Ok(())
    }

    /// Proposes `R_j - I'_j ~ Exp(gamma)` truncated to `(0, R_j - I_omega]`
    /// for a non-initial individual `j`.
    fn update_infection_time(&mut self) {
        let n = self.data.len();
        if n < 2 {
            return;
        }
        let omega = self.state.latents.omega();
        let mut j = self.rng.random_range(0..n - 1);
        if j >= omega {
            j += 1;
        }
        let removal = self.data.times()[j];
        let first = self.state.latents.first_infection_time();
        let gamma = self.state.gamma;
        let span = removal - first;
        let u: f64 = self.rng.random();
        let period = -(-u * (-(-gamma * span).exp_m1())).ln_1p() / gamma;
        let new = removal - period;
        let old = self.state.latents.times()[j];
        if !(new > first && new < removal) {
            self.stats.infection_time.record(false);
            return;
        }
        let (h_new, h_old) = (self.state.rate.left_limit_at(new), self.state.rate.left_limit_at(old));
        if !(h_new > 0.0) {
            self.stats.infection_time.record(false);
            return;
        }
        let ln_ratio = h_new.ln() - h_old.ln();
        if !self.accept(ln_ratio) {
            self.stats.infection_time.record(false);
            return;
        }
        let later = &mut self.state.later;
        let from = later.partition_point(|&x| x < old);
        debug_assert_eq!(later[from], old);
        later.remove(from);
        let to = later.partition_point(|&x| x < new);
        later.insert(to, new);
        let removals = self.data.times();
        let (lo, hi) = (from.min(to), from.max(to));
        if !(lo..=hi).all(|i| later[i] <= removals[i]) {
            later.remove(to);
            later.insert(from, old);
            self.stats.infection_time.record(false);
            return;
        }
        self.stats.infection_time.record(true);
        self.state.latents.set(j, new);
        self.state.total_period += old - new;
        self.state.rate_terms += ln_ratio;
    }

    /// Independence proposal for `I_omega` below the second infection and
    /// the first changepoint/knot.
    fn update_first_infection(&mut self) {
        let rate = &self.state.rate;
        let k = rate.k();
        let (_, end) = rate.support();
        let first_cut = rate.position(1);
        let ceiling = self.state.later.first().map_or(first_cut, |&t| t.min(first_cut));
        let pressure = rate.first_segment_pressure();
        let proposal_rate = self.cfg.theta + self.state.gamma + pressure;
        let Ok(exp) = Exp::new(proposal_rate) else {
            self.stats.first_infection.record(false);
            return;
        };
        let new = ceiling - exp.sample(&mut self.rng);
        let old = self.state.latents.first_infection_time();
        let removal = self.data.times()[self.state.latents.omega()];
        if !(new < ceiling && new < removal && new.is_finite()) {
            self.stats.first_infection.record(false);
            return;
        }
        let mut proposal = rate.clone();
        proposal.set_start(new);
        let (_, hi_old) = rate.influence(0, 0);
        let (_, hi_new) = proposal.influence(0, 0);
        let delta = self.rate_delta(rate, &proposal, old.min(new), hi_old.max(hi_new));
        let ln_ratio = delta - pressure * (new - old)
            + first_infection_log_ratio(k, first_cut, end, old, new);
        let accepted = self.accept(ln_ratio);
        if self.stats.first_infection.record(accepted) {
            self.state.rate = proposal;
            self.state.rate_terms += delta;
            let omega = self.state.latents.omega();
            self.state.latents.set(omega, new);
            self.state.total_period += old - new;
        }
    }

    /// Relabels the initial infective among those infected before its
    /// removal, swapping infection times.
    fn update_omega(&mut self) {
        let omega = self.state.latents.omega();
        let removals = self.data.times();
        let later = &self.state.later;
        let forward = 1 + later.partition_point(|&x| x < removals[omega]);
        let pick = self.rng.random_range(0..forward);
        let infections = self.state.latents.times();
        let target = infections
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t < removals[omega])
            .nth(pick)
            .map(|(i, _)| i)
            .unwrap_or(omega);
        if target == omega {
            self.stats.omega.record(true);
            return;
        }
        let backward = 1 + later.partition_point(|&x| x < removals[target]);
        let ln_ratio = (forward as f64).ln() - (backward as f64).ln();
        if self.accept(ln_ratio) {
            self.state.latents.swap_with_first(target);
            self.stats.omega.record(true);
        } else {
            self.stats.omega.record(false);
        }
    }
}

fn union(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0.min(b.0), a.1.max(b.1))
}

/// Segment `j` with `position(j) <= at < position(j + 1)`.
fn segment_containing<M: PiecewiseRate>(rate: &M, at: f64) -> usize {
    let (mut lo, mut hi) = (0usize, rate.k());
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if rate.position(mid) <= at {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Draws infection times `R_i - E_i`, pulling any individual that would
/// leave a gap with no infectives back before the previous removal.
pub fn initial_latents<R: Rng + ?Sized>(
    data: &RemovalData,
    mean_period: f64,
    rng: &mut R,
) -> Result<LatentInfections> {
    let removals = data.times();
    let mut infections = Vec::with_capacity(removals.len());
    for (i, &r) in removals.iter().enumerate() {
        let e: f64 = Exp1.sample(rng);
        let mut t = r - mean_period * e.max(1e-6);
        if i > 0 && t > removals[i - 1] {
            let e: f64 = Exp1.sample(rng);
            t = removals[i - 1] - mean_period * 0.1 * e.max(1e-6);
        }
        infections.push(t);
    }
    LatentInfections::new(infections)
}

fn initial_state<M: ChainModel>(
    data: &RemovalData,
    mean_period: f64,
    heights: Heights,
    k0: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ChainState<M>> {
    for _ in 0..INIT_ATTEMPTS {
        let latents = initial_latents(data, mean_period, rng)?;
        let sorted = latents.sorted();
        if !chi_holds_sorted(&sorted, data.times()) || sorted.len() > 1 && sorted[1] <= sorted[0] {
            continue;
        }
        let rate = M::initial(sorted[0], data.last(), k0, &sorted[1..])?;
        let later = sorted[1..].to_vec();
        let rate_terms = rate_log_terms(&rate, &later);
        if !rate_terms.is_finite() {
            continue;
        }
        let total_period = latents.total_infectious_time(data);
        let gamma = data.len() as f64 / total_period;
        let mu = match heights {
            Heights::Independent { kappa, .. } => {
                let mean = rate.values().iter().sum::<f64>() / rate.values().len() as f64;
                Some(kappa / mean)
            }
            Heights::Martingale { .. } => None,
        };
        return Ok(ChainState { rate, gamma, mu, latents, later, total_period, rate_terms });
    }
    Err(Error::Initialization(INIT_ATTEMPTS))
}

/// Summary returned by [`run_chain`].
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub samples: Vec<PosteriorSample>,
    pub stats: ChainStats,
}

/// Runs one chain for the configured rate family, streaming samples into
/// `sink`.
pub fn run_chain_with<F>(data: &RemovalData, cfg: &SamplerConfig, sink: F) -> Result<ChainStats>
where
    F: FnMut(PosteriorSample) -> Result<()>,
{
    match cfg.model {
        RateModelConfig::Step(_) => Sampler::<StepRate>::new(data, cfg)?.run(sink),
        RateModelConfig::Bspline(_) => Sampler::<SplineRate>::new(data, cfg)?.run(sink),
    }
}

/// Runs one chain and collects its samples.
pub fn run_chain(data: &RemovalData, cfg: &SamplerConfig) -> Result<ChainOutput> {
    let mut samples = Vec::new();
    let stats = run_chain_with(data, cfg, |s| {
        samples.push(s);
        Ok(())
    })?;
    Ok(ChainOutput { samples, stats })
}
