//! Parametric baseline: data-augmentation MCMC for the general stochastic
//! epidemic with infection rate `beta X_t Y_t`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::data::{LatentInfections, RemovalData};
use crate::error::{Error, Result};
use crate::prior::sample_gamma;
use crate::rjmcmc::{gibbs_gamma, initial_latents, MoveCounter, Scaled};
use crate::sample::{PosteriorSample, RateSample};

const RESYNC_EVERY: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MassActionConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Total population including the initial infective.
    pub population: usize,
    /// Gamma prior on `beta`; a zero rate is the improper limit.
    pub beta_shape: f64,
    pub beta_rate: f64,
    pub kappa_gamma: Scaled,
    pub mu_gamma: Scaled,
    pub theta: f64,
    /// Infection-time updates per iteration; `None` means `max(1, n / 10)`.
    pub infection_updates: Option<usize>,
}

impl Default for MassActionConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            burn_in: 1_000,
            thin: 10,
            seed: 0,
            population: 0,
            beta_shape: 1.0,
            beta_rate: 0.0,
            kappa_gamma: Scaled::Absolute(1.0),
            mu_gamma: Scaled::Absolute(0.0),
            theta: 0.0,
            infection_updates: None,
        }
    }
}

/// `sum_{i>=2} ln(X Y)` at the left limits of the ordered infection times
/// and the integral of `X_t Y_t` over `[I_(1), R_n]`; `None` when some
/// infection after the first finds no infectives.
pub fn mass_action_terms(
    sorted_infections: &[f64],
    sorted_removals: &[f64],
    population: usize,
) -> Option<(f64, f64)> {
    let mut t = *sorted_infections.first()?;
    let (mut a, mut b) = (1usize, 0usize);
    let (mut x, mut y) = (population as f64 - 1.0, 1.0f64);
    let (mut log_product, mut integral) = (0.0, 0.0);
    while a < sorted_infections.len() || b < sorted_removals.len() {
        let infection_next =
            b >= sorted_removals.len() || (a < sorted_infections.len() && sorted_infections[a] <= sorted_removals[b]);
        let next = if infection_next { sorted_infections[a] } else { sorted_removals[b] };
        integral += x * y * (next - t);
        t = next;
        if infection_next {
            if !(x > 0.0 && y > 0.0) {
                return None;
            }
            log_product += (x * y).ln();
            x -= 1.0;
            y += 1.0;
            a += 1;
        } else {
            y -= 1.0;
            b += 1;
            if y < 0.0 {
                return None;
            }
        }
    }
    Some((log_product, integral))
}

/// Contribution of the events in `[lo, hi]` to the two sums of
/// [`mass_action_terms`]. Counts before `lo` come from binary search, so the
/// cost is proportional to the number of events inside the window.
fn window_terms(inf: &[f64], rem: &[f64], population: usize, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let mut a = inf.partition_point(|&x| x < lo);
    let mut b = rem.partition_point(|&x| x < lo);
    let n_total = population as f64;
    let mut t = lo;
    let (mut log_product, mut integral) = (0.0, 0.0);
    loop {
        let ti = inf.get(a).copied().filter(|&x| x <= hi);
        let tr = rem.get(b).copied().filter(|&x| x <= hi);
        let (x, y) = (n_total - a as f64, a as f64 - b as f64);
        let infection_next = match (ti, tr) {
            (None, None) => break,
            (Some(i), Some(r)) => i <= r,
            (Some(_), None) => true,
            (None, Some(_)) => false,
        };
        let next = if infection_next { ti.unwrap() } else { tr.unwrap() };
        integral += x * y * (next - t);
        t = next;
        if infection_next {
            if a > 0 {
                if !(x > 0.0 && y > 0.0) {
                    return None;
                }
                log_product += (x * y).ln();
            }
            a += 1;
        } else {
            b += 1;
        }
    }
    let (x, y) = (n_total - a as f64, a as f64 - b as f64);
    integral += x * y * (hi - t);
    Some((log_product, integral))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MassActionStats {
    pub iterations: usize,
    pub infection_time: MoveCounter,
    /// Largest discrepancy between the incrementally updated sums and a
    /// full recomputation.
    pub max_cache_drift: f64,
    pub elapsed_secs: f64,
}

/// State of the mass-action chain.
#[derive(Debug, Clone)]
pub struct MassActionState {
    pub beta: f64,
    pub gamma: f64,
    pub latents: LatentInfections,
    sorted: Vec<f64>,
    log_product: f64,
    xy_integral: f64,
    total_period: f64,
}

impl MassActionState {
    pub fn xy_integral(&self) -> f64 {
        self.xy_integral
    }

    pub fn log_likelihood(&self) -> f64 {
        let n = self.sorted.len() as f64;
        (n - 1.0) * self.beta.ln() + self.log_product - self.beta * self.xy_integral
            + n * self.gamma.ln()
            - self.gamma * self.total_period
    }
}

pub struct MassActionSampler<'a> {
    data: &'a RemovalData,
    cfg: MassActionConfig,
    kappa_gamma: f64,
    mu_gamma: f64,
    updates: usize,
    state: MassActionState,
    rng: ChaCha8Rng,
    stats: MassActionStats,
    iteration: usize,
    scratch: Vec<f64>,
}

impl<'a> MassActionSampler<'a> {
    pub fn new(data: &'a RemovalData, cfg: &MassActionConfig) -> Result<Self> {
        let n = data.len();
        if cfg.population < n {
            return Err(Error::PopulationTooSmall { population: cfg.population, cases: n });
        }
        if cfg.thin == 0 || (cfg.iterations > 0 && cfg.burn_in >= cfg.iterations) {
            return Err(Error::Config("need iterations > burn-in and thinning >= 1".into()));
        }
        if !(cfg.beta_shape > 0.0 && cfg.beta_rate >= 0.0) {
            return Err(Error::Config("beta prior needs shape > 0 and rate >= 0".into()));
        }
        let kappa_gamma = cfg.kappa_gamma.resolve(n);
        let mu_gamma = cfg.mu_gamma.resolve(n);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mean_period = if kappa_gamma > 0.0 && mu_gamma > 0.0 { mu_gamma / kappa_gamma } else { 1.0 };
        let mut init = None;
        for _ in 0..100 {
            let latents = initial_latents(data, mean_period, &mut rng)?;
            let sorted = latents.sorted();
            if let Some((log_product, xy_integral)) = mass_action_terms(&sorted, data.times(), cfg.population) {
                if xy_integral > 0.0 {
                    let total_period = latents.total_infectious_time(data);
                    init = Some(MassActionState {
                        beta: (n.max(2) - 1) as f64 / xy_integral,
                        gamma: n as f64 / total_period,
                        latents,
                        sorted,
                        log_product,
                        xy_integral,
                        total_period,
                    });
                    break;
                }
            }
        }
        let state = init.ok_or(Error::Initialization(100))?;
        Ok(Self {
            data,
            cfg: cfg.clone(),
            kappa_gamma,
            mu_gamma,
            updates: cfg.infection_updates.unwrap_or((n / 10).max(1)),
            state,
            rng,
            stats: MassActionStats::default(),
            iteration: 0,
            scratch: Vec::with_capacity(n),
        })
    }

    pub fn state(&self) -> &MassActionState {
        &self.state
    }

    /// Gibbs steps for `beta` and `gamma` then Metropolis-Hastings updates of
    /// infection times with `R_j - I'_j ~ Exp(gamma)`.
    pub fn iterate(&mut self) -> Result<()> {
        let n = self.data.len();
        let s = &mut self.state;
        s.beta = sample_gamma(
            self.cfg.beta_shape + (n - 1) as f64,
            self.cfg.beta_rate + s.xy_integral,
            &mut self.rng,
        )?;
        s.gamma = gibbs_gamma(self.kappa_gamma, self.mu_gamma, n, s.total_period, &mut self.rng)?;
        for _ in 0..self.updates {
            self.update_infection_time();
        }
        self.iteration += 1;
        self.stats.iterations = self.iteration;
        if self.iteration.is_multiple_of(RESYNC_EVERY) {
            self.resync();
        }
        Ok(())
    }

    fn resync(&mut self) {
        let s = &mut self.state;
        if let Some((lp, integral)) = mass_action_terms(&s.sorted, self.data.times(), self.cfg.population) {
            let drift = (lp - s.log_product).abs().max((integral - s.xy_integral).abs());
            self.stats.max_cache_drift = self.stats.max_cache_drift.max(drift);
            s.log_product = lp;
            s.xy_integral = integral;
        }
    }

    fn update_infection_time(&mut self) {
        let n = self.data.len();
        let j = self.rng.random_range(0..n);
        let removal = self.data.times()[j];
        let Ok(exp) = Exp::new(self.state.gamma) else {
            self.stats.infection_time.record(false);
            return;
        };
        let new = removal - exp.sample(&mut self.rng);
        let s = &self.state;
        let old = s.latents.times()[j];
        let old_first = s.sorted[0];
        self.scratch.clear();
        self.scratch.extend_from_slice(&s.sorted);
        let from = self.scratch.partition_point(|&x| x < old);
        self.scratch.remove(from);
        let to = self.scratch.partition_point(|&x| x < new);
        self.scratch.insert(to, new);
        let (lo, hi) = (old.min(new), old.max(new));
        let population = self.cfg.population;
        let removals = self.data.times();
        let (Some(before), Some(after)) = (
            window_terms(&s.sorted, removals, population, lo, hi),
            window_terms(&self.scratch, removals, population, lo, hi),
        ) else {
            self.stats.infection_time.record(false);
            return;
        };
        let log_product = s.log_product + after.0 - before.0;
        let xy_integral = s.xy_integral + after.1 - before.1;
        let new_first = self.scratch[0];
        let ln_ratio = log_product - s.log_product - s.beta * (xy_integral - s.xy_integral)
            + self.cfg.theta * (new_first - old_first);
        let accepted = ln_ratio >= 0.0 || self.rng.random::<f64>().ln() < ln_ratio;
        if self.stats.infection_time.record(accepted) {
            let s = &mut self.state;
            std::mem::swap(&mut s.sorted, &mut self.scratch);
            s.log_product = log_product;
            s.xy_integral = xy_integral;
            s.total_period += old - new;
            let mut times = s.latents.times().to_vec();
            times[j] = new;
            s.latents = LatentInfections::new(times).expect("finite times");
        }
    }

    pub fn sample(&self) -> PosteriorSample {
        let s = &self.state;
        PosteriorSample {
            iter: self.iteration,
            gamma: s.gamma,
            mu: None,
            rate: RateSample::MassAction { beta: s.beta, population: self.cfg.population },
            i_omega: s.latents.first_infection_time(),
            omega: s.latents.omega(),
            loglik: s.log_likelihood(),
            infections: Some(s.latents.times().to_vec()),
        }
    }

    pub fn run<F>(&mut self, mut sink: F) -> Result<MassActionStats>
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
}

/// Runs the mass-action chain and collects `(beta, gamma, I)` samples.
pub fn mass_action_chain(
    data: &RemovalData,
    cfg: &MassActionConfig,
) -> Result<(Vec<PosteriorSample>, MassActionStats)> {
    let mut out = Vec::new();
    let stats = MassActionSampler::new(data, cfg)?.run(|s| {
        out.push(s);
        Ok(())
    })?;
    Ok((out, stats))
}
