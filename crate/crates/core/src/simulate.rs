//! Synthetic epidemics from the Markov SIR model and its seasonally modulated
//! variant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::data::{LatentInfections, RemovalData};
use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Resimulation budget when conditioning on a major outbreak.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimVariant {
    #[default]
    MassAction,
    /// Infection rate `beta (1 + cos(t - I_(1))) X_t Y_t`.
    Seasonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Initial susceptibles; one further individual starts infective.
    pub susceptibles: usize,
    pub beta: f64,
    pub gamma: f64,
    pub variant: SimVariant,
    pub seed: u64,
    /// Resimulate until at least this many individuals were ever infective.
    /// `None` uses 10% of the susceptibles when `beta N / gamma > 1` and no
    /// filter otherwise, since a subcritical epidemic has no major outbreak
    /// to condition on. `Some(0)` disables the filter.
    pub min_final_size: Option<usize>,
}

impl SimConfig {
    pub fn new(susceptibles: usize, beta: f64, gamma: f64) -> Self {
        Self { susceptibles, beta, gamma, variant: SimVariant::MassAction, seed: 0, min_final_size: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.susceptibles == 0 {
            return Err(Error::Config("need at least one susceptible".into()));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter { name: "beta", value: self.beta });
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter { name: "gamma", value: self.gamma });
        }
        Ok(())
    }

    pub fn threshold(&self) -> usize {
        self.min_final_size.unwrap_or_else(|| {
            if self.beta * self.susceptibles as f64 > self.gamma {
                self.susceptibles.div_ceil(10)
            } else {
                0
            }
        })
    }

    /// Total population `N + 1`, the initial infective included.
    pub fn population(&self) -> usize {
        self.susceptibles + 1
    }
}

/// Ground truth of a simulated epidemic, in the shifted time frame where the
/// first removal is at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTruth {
    pub beta: f64,
    pub gamma: f64,
    pub model: SimVariant,
    pub population: usize,
    /// Amount subtracted from raw simulation times.
    pub shift: f64,
    pub first_infection: f64,
    /// Infection times aligned with the sorted removal times.
    pub infections: Vec<f64>,
    pub removals: Vec<f64>,
    /// `(t, x, y)` after every event, starting with the initial infection.
    pub events: Vec<(f64, usize, usize)>,
}

impl SimTruth {
    pub fn modulation(&self, t: f64) -> f64 {
        match self.model {
            SimVariant::MassAction => 1.0,
            SimVariant::Seasonal => 1.0 + (t - self.first_infection).cos(),
        }
    }

    /// Realised infection rate `beta m(t) X_t Y_t` (right-continuous).
    pub fn rate_at(&self, t: f64) -> f64 {
        let i = self.events.partition_point(|e| e.0 <= t);
        if i == 0 {
            return 0.0;
        }
        let (_, x, y) = self.events[i - 1];
        self.beta * self.modulation(t) * x as f64 * y as f64
    }

    pub fn trajectory(&self) -> Trajectory {
        Trajectory::from_events(&self.infections, &self.removals)
    }

    pub fn final_size(&self) -> usize {
        self.removals.len()
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub removals: RemovalData,
    pub infections: LatentInfections,
    pub truth: SimTruth,
    /// Number of simulations run, including rejected minor outbreaks.
    pub attempts: usize,
}

/// Raw simulation in unshifted time: `(infection, removal)` per individual.
fn gillespie<R, F>(cfg: &SimConfig, modulation: F, bound: f64, rng: &mut R) -> Vec<(f64, f64)>
where
    R: Rng + ?Sized,
    F: Fn(f64) -> f64,
{
    let mut people = vec![(0.0, f64::NAN)];
    let mut active = vec![0usize];
    let mut x = cfg.susceptibles;
    let mut t = 0.0;
    while !active.is_empty() {
        let y = active.len() as f64;
        let infection = bound * cfg.beta * x as f64 * y;
        let removal = cfg.gamma * y;
        let total = infection + removal;
        let dt: f64 = Exp1.sample(rng);
        t += dt / total;
        if rng.random::<f64>() * total < infection {
            if rng.random::<f64>() * bound < modulation(t) {
                x -= 1;
                active.push(people.len());
                people.push((t, f64::NAN));
            }
        } else {
            let who = active.swap_remove(rng.random_range(0..active.len()));
            people[who].1 = t;
        }
    }
    people
}

fn finish(cfg: &SimConfig, mut people: Vec<(f64, f64)>, attempts: usize) -> Result<SimOutput> {
    people.sort_by(|a, b| a.1.total_cmp(&b.1));
    let shift = people[0].1;
    let infections: Vec<f64> = people.iter().map(|p| p.0 - shift).collect();
    let removals: Vec<f64> = people.iter().map(|p| p.1 - shift).collect();
    let trajectory = Trajectory::from_events(&infections, &removals);
    let population = cfg.population();
    let mut events: Vec<(f64, usize, usize)> = trajectory.states(population).collect();
    events.dedup_by(|b, a| {
        // Collapse simultaneous events onto the final state at that time.
        if a.0 == b.0 {
            *a = *b;
            true
        } else {
            false
        }
    });
    let latents = LatentInfections::new(infections.clone())?;
    let truth = SimTruth {
        beta: cfg.beta,
        gamma: cfg.gamma,
        model: cfg.variant,
        population,
        shift,
        first_infection: -shift,
        infections,
        removals: removals.clone(),
        events,
    };
    Ok(SimOutput { removals: RemovalData::new(removals)?, infections: latents, truth, attempts })
}

fn simulate_conditioned<R, F>(cfg: &SimConfig, modulation: F, bound: f64, rng: &mut R) -> Result<SimOutput>
where
    R: Rng + ?Sized,
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let threshold = cfg.threshold();
    for attempt in 1..=MAX_ATTEMPTS {
        let people = gillespie(cfg, &modulation, bound, rng);
        if people.len() >= threshold {
            return finish(cfg, people, attempt);
        }
    }
    Err(Error::NoMajorOutbreak { threshold, attempts: MAX_ATTEMPTS })
}

/// Exact simulation of the general stochastic epidemic with infection rate
/// `beta x y` and removal rate `gamma y`.
pub fn simulate_gse<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<SimOutput> {
    simulate_conditioned(cfg, |_| 1.0, 1.0, rng)
}

/// Infection rate `beta m(t) x y` with `0 <= m(t) <= bound`, simulated by
/// thinning candidate infections from the dominating rate `bound beta x y`.
/// Time is measured from the initial infection.
pub fn simulate_modulated<R, F>(cfg: &SimConfig, modulation: F, bound: f64, rng: &mut R) -> Result<SimOutput>
where
    R: Rng + ?Sized,
    F: Fn(f64) -> f64,
{
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::InvalidParameter { name: "bound", value: bound });
    }
    simulate_conditioned(cfg, modulation, bound, rng)
}

/// Seasonal model `beta (1 + cos(t - I_(1))) X_t Y_t`.
pub fn simulate_seasonal<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<SimOutput> {
    let mut out = simulate_modulated(cfg, |t| 1.0 + t.cos(), 2.0, rng)?;
    out.truth.model = SimVariant::Seasonal;
    Ok(out)
}

/// Dispatches on the configured variant with an RNG seeded from `cfg.seed`.
pub fn simulate(cfg: &SimConfig) -> Result<SimOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.variant {
        SimVariant::MassAction => simulate_gse(cfg, &mut rng),
        SimVariant::Seasonal => simulate_seasonal(cfg, &mut rng),
    }
}
