//! Fit configuration: a flat, serializable record of every prior and chain
//! setting. It can be loaded from JSON, overridden by flags and is stored in
//! the run manifest so a fit can be repeated exactly.

use std::path::Path;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sir_rate::{
    HeightVariant, MassActionConfig, RateModelConfig, SamplerConfig, Scaled, SplinePriorConfig, StepPriorConfig,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    StepIndep,
    StepMartingale,
    Bspline,
    MassAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub model: ModelKind,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub chains: usize,
    pub kappa_gamma: Scaled,
    pub mu_gamma: Scaled,
    pub theta: f64,
    pub lambda: f64,
    pub k_max: usize,
    pub kappa: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub alpha_0: f64,
    pub beta_0: f64,
    /// Total population for the mass-action model, initial infective included.
    pub population: Option<usize>,
    pub beta_shape: f64,
    pub beta_rate: f64,
    pub within_model_repeats: usize,
    pub infection_updates: Option<usize>,
    pub store_infections: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        let step = StepPriorConfig::default();
        let sampler = SamplerConfig::default();
        let mass = MassActionConfig::default();
        Self {
            model: ModelKind::StepIndep,
            iterations: sampler.iterations,
            burn_in: sampler.burn_in,
            thin: sampler.thin,
            seed: sampler.seed,
            chains: 1,
            kappa_gamma: sampler.kappa_gamma,
            mu_gamma: sampler.mu_gamma,
            theta: sampler.theta,
            lambda: step.lambda,
            k_max: step.k_max,
            kappa: step.kappa,
            a: step.mu_shape,
            b: step.mu_rate,
            alpha: step.alpha,
            alpha_0: step.alpha_0,
            beta_0: step.beta_0,
            population: None,
            beta_shape: mass.beta_shape,
            beta_rate: mass.beta_rate,
            within_model_repeats: sampler.within_model_repeats,
            infection_updates: None,
            store_infections: false,
        }
    }
}

/// Prior and chain flags shared by `fit` and `validate-prior`. Unset flags
/// leave the configured value alone.
#[derive(Debug, Clone, Default, Args)]
pub struct PriorArgs {
    /// Rate family.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shape of the Gamma prior on gamma; a number or a multiple of n such as "n".
    #[arg(long)]
    pub kappa_gamma: Option<Scaled>,
    /// Rate of the Gamma prior on gamma; a number or a multiple of n such as "4.6n".
    #[arg(long)]
    pub mu_gamma: Option<Scaled>,
    /// Rate of the exponential prior on the gap before the first removal.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Poisson mean for the number of changepoints or interior knots.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "kmax")]
    pub k_max: Option<usize>,
    /// Gamma shape of the independent heights or spline coefficients.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Hyperprior shape for mu.
    #[arg(long)]
    pub a: Option<f64>,
    /// Hyperprior rate for mu.
    #[arg(long)]
    pub b: Option<f64>,
    /// Martingale prior concentration.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "alpha0")]
    pub alpha_0: Option<f64>,
    #[arg(long = "beta0")]
    pub beta_0: Option<f64>,
    #[arg(long)]
    pub within_model_repeats: Option<usize>,
}

impl PriorArgs {
    pub fn apply(&self, cfg: &mut FitConfig) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        set!(
            model, iterations, burn_in, thin, seed, kappa_gamma, mu_gamma, theta, lambda, k_max, kappa, a, b,
            alpha, alpha_0, beta_0, within_model_repeats
        );
    }
}

impl FitConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.chains == 0 {
            return Err(CliError::usage("--chains must be at least 1"));
        }
        if self.model == ModelKind::MassAction && self.population.is_none() {
            return Err(CliError::usage("the mass-action model needs --population"));
        }
        Ok(())
    }

    /// Seed of chain `c`. Chain 0 uses the configured seed itself.
    pub fn chain_seed(&self, c: usize) -> u64 {
        self.seed.wrapping_add((c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn rate_model(&self) -> Option<RateModelConfig> {
        let step = |variant| {
            RateModelConfig::Step(StepPriorConfig {
                lambda: self.lambda,
                k_max: self.k_max,
                kappa: self.kappa,
                mu_shape: self.a,
                mu_rate: self.b,
                alpha_0: self.alpha_0,
                beta_0: self.beta_0,
                alpha: self.alpha,
                variant,
            })
        };
        match self.model {
            ModelKind::StepIndep => Some(step(HeightVariant::Independent)),
            ModelKind::StepMartingale => Some(step(HeightVariant::Martingale)),
            ModelKind::Bspline => Some(RateModelConfig::Bspline(SplinePriorConfig {
                lambda: self.lambda,
                k_max: self.k_max,
                kappa: self.kappa,
                mu_shape: self.a,
                mu_rate: self.b,
            })),
            ModelKind::MassAction => None,
        }
    }

    pub fn sampler(&self, chain: usize) -> Option<SamplerConfig> {
        Some(SamplerConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            within_model_repeats: self.within_model_repeats,
            infection_updates: self.infection_updates,
            seed: self.chain_seed(chain),
            kappa_gamma: self.kappa_gamma,
            mu_gamma: self.mu_gamma,
            theta: self.theta,
            model: self.rate_model()?,
            prior_only: false,
            store_infections: self.store_infections,
            ..SamplerConfig::default()
        })
    }

    pub fn mass_action(&self, chain: usize) -> MassActionConfig {
        MassActionConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            seed: self.chain_seed(chain),
            population: self.population.unwrap_or(0),
            beta_shape: self.beta_shape,
            beta_rate: self.beta_rate,
            kappa_gamma: self.kappa_gamma,
            mu_gamma: self.mu_gamma,
            theta: self.theta,
            infection_updates: self.infection_updates,
        }
    }
}
