use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bspline::SplinePriorConfig;
use crate::error::{Error, Result};
use crate::step::StepPriorConfig;

/// A prior hyperparameter given either absolutely or as a multiple of the
/// number of cases `n` (written `"4.6n"`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaled {
    Absolute(f64),
    PerCase(f64),
}

impl Scaled {
    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            Scaled::Absolute(v) => v,
            Scaled::PerCase(m) => m * n as f64,
        }
    }
}

impl FromStr for Scaled {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("cannot parse {s:?} as a number or multiple of n"));
        if let Some(m) = s.strip_suffix('n') {
            let m = m.trim().trim_end_matches('*');
            if m.is_empty() {
                return Ok(Scaled::PerCase(1.0));
            }
            return m.parse().map(Scaled::PerCase).map_err(|_| bad());
        }
        s.parse().map(Scaled::Absolute).map_err(|_| bad())
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scaled::Absolute(v) => write!(f, "{v}"),
            Scaled::PerCase(m) if *m == 1.0 => write!(f, "n"),
            Scaled::PerCase(m) => write!(f, "{m}n"),
        }
    }
}

impl Serialize for Scaled {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scaled::Absolute(v) => s.serialize_f64(*v),
            Scaled::PerCase(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Scaled {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Scaled::Absolute(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Rate model and its prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RateModelConfig {
    Step(StepPriorConfig),
    Bspline(SplinePriorConfig),
}

impl RateModelConfig {
    pub fn lambda(&self) -> f64 {
        match self {
            RateModelConfig::Step(c) => c.lambda,
            RateModelConfig::Bspline(c) => c.lambda,
        }
    }

    pub fn k_max(&self) -> usize {
        match self {
            RateModelConfig::Step(c) => c.k_max,
            RateModelConfig::Bspline(c) => c.k_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Repeats of the move-position and change-value updates whenever a
    /// within-model step is chosen.
    pub within_model_repeats: usize,
    /// Infection-time updates per iteration; `None` means `max(1, n / 10)`.
    pub infection_updates: Option<usize>,
    pub seed: u64,
    pub kappa_gamma: Scaled,
    pub mu_gamma: Scaled,
    /// Rate of the exponential prior on `R_1 - I_omega`; zero is flat.
    pub theta: f64,
    pub model: RateModelConfig,
    /// Sample the rate prior only: likelihood held constant, latent
    /// infections and `gamma` frozen.
    pub prior_only: bool,
    /// Attach each sample's infection times (needed for per-infective rates).
    pub store_infections: bool,
    /// Recompute the cached likelihood this often and record the drift.
    pub check_every: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            burn_in: 1_000,
            thin: 10,
            within_model_repeats: 1,
            infection_updates: None,
            seed: 0,
            kappa_gamma: Scaled::Absolute(1.0),
            mu_gamma: Scaled::Absolute(0.0),
            theta: 0.0,
            model: RateModelConfig::Step(StepPriorConfig::default()),
            prior_only: false,
            store_infections: false,
            check_every: 1_000,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations > 0 && self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn-in {} must be smaller than iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thinning must be at least 1".into()));
        }
        if self.check_every == 0 {
            return Err(Error::Config("check_every must be at least 1".into()));
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(Error::InvalidParameter { name: "theta", value: self.theta });
        }
        match &self.model {
            RateModelConfig::Step(c) => c.validate(),
            RateModelConfig::Bspline(c) => c.validate(),
        }
    }

    pub fn infection_updates_for(&self, n: usize) -> usize {
        self.infection_updates.unwrap_or((n / 10).max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_parsing() {
        assert_eq!("n".parse::<Scaled>().unwrap(), Scaled::PerCase(1.0));
        assert_eq!("4.6n".parse::<Scaled>().unwrap(), Scaled::PerCase(4.6));
        assert_eq!("0".parse::<Scaled>().unwrap(), Scaled::Absolute(0.0));
        assert!("4.6m".parse::<Scaled>().is_err());
        assert_eq!(Scaled::PerCase(4.6).resolve(10), 46.0);
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SamplerConfig { mu_gamma: Scaled::PerCase(4.6), ..Default::default() };
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"4.6n\""));
        let back: SamplerConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_chain_controls() {
        let cfg = SamplerConfig { iterations: 10, burn_in: 10, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig { thin: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig { iterations: 0, burn_in: 0, ..Default::default() };
        assert!(cfg.validate().is_ok());
    }
}
