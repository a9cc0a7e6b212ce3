//! Bayesian non-parametric estimation of the infection rate `h(t)` of a
//! partially observed SIR epidemic from removal times alone.
//!
//! The rate is modelled either as a step function or as a continuous
//! piecewise-quadratic B-spline; posterior sampling uses reversible-jump
//! MCMC with the unobserved infection times as latent variables. A
//! parametric mass-action sampler and exact epidemic simulators are
//! provided for comparison and validation.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bspline;
pub mod data;
pub mod error;
pub mod mass_action;
pub mod prior;
pub mod rjmcmc;
pub mod sample;
pub mod simulate;
pub mod stats;
pub mod step;
pub mod summary;
pub mod trajectory;
pub mod validate;

pub use bspline::{bspline_basis, bspline_log_prior, SplinePriorConfig, SplineRate};
pub use data::{chi_valid, log_likelihood, LatentInfections, RateFunction, RemovalData};
pub use error::{Error, Result};
pub use prior::{GammaPrior, TruncatedPoisson};
pub use rjmcmc::{run_chain, RateModelConfig, SamplerConfig, Scaled};
pub use mass_action::{mass_action_chain, MassActionConfig};
pub use sample::{PosteriorSample, RateSample};
pub use step::{step_log_prior, HeightVariant, StepPriorConfig, StepRate};
pub use simulate::{simulate, SimConfig, SimOutput, SimTruth, SimVariant};
pub use summary::{per_infective_rate, summarize_rate, GridSummary};
pub use trajectory::Trajectory;
