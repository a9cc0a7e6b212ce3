//! Reversible-jump sampler for the step-function and B-spline rate models.

mod chain;
mod config;
mod gibbs;
mod model;
pub mod moves;
mod schedule;

pub use chain::{
    initial_latents, run_chain, run_chain_with, ChainModel, ChainOutput, ChainState, ChainStats,
    MoveCounter, Sampler,
};
pub use config::{RateModelConfig, SamplerConfig, Scaled};
pub use gibbs::{gibbs_gamma, gibbs_mu};
pub use model::PiecewiseRate;
pub use schedule::MoveSchedule;
