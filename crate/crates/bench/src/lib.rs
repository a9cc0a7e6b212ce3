//! Shared fixtures for the sampler benchmarks.

use sir_rate::{simulate, RemovalData, SimConfig};

/// Major outbreak in a population of 1000 with `R0 = 1.7`, the scale of the
/// first simulated dataset.
pub fn outbreak() -> RemovalData {
    simulate(&SimConfig { seed: 1, ..SimConfig::new(1000, 1.7e-3, 1.0) })
        .expect("supercritical setting produces an outbreak")
        .removals
}
