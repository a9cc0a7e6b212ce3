//! Behavioural tests of the reversible-jump sampler through its public API.

use proptest::prelude::*;
use sir_rate::rjmcmc::Sampler;
use sir_rate::simulate::{simulate, SimConfig};
use sir_rate::step::{HeightVariant, StepPriorConfig};
use sir_rate::validate::check_prior;
use sir_rate::{
    chi_valid, run_chain, PosteriorSample, RateModelConfig, RemovalData, SamplerConfig, Scaled, SplinePriorConfig,
    SplineRate, StepRate,
};

fn small_epidemic(seed: u64) -> RemovalData {
    simulate(&SimConfig { seed, ..SimConfig::new(120, 2.0 / 120.0, 1.0) }).unwrap().removals
}

fn config(model: RateModelConfig, iterations: usize, seed: u64) -> SamplerConfig {
    SamplerConfig {
        iterations,
        burn_in: iterations / 10,
        thin: 5,
        seed,
        kappa_gamma: Scaled::PerCase(1.0),
        mu_gamma: Scaled::PerCase(1.0),
        check_every: 50,
        store_infections: true,
        model,
        ..Default::default()
    }
}

fn models() -> Vec<RateModelConfig> {
    vec![
        RateModelConfig::Step(StepPriorConfig::default()),
        RateModelConfig::Step(StepPriorConfig { variant: HeightVariant::Martingale, ..Default::default() }),
        RateModelConfig::Bspline(SplinePriorConfig::default()),
    ]
}

#[test]
fn same_seed_gives_identical_chains() {
    let data = small_epidemic(1);
    for model in models() {
        let cfg = config(model, 2_000, 9);
        let a = run_chain(&data, &cfg).unwrap().samples;
        let b = run_chain(&data, &cfg).unwrap().samples;
        assert_eq!(a, b);
        let other = run_chain(&data, &SamplerConfig { seed: 10, ..cfg }).unwrap().samples;
        assert_ne!(a, other);
    }
}

#[test]
fn cached_likelihood_does_not_drift() {
    let data = small_epidemic(2);
    for model in models() {
        let out = run_chain(&data, &config(model, 5_000, 3)).unwrap();
        assert!(out.stats.max_cache_drift < 1e-8, "drift {}", out.stats.max_cache_drift);
        assert_eq!(out.stats.nan_ratios, 0);
    }
}

#[test]
fn tracked_log_likelihood_matches_recomputation() {
    let data = small_epidemic(3);
    let cfg = config(RateModelConfig::Bspline(SplinePriorConfig::default()), 1_000, 4);
    let mut sampler = Sampler::<SplineRate>::new(&data, &cfg).unwrap();
    for _ in 0..777 {
        sampler.iterate().unwrap();
    }
    let state = sampler.state();
    let fresh = state.recomputed_log_likelihood(&data).unwrap();
    assert!((state.log_likelihood() - fresh).abs() < 1e-8 * fresh.abs().max(1.0));
}

#[test]
fn every_sample_is_a_valid_epidemic() {
    let data = small_epidemic(4);
    for model in models() {
        let out = run_chain(&data, &config(model, 3_000, 5)).unwrap();
        for s in &out.samples {
            let inf = sir_rate::LatentInfections::new(s.infections.clone().unwrap()).unwrap();
            assert!(chi_valid(&inf, &data).unwrap());
            assert!(inf.periods_positive(&data));
            assert_eq!(inf.first_infection_time(), s.i_omega);
            assert_eq!(inf.omega(), s.omega);
            assert!(s.loglik.is_finite());
            let (start, end) = match &s.rate {
                sir_rate::RateSample::Step { start, end, .. } | sir_rate::RateSample::Bspline { start, end, .. } => {
                    (*start, *end)
                }
                _ => unreachable!(),
            };
            assert_eq!(start, s.i_omega);
            assert_eq!(end, data.last());
        }
    }
}

#[test]
fn moves_are_exercised() {
    let data = small_epidemic(5);
    let out = run_chain(&data, &config(RateModelConfig::Step(StepPriorConfig::default()), 5_000, 6)).unwrap();
    let st = &out.stats;
    for (name, c) in [
        ("birth", st.birth),
        ("death", st.death),
        ("move", st.move_position),
        ("height", st.change_value),
        ("infection", st.infection_time),
        ("first", st.first_infection),
        ("omega", st.omega),
    ] {
        assert!(c.proposed > 0 && c.accepted > 0, "{name} never accepted");
    }
}

#[test]
fn single_case_chain_runs() {
    let data = RemovalData::new(vec![3.0]).unwrap();
    let out = run_chain(&data, &config(RateModelConfig::Step(StepPriorConfig::default()), 500, 1)).unwrap();
    assert!(!out.samples.is_empty());
    assert!(out.samples.iter().all(|s| s.i_omega < 0.0 && s.omega == 0));
}

#[test]
fn prior_only_freezes_latents() {
    let data = small_epidemic(6);
    let cfg = SamplerConfig { prior_only: true, ..config(RateModelConfig::Step(StepPriorConfig::default()), 1_000, 2) };
    let out = run_chain(&data, &cfg).unwrap();
    let first = &out.samples[0];
    assert!(out.samples.iter().all(|s| s.infections == first.infections && s.gamma == first.gamma));
    assert_eq!(out.stats.infection_time.proposed, 0);
}

#[test]
fn zero_iterations_yield_no_samples() {
    let data = small_epidemic(7);
    let cfg = SamplerConfig { iterations: 0, burn_in: 0, ..config(RateModelConfig::Step(StepPriorConfig::default()), 0, 1) };
    assert!(run_chain(&data, &cfg).unwrap().samples.is_empty());
}

#[test]
fn invalid_configs_are_rejected() {
    let data = small_epidemic(8);
    let base = config(RateModelConfig::Step(StepPriorConfig::default()), 100, 1);
    assert!(run_chain(&data, &SamplerConfig { burn_in: 100, ..base.clone() }).is_err());
    assert!(run_chain(&data, &SamplerConfig { thin: 0, ..base.clone() }).is_err());
    let bad_lambda = RateModelConfig::Step(StepPriorConfig { lambda: -1.0, ..Default::default() });
    assert!(run_chain(&data, &SamplerConfig { model: bad_lambda, ..base }).is_err());
}

#[test]
fn samples_round_trip_through_json() {
    let data = small_epidemic(9);
    for model in models() {
        let out = run_chain(&data, &config(model, 200, 1)).unwrap();
        for s in out.samples.iter().take(5) {
            let back: PosteriorSample = serde_json::from_str(&s.to_json_line().unwrap()).unwrap();
            assert_eq!(&back, s);
            match &back.rate {
                sir_rate::RateSample::Step { .. } => {
                    let r: StepRate = back.rate.to_step().unwrap().unwrap();
                    assert_eq!(r.k(), back.rate.k().unwrap());
                }
                sir_rate::RateSample::Bspline { .. } => {
                    let r: SplineRate = back.rate.to_spline().unwrap().unwrap();
                    assert_eq!(r.k(), back.rate.k().unwrap());
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Heights mix slowly under the log-uniform height proposal, so the full
/// marginal of `h_0` is checked on a long, heavily thinned chain.
#[test]
fn long_prior_only_chain_recovers_first_height() {
    let data = RemovalData::new(vec![0.0, 1.0, 2.5]).unwrap();
    for model in [
        RateModelConfig::Step(StepPriorConfig { lambda: 3.0, k_max: 20, mu_rate: 1.0, ..Default::default() }),
        RateModelConfig::Bspline(SplinePriorConfig { lambda: 3.0, k_max: 20, mu_rate: 1.0, ..Default::default() }),
    ] {
        let cfg = SamplerConfig { iterations: 2_000_000, burn_in: 10_000, thin: 200, seed: 21, model, ..Default::default() };
        let r = check_prior(&data, &cfg, 20_000, 1).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn chains_stay_valid_on_random_data(times in prop::collection::vec(0.0f64..20.0, 2..15), seed in 0u64..1000) {
        let data = RemovalData::new(times).unwrap();
        let cfg = SamplerConfig {
            iterations: 400,
            burn_in: 0,
            thin: 20,
            seed,
            check_every: 10,
            store_infections: true,
            model: RateModelConfig::Bspline(SplinePriorConfig::default()),
            ..Default::default()
        };
        let out = run_chain(&data, &cfg).unwrap();
        prop_assert!(out.stats.max_cache_drift < 1e-8);
        for s in &out.samples {
            let inf = sir_rate::LatentInfections::new(s.infections.clone().unwrap()).unwrap();
            prop_assert!(chi_valid(&inf, &data).unwrap());
        }
    }
}
