use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use sir_rate::validate::{check_prior, KS_P_THRESHOLD, TV_THRESHOLD};
use sir_rate::RemovalData;

use super::{output_path, read_removals};
use crate::config::{FitConfig, PriorArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::Cli;

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Removal times fixing the support of the rate; defaults to 0, 1, 2, 3, 4.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// JSON fit configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Independent draws from the prior to compare against.
    #[arg(long, default_value_t = 100_000)]
    pub forward_draws: usize,
    /// Use every n-th retained chain draw in the KS tests.
    #[arg(long, default_value_t = 1)]
    pub ks_stride: usize,
}

/// Long and heavily thinned by default: within-model height moves are rare
/// near the prior mode of `k`, so the height marginal mixes slowly.
fn defaults() -> FitConfig {
    FitConfig { iterations: 2_000_000, burn_in: 10_000, thin: 200, b: 1.0, beta_0: 1.0, ..FitConfig::default() }
}

pub fn run(cli: &Cli, args: &ValidateArgs) -> CliResult<()> {
    let started = Instant::now();
    let mut cfg = match &args.config {
        Some(p) => FitConfig::load(p)?,
        None => defaults(),
    };
    args.prior.apply(&mut cfg);
    let sampler = cfg
        .sampler(0)
        .ok_or_else(|| CliError::usage("prior validation covers the step and B-spline models"))?;
    let data = match &args.data {
        Some(p) => read_removals(p)?,
        None => RemovalData::new(vec![0.0, 1.0, 2.0, 3.0, 4.0])?,
    };
    let report = check_prior(&data, &sampler, args.forward_draws, args.ks_stride)?;

    let report_path = output_path(&cli.out_dir, "prior_check.json")?;
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")
        .map_err(|e| CliError::io(&report_path, e))?;
    let mut manifest = RunManifest::new("validate-prior", &cfg, cfg.seed)?;
    manifest.add_inputs(args.data.iter().map(|p| p.as_path()))?;
    manifest.add_outputs([report_path.as_path()])?;
    manifest.stats = serde_json::json!({ "passed": report.passed() });
    manifest.timings.total_secs = started.elapsed().as_secs_f64();
    manifest.write(&output_path(&cli.out_dir, "prior_check.manifest.json")?)?;

    if !cli.quiet {
        eprintln!("k total variation      {:.4} (threshold {TV_THRESHOLD})", report.k_tv);
        eprintln!("first position KS p    {:.4} at k = {} (threshold {KS_P_THRESHOLD})", report.first_position_p, report.mode_k);
        eprintln!("first height KS p      {:.4} (threshold {KS_P_THRESHOLD})", report.first_height_p);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::validation("sampler output does not match the prior"))
    }
}
