use std::io::Write;
use std::time::Instant;

use clap::Args;
use sir_rate::{simulate, SimConfig, SimVariant};

use super::{create, output_path};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::Cli;

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Initial number of susceptibles; one more individual starts infective.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Use the infection rate beta (1 + cos(t - I_1)) X Y instead of beta X Y.
    #[arg(long)]
    pub seasonal: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Resimulate until at least this many individuals were infected. The
    /// default is 10% of n for supercritical settings and 0 otherwise.
    #[arg(long)]
    pub min_final_size: Option<usize>,
    /// Prefix for the output file names.
    #[arg(long, default_value = "")]
    pub prefix: String,
}

pub fn run(cli: &Cli, args: &SimulateArgs) -> CliResult<()> {
    let started = Instant::now();
    let cfg = SimConfig {
        susceptibles: args.n,
        beta: args.beta,
        gamma: args.gamma,
        variant: if args.seasonal { SimVariant::Seasonal } else { SimVariant::MassAction },
        seed: args.seed,
        min_final_size: args.min_final_size,
    };
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let out = simulate(&cfg)?;

    let removals_path = output_path(&cli.out_dir, &format!("{}removals.csv", args.prefix))?;
    let mut w = create(&removals_path)?;
    let write_err = |e| CliError::io(&removals_path, e);
    writeln!(w, "removal_time").map_err(write_err)?;
    for t in out.removals.times() {
        writeln!(w, "{t}").map_err(write_err)?;
    }
    w.flush().map_err(write_err)?;
    drop(w);

    let truth_path = output_path(&cli.out_dir, &format!("{}truth.json", args.prefix))?;
    std::fs::write(&truth_path, serde_json::to_string(&out.truth)? + "\n").map_err(|e| CliError::io(&truth_path, e))?;

    let mut manifest = RunManifest::new("simulate", &cfg, cfg.seed)?;
    manifest.add_outputs([removals_path.as_path(), truth_path.as_path()])?;
    manifest.stats = serde_json::json!({ "final_size": out.truth.final_size(), "attempts": out.attempts });
    manifest.timings.total_secs = started.elapsed().as_secs_f64();
    manifest.write(&output_path(&cli.out_dir, &format!("{}simulate.manifest.json", args.prefix))?)?;

    if !cli.quiet {
        eprintln!("final size {} after {} attempt(s)", out.truth.final_size(), out.attempts);
    }
    Ok(())
}
