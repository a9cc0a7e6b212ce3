use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use sir_rate::mass_action::MassActionSampler;
use sir_rate::rjmcmc::run_chain_with;
use sir_rate::{PosteriorSample, RemovalData};

use super::{create, output_path, read_removals};
use crate::config::{FitConfig, ModelKind, PriorArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::Cli;

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Removal times, one per row.
    #[arg(long)]
    pub data: PathBuf,
    /// JSON fit configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Independent chains, run concurrently with derived seeds.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Total population for the mass-action model, initial infective included.
    #[arg(long)]
    pub population: Option<usize>,
    /// Keep each sample's infection times (needed for per-infective bands).
    #[arg(long)]
    pub store_infections: bool,
    /// Base name of the output files.
    #[arg(long, default_value = "posterior")]
    pub name: String,
}

impl FitArgs {
    fn resolve(&self) -> CliResult<FitConfig> {
        let mut cfg = match &self.config {
            Some(path) => FitConfig::load(path)?,
            None => FitConfig::default(),
        };
        self.prior.apply(&mut cfg);
        if let Some(c) = self.chains {
            cfg.chains = c;
        }
        if self.population.is_some() {
            cfg.population = self.population;
        }
        cfg.store_infections |= self.store_infections;
        cfg.validate()?;
        Ok(cfg)
    }
}

struct ChainResult {
    path: PathBuf,
    stats: serde_json::Value,
    secs: f64,
}

pub fn run(cli: &Cli, args: &FitArgs) -> CliResult<()> {
    let started = Instant::now();
    let cfg = args.resolve()?;
    let data = read_removals(&args.data)?;
    // Fail on bad settings before any output is created.
    for c in 0..cfg.chains {
        match cfg.sampler(c) {
            Some(s) => s.validate()?,
            None => MassActionSampler::new(&data, &cfg.mass_action(c)).map(|_| ())?,
        }
    }

    let paths: Vec<PathBuf> = (0..cfg.chains)
        .map(|c| {
            let name = if cfg.chains == 1 { format!("{}.jsonl", args.name) } else { format!("{}.chain{c}.jsonl", args.name) };
            output_path(&cli.out_dir, &name)
        })
        .collect::<CliResult<_>>()?;

    let results: Vec<CliResult<ChainResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .enumerate()
            .map(|(c, path)| {
                let (cfg, data) = (&cfg, &data);
                scope.spawn(move || run_one(cfg, data, c, path, cli.quiet))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });
    let results = results.into_iter().collect::<CliResult<Vec<_>>>()?;

    let mut manifest = RunManifest::new("fit", &cfg, cfg.seed)?;
    manifest.add_inputs([args.data.as_path()])?;
    manifest.add_outputs(results.iter().map(|r| r.path.as_path()))?;
    manifest.stats = serde_json::json!({
        "cases": data.len(),
        "chain_seeds": (0..cfg.chains).map(|c| cfg.chain_seed(c)).collect::<Vec<_>>(),
        "chains": results.iter().map(|r| r.stats.clone()).collect::<Vec<_>>(),
    });
    manifest.timings.per_chain_secs = results.iter().map(|r| r.secs).collect();
    manifest.timings.total_secs = started.elapsed().as_secs_f64();
    manifest.write(&output_path(&cli.out_dir, &format!("{}.manifest.json", args.name))?)?;
    Ok(())
}

fn run_one(cfg: &FitConfig, data: &RemovalData, chain: usize, path: &Path, quiet: bool) -> CliResult<ChainResult> {
    let started = Instant::now();
    let mut out = create(path)?;
    let mut next_report = 1;
    let sink = |s: PosteriorSample| -> sir_rate::Result<()> {
        writeln!(out, "{}", s.to_json_line()?)?;
        if !quiet && cfg.iterations > 0 {
            let tenths = s.iter * 10 / cfg.iterations;
            if tenths >= next_report {
                eprintln!("chain {chain}: {}% (iteration {})", tenths * 10, s.iter);
                next_report = tenths + 1;
            }
        }
        Ok(())
    };
    let stats = if cfg.model == ModelKind::MassAction {
        let stats = MassActionSampler::new(data, &cfg.mass_action(chain))?.run(sink)?;
        serde_json::to_value(stats)?
    } else {
        let sampler = cfg.sampler(chain).expect("nonparametric model");
        serde_json::to_value(run_chain_with(data, &sampler, sink)?)?
    };
    out.flush().map_err(|e| CliError::io(path, e))?;
    Ok(ChainResult { path: path.to_path_buf(), stats, secs: started.elapsed().as_secs_f64() })
}
