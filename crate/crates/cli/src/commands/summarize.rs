use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use sir_rate::summary::{band_coverage, default_grid, interior_window, linear_grid, DEFAULT_GRID_POINTS};
use sir_rate::{per_infective_rate, summarize_rate, PosteriorSample, SimTruth};

use super::{create, output_path, read_removals};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::Cli;

#[derive(Debug, Clone, Serialize, Args)]
pub struct SummarizeArgs {
    /// Posterior JSONL files; several files are pooled.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Removal times; required for mass-action and per-infective summaries.
    #[arg(long)]
    pub removals: Option<PathBuf>,
    /// Simulation truth to overlay, adding a coverage column.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Number of grid points from the earliest first infection to the last removal.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,
    /// Summarize h(t) / Y_t, the rate per infective.
    #[arg(long)]
    pub per_infective: bool,
    /// Drop samples from iterations before this one.
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
    /// Keep every thin-th remaining sample.
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    /// Fraction of the time span trimmed from each end when scoring coverage.
    #[arg(long, default_value_t = 0.05)]
    pub trim: f64,
    /// Output file name.
    #[arg(long, default_value = "bands.csv")]
    pub output: String,
}

fn read_samples(args: &SummarizeArgs) -> CliResult<Vec<PosteriorSample>> {
    let mut samples = Vec::new();
    for path in &args.inputs {
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut kept = 0usize;
        for (line_no, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| CliError::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let s: PosteriorSample = serde_json::from_str(&line)
                .map_err(|e| CliError::data(format!("{}:{}: {e}", path.display(), line_no + 1)))?;
            if s.iter < args.burn_in {
                continue;
            }
            if kept.is_multiple_of(args.thin) {
                samples.push(s);
            }
            kept += 1;
        }
    }
    if samples.is_empty() {
        return Err(CliError::data("no posterior samples left to summarize"));
    }
    Ok(samples)
}

/// True per-infective rate `beta m(t) X_t`, or zero when nobody is infective.
fn per_infective_truth(truth: &SimTruth, t: f64) -> f64 {
    let i = truth.events.partition_point(|e| e.0 <= t);
    match i.checked_sub(1).map(|j| truth.events[j]) {
        Some((_, x, y)) if y > 0 => truth.beta * truth.modulation(t) * x as f64,
        _ => 0.0,
    }
}

pub fn run(cli: &Cli, args: &SummarizeArgs) -> CliResult<()> {
    let started = Instant::now();
    if args.thin == 0 || args.grid == 0 {
        return Err(CliError::usage("--thin and --grid must be at least 1"));
    }
    if !(0.0..0.5).contains(&args.trim) {
        return Err(CliError::usage("--trim must lie in [0, 0.5)"));
    }
    let samples = read_samples(args)?;
    let removals = args.removals.as_deref().map(read_removals).transpose()?;
    let removal_times = removals.as_ref().map(|r| r.times());
    let truth: Option<SimTruth> = match &args.truth {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Some(serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?)
        }
        None => None,
    };

    let last = match (&removals, &truth) {
        (Some(r), _) => r.last(),
        (None, Some(t)) => *t.removals.last().ok_or_else(|| CliError::data("truth has no removals"))?,
        (None, None) => samples.iter().map(support_end).fold(f64::NEG_INFINITY, f64::max),
    };
    if !last.is_finite() {
        return Err(CliError::usage("mass-action samples need --removals"));
    }
    let mut grid = default_grid(&samples, last, args.grid)?;
    if let Some(t) = &truth {
        // Cover the true epidemic too, so coverage is scored over its whole span.
        grid = linear_grid(grid[0].min(t.first_infection), last, args.grid);
    }

    let summary = if args.per_infective {
        let r = removal_times.ok_or_else(|| CliError::usage("--per-infective needs --removals"))?;
        per_infective_rate(&samples, &grid, r)?
    } else {
        summarize_rate(&samples, &grid, removal_times)?
    };

    let out_path = output_path(&cli.out_dir, &args.output)?;
    let truth_fn: Option<Box<dyn Fn(f64) -> f64>> = truth.as_ref().map(|t| -> Box<dyn Fn(f64) -> f64> {
        if args.per_infective {
            Box::new(move |x| per_infective_truth(t, x))
        } else {
            Box::new(move |x| t.rate_at(x))
        }
    });
    summary.write_csv(create(&out_path)?, truth_fn.as_deref())?;

    let coverage = match (&truth, &truth_fn) {
        (Some(t), Some(f)) => {
            let window = interior_window(t.first_infection, last, args.trim);
            let c = band_coverage(&summary, f, window);
            if !cli.quiet {
                eprintln!("coverage {c:.3} on [{:.3}, {:.3}]", window.0, window.1);
            }
            Some(c)
        }
        _ => None,
    };

    let mut manifest = RunManifest::new("summarize", args, 0)?;
    manifest.add_inputs(args.inputs.iter().map(|p| p.as_path()))?;
    manifest.add_inputs(args.removals.iter().chain(&args.truth).map(|p| p.as_path()))?;
    manifest.add_outputs([out_path.as_path()])?;
    manifest.stats = serde_json::json!({ "samples": summary.count, "coverage": coverage });
    manifest.timings.total_secs = started.elapsed().as_secs_f64();
    let stem = args.output.strip_suffix(".csv").unwrap_or(&args.output);
    manifest.write(&output_path(&cli.out_dir, &format!("{stem}.manifest.json"))?)?;
    Ok(())
}

fn support_end(s: &PosteriorSample) -> f64 {
    match &s.rate {
        sir_rate::RateSample::Step { end, .. } | sir_rate::RateSample::Bspline { end, .. } => *end,
        sir_rate::RateSample::MassAction { .. } => f64::NAN,
    }
}
