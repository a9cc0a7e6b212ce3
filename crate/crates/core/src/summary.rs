//! Fixed-grid posterior summaries of the infection rate.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::RateFunction;
use crate::error::{Error, Result};
use crate::sample::{PosteriorSample, RateSample};
use crate::stats::quantile_sorted;
use crate::trajectory::Trajectory;

pub const DEFAULT_GRID_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub grid: Vec<f64>,
    pub q05: Vec<f64>,
    pub q50: Vec<f64>,
    pub q95: Vec<f64>,
    pub count: usize,
}

/// `points` equally spaced times on `[start, end]`.
pub fn linear_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (end - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Grid from the earliest sampled first infection to the last removal.
pub fn default_grid(samples: &[PosteriorSample], last_removal: f64, points: usize) -> Result<Vec<f64>> {
    let start = samples
        .iter()
        .map(|s| s.i_omega)
        .min_by(f64::total_cmp)
        .ok_or(Error::NoSamples)?;
    Ok(linear_grid(start, last_removal, points))
}

/// Evaluates one sample's rate on the grid; zero outside its support.
/// Mass-action samples need their infection times and the removal data.
pub fn rate_on_grid(sample: &PosteriorSample, grid: &[f64], removals: Option<&[f64]>) -> Result<Vec<f64>> {
    fn eval<H: RateFunction>(rate: &H, grid: &[f64]) -> Vec<f64> {
        let (a, b) = rate.support();
        grid.iter().map(|&t| if t < a || t > b { 0.0 } else { rate.value_at(t) }).collect()
    }
    match &sample.rate {
        RateSample::Step { .. } => Ok(eval(&sample.rate.to_step().expect("step sample")?, grid)),
        RateSample::Bspline { .. } => Ok(eval(&sample.rate.to_spline().expect("spline sample")?, grid)),
        RateSample::MassAction { beta, population } => {
            let traj = trajectory_of(sample, removals)?;
            let end = removals.and_then(|r| r.last().copied()).unwrap_or(f64::INFINITY);
            Ok(grid
                .iter()
                .map(|&t| {
                    if t < sample.i_omega || t > end {
                        0.0
                    } else {
                        beta * traj.susceptibles_at(t, *population) as f64 * traj.infectives_at(t) as f64
                    }
                })
                .collect())
        }
    }
}

fn trajectory_of(sample: &PosteriorSample, removals: Option<&[f64]>) -> Result<Trajectory> {
    let infections = sample
        .infections
        .as_deref()
        .ok_or_else(|| Error::Config("samples must carry infection times".into()))?;
    let removals = removals.ok_or_else(|| Error::Config("removal times are required".into()))?;
    Ok(Trajectory::from_events(infections, removals))
}

fn quantiles(grid: &[f64], columns: Vec<Vec<f64>>) -> Result<GridSummary> {
    let count = columns.len();
    if count == 0 {
        return Err(Error::NoSamples);
    }
    let mut q05 = Vec::with_capacity(grid.len());
    let mut q50 = Vec::with_capacity(grid.len());
    let mut q95 = Vec::with_capacity(grid.len());
    let mut column = vec![0.0; count];
    for g in 0..grid.len() {
        for (c, values) in column.iter_mut().zip(&columns) {
            *c = values[g];
        }
        column.sort_by(f64::total_cmp);
        q05.push(quantile_sorted(&column, 0.05));
        q50.push(quantile_sorted(&column, 0.5));
        q95.push(quantile_sorted(&column, 0.95));
    }
    Ok(GridSummary { grid: grid.to_vec(), q05, q50, q95, count })
}

/// Pointwise 5%, 50% and 95% quantiles of `h(t)` across samples.
pub fn summarize_rate(samples: &[PosteriorSample], grid: &[f64], removals: Option<&[f64]>) -> Result<GridSummary> {
    let columns = samples
        .iter()
        .map(|s| rate_on_grid(s, grid, removals))
        .collect::<Result<Vec<_>>>()?;
    quantiles(grid, columns)
}

/// Quantiles of `h(t) / Y_t`, with `Y_t` rebuilt from each sample's infection
/// times and the observed removals. Points with no infectives contribute 0.
pub fn per_infective_rate(samples: &[PosteriorSample], grid: &[f64], removals: &[f64]) -> Result<GridSummary> {
    let columns = samples
        .iter()
        .map(|s| {
            let traj = trajectory_of(s, Some(removals))?;
            let mut values = rate_on_grid(s, grid, Some(removals))?;
            for (v, &t) in values.iter_mut().zip(grid) {
                let y = traj.infectives_at(t);
                *v = if y == 0 { 0.0 } else { *v / y as f64 };
            }
            Ok(values)
        })
        .collect::<Result<Vec<_>>>()?;
    quantiles(grid, columns)
}

/// `[start + frac L, end - frac L]` with `L = end - start`.
pub fn interior_window(start: f64, end: f64, frac: f64) -> (f64, f64) {
    let l = end - start;
    (start + frac * l, end - frac * l)
}

/// Fraction of grid points inside `window` where the 5-95% band contains
/// the truth.
pub fn band_coverage<F: Fn(f64) -> f64>(summary: &GridSummary, truth: F, window: (f64, f64)) -> f64 {
    let (mut hit, mut total) = (0usize, 0usize);
    for (i, &t) in summary.grid.iter().enumerate() {
        if t < window.0 || t > window.1 {
            continue;
        }
        total += 1;
        let v = truth(t);
        if summary.q05[i] <= v && v <= summary.q95[i] {
            hit += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}

impl GridSummary {
    /// CSV with columns `t,q05,q50,q95`, plus `truth,covered` when a truth
    /// curve is supplied.
    pub fn write_csv<W: Write>(&self, out: W, truth: Option<&dyn Fn(f64) -> f64>) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match truth {
            None => w.write_record(["t", "q05", "q50", "q95"])?,
            Some(_) => w.write_record(["t", "q05", "q50", "q95", "truth", "covered"])?,
        }
        for i in 0..self.grid.len() {
            let mut row = vec![
                self.grid[i].to_string(),
                self.q05[i].to_string(),
                self.q50[i].to_string(),
                self.q95[i].to_string(),
            ];
            if let Some(f) = truth {
                let v = f(self.grid[i]);
                row.push(v.to_string());
                let covered = self.q05[i] <= v && v <= self.q95[i];
                row.push(u8::from(covered).to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
