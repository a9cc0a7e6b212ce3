//! Infective counts reconstructed from infection and removal times.

use serde::{Deserialize, Serialize};

/// Piecewise-constant `(infected so far, currently infective)` counts.
/// Entry `i` holds on `[times[i], times[i+1])`; before the first event both
/// counts are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    infected: Vec<usize>,
    infectives: Vec<usize>,
}

impl Trajectory {
    /// Builds the event sequence; on ties infections are applied before
    /// removals.
    pub fn from_events(infections: &[f64], removals: &[f64]) -> Self {
        let mut inf = infections.to_vec();
        inf.sort_by(f64::total_cmp);
        let mut rem = removals.to_vec();
        rem.sort_by(f64::total_cmp);
        let total = inf.len() + rem.len();
        let (mut times, mut infected, mut infectives) =
            (Vec::with_capacity(total), Vec::with_capacity(total), Vec::with_capacity(total));
        let (mut a, mut b, mut c, mut y) = (0usize, 0usize, 0usize, 0i64);
        while a < inf.len() || b < rem.len() {
            let take_infection = b >= rem.len() || (a < inf.len() && inf[a] <= rem[b]);
            let t = if take_infection {
                a += 1;
                c += 1;
                y += 1;
                inf[a - 1]
            } else {
                b += 1;
                y -= 1;
                rem[b - 1]
            };
            times.push(t);
            infected.push(c);
            infectives.push(y.max(0) as usize);
        }
        Self { times, infected, infectives }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn index_at(&self, t: f64) -> Option<usize> {
        self.times.partition_point(|&s| s <= t).checked_sub(1)
    }

    /// `Y_t`.
    pub fn infectives_at(&self, t: f64) -> usize {
        self.index_at(t).map_or(0, |i| self.infectives[i])
    }

    /// Number infected at or before `t`.
    pub fn infected_by(&self, t: f64) -> usize {
        self.index_at(t).map_or(0, |i| self.infected[i])
    }

    /// `X_t = population - infected so far`.
    pub fn susceptibles_at(&self, t: f64, population: usize) -> usize {
        population.saturating_sub(self.infected_by(t))
    }

    /// Integral of `X_t Y_t` from the first to the last event, summed over
    /// inter-event intervals.
    pub fn xy_integral(&self, population: usize) -> f64 {
        self.times
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let x = population.saturating_sub(self.infected[i]) as f64;
                x * self.infectives[i] as f64 * (w[1] - w[0])
            })
            .sum()
    }

    /// `(t, X_t, Y_t)` after each event.
    pub fn states(&self, population: usize) -> impl Iterator<Item = (f64, usize, usize)> + '_ {
        self.times.iter().enumerate().map(move |(i, &t)| {
            (t, population.saturating_sub(self.infected[i]), self.infectives[i])
        })
    }
}
