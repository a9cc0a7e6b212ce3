//! The common shape shared by the step and spline rates as seen by the
//! sampler: `k` interior positions splitting the support into `k + 1`
//! segments, each carrying one positive value.

use crate::bspline::SplineRate;
use crate::data::RateFunction;
use crate::step::StepRate;

pub trait PiecewiseRate: RateFunction + Clone {
    fn k(&self) -> usize;

    /// Boundary `j` in `0..=k+1` (support start, interior positions, end).
    fn position(&self, j: usize) -> f64;

    /// Value attached to segment `j` in `0..=k`.
    fn value(&self, j: usize) -> f64;

    fn values(&self) -> &[f64];

    fn set_value(&mut self, j: usize, v: f64);

    /// Moves interior position `j` in `1..=k`.
    fn set_position(&mut self, j: usize, at: f64);

    fn set_start(&mut self, start: f64);

    /// Adds a position inside segment `j`, splitting its value.
    fn insert(&mut self, j: usize, at: f64, left: f64, right: f64);

    /// Removes the position between segments `j` and `j + 1`, merging their
    /// values.
    fn remove(&mut self, j: usize, merged: f64);

    /// Time window outside which the rate does not depend on segments
    /// `lo..=hi` or on the positions bounding them.
    fn influence(&self, lo: usize, hi: usize) -> (f64, f64);

    /// Extra rate added to `theta + gamma` in the first-infection proposal.
    fn first_segment_pressure(&self) -> f64;

    /// `sum ln h(t-)` over `sorted` times lying in `[lo, hi]`.
    fn log_sum_in(&self, sorted: &[f64], lo: f64, hi: f64) -> f64 {
        let a = sorted.partition_point(|&x| x < lo);
        let b = sorted.partition_point(|&x| x <= hi);
        let mut acc = 0.0;
        for &t in &sorted[a..b] {
            let h = self.left_limit_at(t);
            if !(h > 0.0) {
                return f64::NEG_INFINITY;
            }
            acc += h.ln();
        }
        acc
    }
}

impl PiecewiseRate for StepRate {
    fn k(&self) -> usize {
        StepRate::k(self)
    }

    fn position(&self, j: usize) -> f64 {
        self.boundary(j)
    }

    fn value(&self, j: usize) -> f64 {
        self.heights()[j]
    }

    fn values(&self) -> &[f64] {
        self.heights()
    }

    fn set_value(&mut self, j: usize, v: f64) {
        self.heights_mut()[j] = v;
    }

    fn set_position(&mut self, j: usize, at: f64) {
        self.changepoints_mut()[j - 1] = at;
    }

    fn set_start(&mut self, start: f64) {
        StepRate::set_start(self, start);
    }

    fn insert(&mut self, j: usize, at: f64, left: f64, right: f64) {
        StepRate::insert(self, j, at, left, right);
    }

    fn remove(&mut self, j: usize, merged: f64) {
        StepRate::remove(self, j, merged);
    }

    fn influence(&self, lo: usize, hi: usize) -> (f64, f64) {
        (self.boundary(lo), self.boundary((hi + 1).min(StepRate::k(self) + 1)))
    }

    fn first_segment_pressure(&self) -> f64 {
        self.heights()[0]
    }

    /// Counts per segment instead of evaluating each time.
    fn log_sum_in(&self, sorted: &[f64], lo: f64, hi: f64) -> f64 {
        let a = sorted.partition_point(|&x| x < lo);
        let b = sorted.partition_point(|&x| x <= hi);
        if a >= b {
            return 0.0;
        }
        let (first, last) = (self.segment_of_left(sorted[a]), self.segment_of_left(sorted[b - 1]));
        let mut acc = 0.0;
        let mut from = a;
        for seg in first..=last {
            let to = if seg == last {
                b
            } else {
                let cut = self.boundary(seg + 1);
                from + sorted[from..b].partition_point(|&x| x <= cut)
            };
            acc += (to - from) as f64 * self.heights()[seg].ln();
            from = to;
        }
        acc
    }
}

impl PiecewiseRate for SplineRate {
    fn k(&self) -> usize {
        SplineRate::k(self)
    }

    fn position(&self, j: usize) -> f64 {
        self.knots()[j + 2]
    }

    fn value(&self, j: usize) -> f64 {
        self.free_coefficients()[j]
    }

    fn values(&self) -> &[f64] {
        self.free_coefficients()
    }

    fn set_value(&mut self, j: usize, v: f64) {
        self.set_free(j, v);
    }

    fn set_position(&mut self, j: usize, at: f64) {
        self.set_interior(j - 1, at);
    }

    fn set_start(&mut self, start: f64) {
        SplineRate::set_start(self, start);
    }

    fn insert(&mut self, j: usize, at: f64, left: f64, right: f64) {
        SplineRate::insert(self, j, at, left, right);
    }

    fn remove(&mut self, j: usize, merged: f64) {
        SplineRate::remove(self, j, merged);
    }

    fn influence(&self, lo: usize, hi: usize) -> (f64, f64) {
        let last = SplineRate::k(self) + 1;
        (self.position(lo.saturating_sub(2)), self.position((hi + 3).min(last)))
    }

    fn first_segment_pressure(&self) -> f64 {
        0.0
    }
}
