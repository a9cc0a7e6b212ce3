//! Posterior samples as written to the JSONL stream.

use serde::{Deserialize, Serialize};

use crate::bspline::SplineRate;
use crate::error::Result;
use crate::step::StepRate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RateSample {
    Step {
        k: usize,
        start: f64,
        end: f64,
        s: Vec<f64>,
        h: Vec<f64>,
    },
    Bspline {
        k: usize,
        start: f64,
        end: f64,
        t_interior: Vec<f64>,
        /// `P_1..P_{k+3}`, end coefficients included.
        #[serde(rename = "P")]
        p: Vec<f64>,
    },
    MassAction {
        beta: f64,
        population: usize,
    },
}

impl From<&StepRate> for RateSample {
    fn from(r: &StepRate) -> Self {
        RateSample::Step {
            k: r.k(),
            start: r.start(),
            end: r.end(),
            s: r.changepoints().to_vec(),
            h: r.heights().to_vec(),
        }
    }
}

impl From<&SplineRate> for RateSample {
    fn from(r: &SplineRate) -> Self {
        RateSample::Bspline {
            k: r.k(),
            start: r.start(),
            end: r.end(),
            t_interior: r.interior_knots().to_vec(),
            p: r.coefficients().to_vec(),
        }
    }
}

impl RateSample {
    pub fn to_step(&self) -> Option<Result<StepRate>> {
        match self {
            RateSample::Step { start, end, s, h, .. } => {
                Some(StepRate::new(*start, *end, s.clone(), h.clone()))
            }
            _ => None,
        }
    }

    pub fn to_spline(&self) -> Option<Result<SplineRate>> {
        match self {
            RateSample::Bspline { start, end, t_interior, p, .. } => {
                let free = p.get(1..p.len().saturating_sub(1)).unwrap_or(&[]).to_vec();
                Some(SplineRate::new(*start, *end, t_interior.clone(), free))
            }
            _ => None,
        }
    }

    /// Number of changepoints or interior knots; `None` for mass action.
    pub fn k(&self) -> Option<usize> {
        match self {
            RateSample::Step { k, .. } | RateSample::Bspline { k, .. } => Some(*k),
            RateSample::MassAction { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSample {
    pub iter: usize,
    pub gamma: f64,
    /// Height hyperparameter; absent under the martingale prior and for
    /// mass action.
    pub mu: Option<f64>,
    pub rate: RateSample,
    #[serde(rename = "I_omega")]
    pub i_omega: f64,
    pub omega: usize,
    pub loglik: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infections: Option<Vec<f64>>,
}

impl PosteriorSample {
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}
