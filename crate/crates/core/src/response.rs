//! Sampled closed-loop trajectories, the quadratic cost and decay measures.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracsol::{real_part, weighted_modes, SolutionRepresentation};
use crate::lift::CostWeights;
use crate::synth::{ClosedLoop, RegulatorLaw};

/// Integrand level at the last sample above which the window is reported
/// as too short.
pub const TAIL_INTEGRAND_TOL: f64 = 1e-6;

/// `n` equally spaced points from `x_start` to `x_end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_start: f64,
    pub x_end: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_start: f64, x_end: f64, n: usize) -> Result<Self> {
        let g = Grid { x_start, x_end, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {}", self.n)));
        }
        if !(self.x_start.is_finite() && self.x_end.is_finite() && self.x_end > self.x_start) {
            return Err(Error::InvalidInput(format!(
                "grid bounds must be finite with x_end > x_start, got [{}, {}]",
                self.x_start, self.x_end
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.x_end - self.x_start) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.x_end } else { self.x_start + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub q: u32,
    pub x0: f64,
    pub grid: Grid,
}

impl Trajectory {
    pub fn xs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.y).collect()
    }
}

/// Output `y` and control `u = −Σ_j K_j D^{e_j/q} y` on `grid`, where
/// `D^{m/q} y = Σ_l c_l λ_l^m y(x, λ_l)`.
pub fn respond(cl: &ClosedLoop, rep: &SolutionRepresentation, law: &RegulatorLaw, grid: &Grid) -> Result<Trajectory> {
    grid.validate()?;
    if grid.x_start < rep.x0 {
        return Err(Error::InvalidInput(format!(
            "grid starts at {} before the initial point {}",
            grid.x_start, rep.x0
        )));
    }
    let exponents = cl.state_exponents();
    if law.gains.len() != exponents.len() {
        return Err(Error::DimensionMismatch { expected: exponents.len(), found: law.gains.len() });
    }
    let lambdas = rep.modes.roots();
    let samples = grid
        .points()
        .into_par_iter()
        .map(|x| {
            let w = weighted_modes(rep, x)?;
            let y: Complex64 = w.iter().sum();
            let mut u = Complex64::new(0.0, 0.0);
            for (&k, &e) in law.gains.iter().zip(&exponents) {
                if k != 0.0 {
                    let d: Complex64 = w.iter().zip(&lambdas).map(|(wl, l)| wl * l.powu(e)).sum();
                    u -= d * k;
                }
            }
            Ok(Sample { x, y: real_part(y)?, u: real_part(u)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { samples, q: rep.q, x0: rep.x0, grid: *grid })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostEstimate {
    pub value: f64,
    /// The integrand is still above the tail tolerance at the window end.
    pub tail_warning: bool,
}

/// `½ ∫ (qw·y² + rw·u²) dx` over the sampled window by the trapezoid rule.
pub fn cost(traj: &Trajectory, w: &CostWeights) -> CostEstimate {
    let f = |s: &Sample| w.qw * s.y * s.y + w.rw * s.u * s.u;
    let value = traj
        .samples
        .windows(2)
        .map(|p| 0.5 * (p[1].x - p[0].x) * (f(&p[0]) + f(&p[1])))
        .sum::<f64>()
        * 0.5;
    let tail_warning = traj.samples.last().is_some_and(|s| f(s) > TAIL_INTEGRAND_TOL);
    CostEstimate { value, tail_warning }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayMetric {
    /// `max |y|` over the last quarter of the samples.
    pub sup_tail: f64,
    /// `max |y|` over all samples.
    pub peak: f64,
    /// Quarter-wise maxima of `|y|` never increase.
    pub monotone_envelope: bool,
}

pub fn decay_metric(traj: &Trajectory) -> Result<DecayMetric> {
    let n = traj.samples.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("decay metric needs at least 4 samples, got {n}")));
    }
    let quarter_max: Vec<f64> = (0..4)
        .map(|i| {
            traj.samples[n * i / 4..n * (i + 1) / 4].iter().map(|s| s.y.abs()).fold(0.0, f64::max)
        })
        .collect();
    Ok(DecayMetric {
        sup_tail: quarter_max[3],
        peak: quarter_max.iter().copied().fold(0.0, f64::max),
        monotone_envelope: quarter_max.windows(2).all(|w| w[1] <= w[0]),
    })
}

/// Least-squares slope of `ln |y|` against `x` over samples with `x ≥ from`.
/// `None` when fewer than two usable samples remain.
pub fn tail_log_slope(traj: &Trajectory, from: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        traj.samples.iter().filter(|s| s.x >= from && s.y != 0.0).map(|s| (s.x, s.y.abs().ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}
