//! Decoupled DAE solver, an implicit Euler reference and residual diagnostics.

mod decoupled;
pub mod forcing;
mod reference;
mod residuals;

pub use decoupled::{
    consistent_initialize, oblique_projectors, solve_decoupled, solve_homogeneous, solve_with, split_forcing,
    ConsistentInit, Decoupling,
};
pub use forcing::{ForcingJson, ForcingSignal, PiecewisePolynomial, SampledSignal};
pub use reference::implicit_euler_reference;
pub use residuals::residuals;

use crate::numerics::{CMatrix, CVector, C64};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    Classical,
    Mild,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Decoupled,
    Homogeneous,
    ImplicitEuler,
}

/// Trajectory on a uniform grid; column `i` of `states` is `x(times[i])`.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub times: Vec<f64>,
    pub states: CMatrix,
    pub consistent_x0: CVector,
    pub correction_norm: f64,
    pub classical_residual: f64,
    pub mild_residual: f64,
    pub mu: Option<C64>,
    pub index: Option<usize>,
    pub block_sizes: Vec<usize>,
    pub method: SolveMethod,
    pub notes: Vec<String>,
}

/// JSON view of a [`SolveReport`] without the trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub method: SolveMethod,
    pub steps: usize,
    pub t0: f64,
    pub tf: f64,
    pub mu: Option<[f64; 2]>,
    pub index: Option<usize>,
    pub block_sizes: Vec<usize>,
    pub consistent_x0_re: Vec<f64>,
    pub consistent_x0_im: Vec<f64>,
    pub correction_norm: f64,
    pub classical_residual: f64,
    pub mild_residual: f64,
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn state(&self, i: usize) -> CVector {
        self.states.column(i).into_owned()
    }

    /// Largest entrywise modulus of `self − other` over the common grid.
    pub fn max_deviation(&self, other: &SolveReport) -> Result<f64> {
        if self.states.shape() != other.states.shape() {
            return Err(Error::DimensionMismatch("trajectories on different grids".into()));
        }
        Ok((&self.states - &other.states).camax())
    }

    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            method: self.method,
            steps: self.times.len().saturating_sub(1),
            t0: self.times.first().copied().unwrap_or(0.0),
            tf: self.times.last().copied().unwrap_or(0.0),
            mu: self.mu.map(|m| [m.re, m.im]),
            index: self.index,
            block_sizes: self.block_sizes.clone(),
            consistent_x0_re: self.consistent_x0.iter().map(|z| z.re).collect(),
            consistent_x0_im: self.consistent_x0.iter().map(|z| z.im).collect(),
            correction_norm: self.correction_norm,
            classical_residual: self.classical_residual,
            mild_residual: self.mild_residual,
            notes: self.notes.clone(),
        }
    }
}

/// `steps + 1` equispaced points of `[t0, tf]`.
pub fn uniform_grid(t0: f64, tf: f64, steps: usize) -> Vec<f64> {
    let h = (tf - t0) / steps as f64;
    (0..=steps).map(|i| if i == steps { tf } else { t0 + i as f64 * h }).collect()
}

/// Step of a uniform grid with at least five points.
pub(crate) fn check_grid(t: &[f64]) -> Result<f64> {
    if t.len() < 5 {
        return Err(Error::GridTooCoarse(format!("{} time points, need at least 5", t.len())));
    }
    if t.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let h = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if h <= 0.0 {
        return Err(Error::InvalidInput("time grid must be increasing".into()));
    }
    let slack = 1e-9 * (h + t[0].abs().max(t[t.len() - 1].abs()));
    if t.iter().enumerate().any(|(i, &x)| (x - (t[0] + i as f64 * h)).abs() > slack) {
        return Err(Error::InvalidInput("time grid must be uniform".into()));
    }
    Ok(h)
}
