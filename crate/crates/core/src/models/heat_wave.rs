//! Wave equation on (−1, 0) coupled at ξ = 0 with a heat equation on (0, 1).
//!
//! Staggered grid with `h = 1/m`: `x₁` on the integer nodes `−1 + ih`, `i = 0..2m−1`
//! (the node ξ = 1 carries `x₁ = 0` and is eliminated), `x₂` on the half nodes
//! `−1 + (j + ½)h`, `j = 0..2m−1`, with the ghost value `x₂ = 0` left of ξ = −1.

use crate::numerics::{CMatrix, C64};
use crate::pencil::MatrixPencil;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatWaveConfig {
    /// Grid points per unit interval.
    pub m: usize,
}

impl Default for HeatWaveConfig {
    fn default() -> Self {
        Self { m: 50 }
    }
}

/// Index bookkeeping for a heat-wave pencil of size `4m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatWaveLayout {
    pub m: usize,
    /// `x₁` occupies `0..2m`, `x₂` occupies `2m..4m`.
    pub x2_offset: usize,
    /// Half-node positions of `x₂`.
    pub x2_nodes: Vec<f64>,
    /// `true` where the `x₂` node belongs to the wave part.
    pub wave: Vec<bool>,
}

impl HeatWaveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 4 {
            return Err(Error::InvalidInput(format!("heat-wave grid needs m >= 4, got {}", self.m)));
        }
        Ok(())
    }

    pub fn layout(&self) -> HeatWaveLayout {
        let m = self.m;
        let h = 1.0 / m as f64;
        let x2_nodes: Vec<f64> = (0..2 * m).map(|j| -1.0 + (j as f64 + 0.5) * h).collect();
        // nodes at or left of the interface are wave nodes
        let wave = x2_nodes.iter().map(|&x| x <= 0.0).collect();
        HeatWaveLayout { m, x2_offset: 2 * m, x2_nodes, wave }
    }
}

/// `E = diag(I, χ_wave)`, `A = [[0, D], [−Dᵀ, −χ_heat]]` with `D` lower bidiagonal.
pub fn heat_wave_pencil(cfg: &HeatWaveConfig) -> Result<MatrixPencil> {
    cfg.validate()?;
    let m = cfg.m;
    let n2 = 2 * m;
    let h = 1.0 / m as f64;
    let lay = cfg.layout();
    let mut e = CMatrix::zeros(2 * n2, 2 * n2);
    let mut a = CMatrix::zeros(2 * n2, 2 * n2);
    let one = C64::new(1.0, 0.0);
    for i in 0..n2 {
        e[(i, i)] = one;
        // (D x₂)_i = (x₂_{i+½} − x₂_{i−½}) / h
        a[(i, n2 + i)] = C64::new(1.0 / h, 0.0);
        a[(n2 + i, i)] = C64::new(-1.0 / h, 0.0);
        if i > 0 {
            a[(i, n2 + i - 1)] = C64::new(-1.0 / h, 0.0);
            a[(n2 + i - 1, i)] = C64::new(1.0 / h, 0.0);
        }
        if lay.wave[i] {
            e[(n2 + i, n2 + i)] = one;
        } else {
            a[(n2 + i, n2 + i)] = -one;
        }
    }
    MatrixPencil::new(e, a)
}
