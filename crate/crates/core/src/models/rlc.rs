//! Distributed RLC line on [0, 1] with voltage control at ξ = 0 and current control at ξ = 1.
//!
//! Currents `I` live on the `m` cell midpoints, voltages `V` on the `m + 1` nodes. The two
//! boundary currents `I(0)`, `I(1)` are extra unknowns, so the dynamic rows `A₀` are
//! rectangular and the boundary rows `Γ` square the system up:
//!
//! ```text
//! h L_j I_j'  = −h R_j I_j − (V_{j+1} − V_j)
//! c_i V_i'    = I_{i−½} − I_{i+½} − g_i V_i       (I_{−½} := I(0), I_{m+½} := I(1))
//! 0           = −V_0 + u₀(t)
//! 0           = −I(1) + i₁(t)
//! ```
//!
//! with lumped node masses `c_i = h C_i` (halved at the two ends).

use crate::numerics::{max_eig_herm, null_basis_abs, CMatrix, C64};
use crate::pencil::MatrixPencil;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlcConfig {
    /// Number of cells.
    pub m: usize,
    /// Inductance per cell, length `m`.
    pub l: Vec<f64>,
    /// Capacitance per node, length `m + 1`.
    pub c: Vec<f64>,
    /// Resistance per cell, length `m`.
    pub r: Vec<f64>,
    /// Conductance per node, length `m + 1`.
    pub g: Vec<f64>,
}

impl Default for RlcConfig {
    fn default() -> Self {
        Self::uniform(50, 1.0, 1.0, 0.0, 0.0)
    }
}

impl RlcConfig {
    pub fn uniform(m: usize, l: f64, c: f64, r: f64, g: f64) -> Self {
        Self { m, l: vec![l; m], c: vec![c; m + 1], r: vec![r; m], g: vec![g; m + 1] }
    }

    /// Samples profiles at cell midpoints and nodes.
    pub fn from_profiles(
        m: usize,
        l: impl Fn(f64) -> f64,
        c: impl Fn(f64) -> f64,
        r: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
    ) -> Self {
        let h = 1.0 / m as f64;
        let mid: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) * h).collect();
        let nodes: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
        Self {
            m,
            l: mid.iter().map(|&x| l(x)).collect(),
            c: nodes.iter().map(|&x| c(x)).collect(),
            r: mid.iter().map(|&x| r(x)).collect(),
            g: nodes.iter().map(|&x| g(x)).collect(),
        }
    }

    /// Lossless line whose inductance vanishes on [0.4, 0.6].
    pub fn degenerate_inductance(m: usize) -> Self {
        Self::from_profiles(m, |x| if (0.4..=0.6).contains(&x) { 0.0 } else { 1.0 }, |_| 1.0, |_| 0.0, |_| 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m < 2 {
            return Err(Error::InvalidInput(format!("RLC line needs m >= 2 cells, got {m}")));
        }
        for (name, v, len) in
            [("L", &self.l, m), ("C", &self.c, m + 1), ("R", &self.r, m), ("G", &self.g, m + 1)]
        {
            if v.len() != len {
                return Err(Error::DimensionMismatch(format!("{name} profile: expected {len} samples, got {}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidInput(format!("{name} profile must be finite and nonnegative")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.m + 3
    }

    pub fn is_lossless(&self) -> bool {
        self.r.iter().chain(&self.g).all(|&x| x == 0.0)
    }
}

/// Boundary-structured pencil `E = [E₀; 0]`, `A = [A₀; Γ]` and its square form.
#[derive(Debug, Clone)]
pub struct RlcPencil {
    pub square: MatrixPencil,
    pub e0: CMatrix,
    pub a0: CMatrix,
    pub gamma: CMatrix,
    /// Row of the `u₀` constraint in the square pencil.
    pub u0_row: usize,
    /// Row of the `i₁` constraint in the square pencil.
    pub i1_row: usize,
    pub m: usize,
}

impl RlcPencil {
    /// Index of `V_i` in the state vector.
    pub fn voltage(&self, i: usize) -> usize {
        self.m + i
    }

    /// `Herm(Kᴴ A K)` on `K = ker Γ`; vanishes for a lossless line.
    pub fn boundary_energy_form(&self) -> CMatrix {
        let k = null_basis_abs(&self.gamma, 1e-12).basis;
        let b = k.adjoint() * &self.square.a * &k;
        (&b + b.adjoint()) * C64::new(0.5, 0.0)
    }

    /// `λ_max` of [`Self::boundary_energy_form`].
    pub fn boundary_dissipation(&self) -> f64 {
        max_eig_herm(&self.boundary_energy_form())
    }

    /// Forcing vector for boundary data `u₀`, `i₁`.
    pub fn boundary_forcing(&self, u0: f64, i1: f64) -> CMatrix {
        let mut f = CMatrix::zeros(self.square.n(), 1);
        f[(self.u0_row, 0)] = C64::new(u0, 0.0);
        f[(self.i1_row, 0)] = C64::new(i1, 0.0);
        f
    }
}

pub fn rlc_pencil(cfg: &RlcConfig) -> Result<RlcPencil> {
    cfg.validate()?;
    let m = cfg.m;
    let h = 1.0 / m as f64;
    let n = cfg.dim();
    let nd = 2 * m + 1;
    let (iv, i0, i1) = (m, 2 * m + 1, 2 * m + 2);
    let re = |x: f64| C64::new(x, 0.0);
    let mut e0 = CMatrix::zeros(nd, n);
    let mut a0 = CMatrix::zeros(nd, n);
    for j in 0..m {
        e0[(j, j)] = re(h * cfg.l[j]);
        a0[(j, j)] = re(-h * cfg.r[j]);
        a0[(j, iv + j + 1)] = re(-1.0);
        a0[(j, iv + j)] = re(1.0);
    }
    for i in 0..=m {
        let w = if i == 0 || i == m { 0.5 * h } else { h };
        let row = iv + i;
        e0[(row, row)] = re(w * cfg.c[i]);
        a0[(row, row)] = re(-w * cfg.g[i]);
        let left = if i == 0 { i0 } else { i - 1 };
        let right = if i == m { i1 } else { i };
        a0[(row, left)] += re(1.0);
        a0[(row, right)] += re(-1.0);
    }
    let mut gamma = CMatrix::zeros(2, n);
    gamma[(0, iv)] = re(-1.0);
    gamma[(1, i1)] = re(-1.0);
    let mut e = CMatrix::zeros(n, n);
    let mut a = CMatrix::zeros(n, n);
    e.view_mut((0, 0), (nd, n)).copy_from(&e0);
    a.view_mut((0, 0), (nd, n)).copy_from(&a0);
    a.view_mut((nd, 0), (2, n)).copy_from(&gamma);
    let square = MatrixPencil::new(e, a)?;
    Ok(RlcPencil { square, e0, a0, gamma, u0_row: nd, i1_row: nd + 1, m })
}
