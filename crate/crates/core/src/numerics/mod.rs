//! Dense complex linear algebra with an explicit tolerance policy.

mod expm;
mod linalg;
mod qz;
mod quadrature;
mod subspace;

pub use expm::expm;
pub use linalg::{
    eigenvalues, full_rank, herm, identity, is_finite, lu_solve, matmul, max_eig_herm, min_singular, norm2, null_basis,
    null_basis_abs, null_basis_scaled, range_basis, range_basis_scaled, rank_with_tol, singular_values, svd_sorted,
    try_inverse,
};
pub use quadrature::gauss_legendre;
pub use qz::{qz_canonical, GeneralizedSchur, QzResult};
pub(crate) use qz::is_regular;
pub use subspace::Subspace;

use serde::{Deserialize, Serialize};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Converts a real matrix given row by row.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let r = rows.len();
    let cols = if r == 0 { 0 } else { rows[0].len() };
    CMatrix::from_fn(r, cols, |i, j| re(rows[i][j]))
}

pub fn real_diag(d: &[f64]) -> CMatrix {
    let n = d.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { re(d[i]) } else { C64::new(0.0, 0.0) })
}

/// Thresholds used wherever exact linear algebra needs a numerical decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub rank_rel_tol: f64,
    pub subspace_tol: f64,
    pub residual_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { rank_rel_tol: 1e-10, subspace_tol: 1e-8, residual_tol: 1e-9 }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [
            ("rank_rel_tol", self.rank_rel_tol),
            ("subspace_tol", self.subspace_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(crate::Error::InvalidInput(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}
