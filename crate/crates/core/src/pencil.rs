//! Matrix pencils `λE − A`, resolvents and the left/right pseudo-resolvents.

use crate::numerics::{
    identity, is_finite, is_regular, lu_solve, matmul, norm2, singular_values, try_inverse, CMatrix, TolerancePolicy,
    C64,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Which operator a norm query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventKind {
    /// `(λE − A)⁻¹`
    Resolvent,
    Pseudo(Side),
}

#[derive(Debug, Clone)]
pub struct MatrixPencil {
    pub e: CMatrix,
    pub a: CMatrix,
    pub pol: TolerancePolicy,
    norm_e: f64,
    norm_a: f64,
}

#[derive(Debug, Clone)]
pub struct ResolventSample {
    pub lambda: C64,
    /// `(λE − A)⁻¹`
    pub inverse: CMatrix,
    pub min_singular: f64,
}

impl MatrixPencil {
    /// Square pencil; fails with `SingularPencil` unless some probe `λE − A` has full rank.
    pub fn new(e: CMatrix, a: CMatrix) -> Result<Self> {
        Self::with_policy(e, a, TolerancePolicy::default())
    }

    pub fn with_policy(e: CMatrix, a: CMatrix, pol: TolerancePolicy) -> Result<Self> {
        let p = Self::rectangular(e, a, pol)?;
        if p.e.nrows() != p.e.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "square pencil expected, got {}x{}",
                p.e.nrows(),
                p.e.ncols()
            )));
        }
        if !is_regular(&p.e, &p.a, &p.pol) {
            return Err(Error::SingularPencil);
        }
        Ok(p)
    }

    /// Pencil without the square/regularity requirement (boundary-structured layouts).
    pub fn rectangular(e: CMatrix, a: CMatrix, pol: TolerancePolicy) -> Result<Self> {
        if e.shape() != a.shape() {
            return Err(Error::DimensionMismatch(format!(
                "E is {}x{} but A is {}x{}",
                e.nrows(),
                e.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        if !is_finite(&e) || !is_finite(&a) {
            return Err(Error::NonFinite);
        }
        pol.validate()?;
        let norm_e = norm2(&e);
        let norm_a = norm2(&a);
        Ok(Self { e, a, pol, norm_e, norm_a })
    }

    pub fn n(&self) -> usize {
        self.e.ncols()
    }

    pub fn rows(&self) -> usize {
        self.e.nrows()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.n()
    }

    pub fn norm_e(&self) -> f64 {
        self.norm_e
    }

    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }

    pub fn with_tolerances(mut self, pol: TolerancePolicy) -> Self {
        self.pol = pol;
        self
    }

    /// `λE − A`
    pub fn shifted(&self, lambda: C64) -> CMatrix {
        &self.e * lambda - &self.a
    }

    fn scale(&self, lambda: C64) -> f64 {
        1.0 + lambda.norm() * self.norm_e + self.norm_a
    }

    /// `(λE − A)⁻¹` with a certified residual.
    pub fn resolvent_at(&self, lambda: C64) -> Result<ResolventSample> {
        let n = self.n();
        if !self.is_square() {
            return Err(Error::DimensionMismatch("resolvent needs a square pencil".into()));
        }
        if n == 0 {
            return Ok(ResolventSample { lambda, inverse: CMatrix::zeros(0, 0), min_singular: f64::INFINITY });
        }
        let m = self.shifted(lambda);
        let inverse = try_inverse(&m).ok_or(Error::NotInResolventSet(lambda))?;
        if !is_finite(&inverse) {
            return Err(Error::NotInResolventSet(lambda));
        }
        let s = singular_values(&m);
        let min_singular = *s.last().expect("n > 0");
        if min_singular <= self.pol.rank_rel_tol * s[0] * n as f64 {
            return Err(Error::NotInResolventSet(lambda));
        }
        let res = (matmul(&m, &inverse) - identity(n)).norm();
        if res > self.pol.residual_tol * self.scale(lambda) {
            return Err(Error::NotInResolventSet(lambda));
        }
        Ok(ResolventSample { lambda, inverse, min_singular })
    }

    /// `R_l(λ) = E(A − λE)⁻¹`
    pub fn left_resolvent(&self, lambda: C64) -> Result<CMatrix> {
        let s = self.resolvent_at(lambda)?;
        Ok(-matmul(&self.e, &s.inverse))
    }

    /// `R_r(λ) = (A − λE)⁻¹E`
    pub fn right_resolvent(&self, lambda: C64) -> Result<CMatrix> {
        let s = self.resolvent_at(lambda)?;
        Ok(-matmul(&s.inverse, &self.e))
    }

    pub fn pseudo_resolvent(&self, lambda: C64, side: Side) -> Result<CMatrix> {
        match side {
            Side::Left => self.left_resolvent(lambda),
            Side::Right => self.right_resolvent(lambda),
        }
    }

    /// `R(λ)·q` through an LU solve; no residual certificate.
    pub fn apply_pseudo_resolvent(&self, lambda: C64, side: Side, q: &CMatrix) -> Result<CMatrix> {
        let m = &self.a - &self.e * lambda;
        let out = match side {
            Side::Left => lu_solve(&m, q).map(|y| matmul(&self.e, &y)),
            Side::Right => lu_solve(&m, &matmul(&self.e, q)),
        };
        match out {
            Some(y) if is_finite(&y) => Ok(y),
            _ => Err(Error::NotInResolventSet(lambda)),
        }
    }

    /// Spectral norm of the resolvent or a pseudo-resolvent at `λ`, certified like
    /// [`resolvent_at`](Self::resolvent_at).
    pub fn resolvent_norm(&self, lambda: C64, kind: ResolventKind) -> Result<f64> {
        let s = self.resolvent_at(lambda)?;
        let m = match kind {
            ResolventKind::Resolvent => s.inverse,
            ResolventKind::Pseudo(Side::Left) => matmul(&self.e, &s.inverse),
            ResolventKind::Pseudo(Side::Right) => matmul(&s.inverse, &self.e),
        };
        Ok(norm2(&m))
    }

    /// `‖(R(λ) − R(μ))/(λ − μ) − R(λ)R(μ)‖₂`.
    ///
    /// With `R` built from `(A − λE)⁻¹` the identity carries the factor `1/(λ − μ)`;
    /// the opposite orientation belongs to `(λE − A)⁻¹`-type resolvents.
    pub fn pseudo_resolvent_residual(&self, lambda: C64, mu: C64, side: Side) -> Result<f64> {
        if lambda == mu {
            return Err(Error::InvalidInput("pseudo-resolvent residual needs lambda != mu".into()));
        }
        let rl = self.pseudo_resolvent(lambda, side)?;
        let rm = self.pseudo_resolvent(mu, side)?;
        let diff = (&rl - &rm) / (lambda - mu);
        Ok(norm2(&(diff - &rl * &rm)))
    }
}
