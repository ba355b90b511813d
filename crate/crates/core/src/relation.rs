//! Linear relations (multi-valued operators) stored as subspaces of a product space.

use crate::numerics::{null_basis_abs, try_inverse, CMatrix, Subspace, TolerancePolicy, C64};
use crate::pencil::{MatrixPencil, Side};
use crate::{Error, Result};

/// Subspace of `ℂ^{d1} × ℂ^{d2}`, coordinates stacked as `(first; second)`.
#[derive(Debug, Clone)]
pub struct LinearRelation {
    pub dim_first: usize,
    pub dim_second: usize,
    pub space: Subspace,
}

#[derive(Debug, Clone)]
pub struct RelationParts {
    pub dom: Subspace,
    pub ker: Subspace,
    pub ran: Subspace,
    pub mul: Subspace,
}

fn stack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    m.view_mut((0, 0), top.shape()).copy_from(top);
    m.view_mut((top.nrows(), 0), bottom.shape()).copy_from(bottom);
    m
}

impl LinearRelation {
    /// Span of the stacked generators `(top; bottom)`.
    pub fn from_generators(top: &CMatrix, bottom: &CMatrix, pol: &TolerancePolicy) -> Self {
        let space = Subspace::span(&stack(top, bottom), pol);
        Self { dim_first: top.nrows(), dim_second: bottom.nrows(), space }
    }

    /// Graph `{(x, Mx)}` of a matrix.
    pub fn graph(m: &CMatrix, pol: &TolerancePolicy) -> Self {
        Self::from_generators(&CMatrix::identity(m.ncols(), m.ncols()), m, pol)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn first(&self) -> CMatrix {
        self.space.basis.rows(0, self.dim_first).into_owned()
    }

    fn second(&self) -> CMatrix {
        self.space.basis.rows(self.dim_first, self.dim_second).into_owned()
    }

    pub fn distance(&self, other: &LinearRelation) -> f64 {
        self.space.distance(&other.space)
    }

    /// Domain, kernel, range and multi-valued part.
    pub fn parts(&self, pol: &TolerancePolicy) -> RelationParts {
        let b1 = self.first();
        let b2 = self.second();
        let tol = pol.subspace_tol;
        let span_abs = |m: &CMatrix, ambient: usize| {
            let (u, s, _) = crate::numerics::svd_sorted(m);
            let k = s.iter().filter(|&&x| x > tol).count();
            let mut sub = Subspace::from_orthonormal(u.columns(0, k).into_owned());
            sub.ambient_dim = ambient;
            sub
        };
        let dom = span_abs(&b1, self.dim_first);
        let ran = span_abs(&b2, self.dim_second);
        let k2 = null_basis_abs(&b2, tol);
        let ker = span_abs(&(&b1 * &k2.basis), self.dim_first);
        let k1 = null_basis_abs(&b1, tol);
        let mul = span_abs(&(&b2 * &k1.basis), self.dim_second);
        RelationParts { dom, ker, ran, mul }
    }

    /// The operator whose graph is `(L − λ)⁻¹ = {(y − λx, x) : (x, y) ∈ L}`, if single-valued
    /// and everywhere defined.
    pub fn shifted_inverse_operator(&self, lambda: C64) -> Option<CMatrix> {
        if self.dim_first != self.dim_second || self.dim() != self.dim_first {
            return None;
        }
        let b1 = self.first();
        let b2 = self.second();
        let c1 = &b2 - &b1 * lambda;
        let inv = try_inverse(&c1)?;
        Some(b1 * inv)
    }
}

/// `L_l = {(Ex, Ax)}`.
pub fn relation_l_left(p: &MatrixPencil) -> LinearRelation {
    LinearRelation::from_generators(&p.e, &p.a, &p.pol)
}

/// `L_r = {(x, w) : Ew = Ax}`.
pub fn relation_l_right(p: &MatrixPencil) -> LinearRelation {
    let n = p.n();
    let mut m = CMatrix::zeros(p.rows(), 2 * n);
    m.view_mut((0, 0), (p.rows(), n)).copy_from(&p.a);
    m.view_mut((0, n), (p.rows(), n)).copy_from(&(-&p.e));
    let scale = crate::numerics::singular_values(&m).first().copied().unwrap_or(0.0);
    let k = crate::numerics::null_basis_abs(&m, p.pol.rank_rel_tol * scale * (2 * n) as f64);
    let mut space = k;
    space.ambient_dim = 2 * n;
    LinearRelation { dim_first: n, dim_second: n, space }
}

/// `L_μ = ran (R(μ); I + μR(μ))`, independent of `μ`.
pub fn relation_from_pseudo_resolvent(p: &MatrixPencil, mu: C64, side: Side) -> Result<LinearRelation> {
    let r = p.pseudo_resolvent(mu, side)?;
    let n = r.nrows();
    let bottom = CMatrix::identity(n, n) + &r * mu;
    Ok(LinearRelation::from_generators(&r, &bottom, &p.pol))
}

/// Trapezoidal cumulative integral of the columns of `samples` on a uniform grid.
pub fn cumulative_trapezoid(samples: &CMatrix, dt: f64) -> CMatrix {
    let (n, m) = samples.shape();
    let mut out = CMatrix::zeros(n, m);
    for j in 1..m {
        let inc = (samples.column(j - 1) + samples.column(j)) * C64::new(0.5 * dt, 0.0);
        let prev = out.column(j - 1).into_owned();
        out.set_column(j, &(prev + inc));
    }
    out
}

/// Largest distance, over the grid, of the pair
/// `(∫x − (λE−A)⁻¹∫f, x(t) − x0 − λ(λE−A)⁻¹∫f)` from `L_r`.
///
/// `trajectory` and `forcing` hold one column per grid time `t_j = j·dt`.
pub fn mild_membership_residual(
    p: &MatrixPencil,
    trajectory: &CMatrix,
    forcing: &CMatrix,
    x0: &CMatrix,
    lambda: C64,
    dt: f64,
) -> Result<f64> {
    let m = trajectory.ncols();
    if m < 4 {
        return Err(Error::GridTooCoarse(format!("{m} samples, at least 4 required")));
    }
    if forcing.shape() != trajectory.shape() || x0.nrows() != trajectory.nrows() {
        return Err(Error::DimensionMismatch("trajectory, forcing and x0 must agree".into()));
    }
    let res = p.resolvent_at(lambda)?;
    let lr = relation_l_right(p);
    let ix = cumulative_trapezoid(trajectory, dt);
    let g = res.inverse * cumulative_trapezoid(forcing, dt);
    let n = trajectory.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let a = ix.column(j) - g.column(j);
        let b = trajectory.column(j) - x0.column(0) - g.column(j) * lambda;
        let mut v = CMatrix::zeros(2 * n, 1);
        v.view_mut((0, 0), (n, 1)).copy_from(&a);
        v.view_mut((n, 0), (n, 1)).copy_from(&b);
        worst = worst.max(lr.space.reject(&v).norm());
    }
    Ok(worst)
}
