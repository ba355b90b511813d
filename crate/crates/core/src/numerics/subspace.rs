use super::linalg::{null_basis_abs, range_basis_scaled, singular_values, svd_sorted};
use super::{CMatrix, TolerancePolicy};

/// Subspace of ℂⁿ stored through an orthonormal basis (columns of `basis`).
#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: CMatrix,
}

impl Subspace {
    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: CMatrix) -> Self {
        Self { ambient_dim: basis.nrows(), basis }
    }

    /// Span of arbitrary generators.
    pub fn span(gen: &CMatrix, pol: &TolerancePolicy) -> Self {
        let smax = singular_values(gen).first().copied().unwrap_or(0.0);
        let mut s = range_basis_scaled(gen, pol, smax);
        s.ambient_dim = gen.nrows();
        s
    }

    pub fn zero(n: usize) -> Self {
        Self { ambient_dim: n, basis: CMatrix::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Self { ambient_dim: n, basis: CMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `(I − P)·m` without forming `P`.
    pub fn reject(&self, m: &CMatrix) -> CMatrix {
        m - &self.basis * (self.basis.adjoint() * m)
    }

    pub fn orthogonal_complement(&self) -> Self {
        if self.dim() == 0 {
            return Self::full(self.ambient_dim);
        }
        let mut s = null_basis_abs(&self.basis.adjoint(), 0.5);
        s.ambient_dim = self.ambient_dim;
        s
    }

    /// Gap metric: largest principal-angle sine, 1 for different dimensions.
    pub fn distance(&self, other: &Subspace) -> f64 {
        assert_eq!(self.ambient_dim, other.ambient_dim, "ambient dimensions differ");
        if self.dim() != other.dim() {
            return 1.0;
        }
        if self.dim() == 0 {
            return 0.0;
        }
        let a = singular_values(&other.reject(&self.basis))[0];
        let b = singular_values(&self.reject(&other.basis))[0];
        a.max(b).min(1.0)
    }

    /// Sine of the smallest principal angle; 1 when either space is trivial.
    pub fn min_angle_sine(&self, other: &Subspace) -> f64 {
        if self.dim() == 0 || other.dim() == 0 {
            return 1.0;
        }
        let (small, big) = if self.dim() <= other.dim() { (self, other) } else { (other, self) };
        let s = singular_values(&big.reject(&small.basis));
        if s.len() < small.dim() {
            return 0.0;
        }
        s.last().copied().unwrap_or(0.0).min(1.0)
    }

    /// Largest distance of the columns of `self` from `other`; 0 iff `self ⊆ other`.
    pub fn inclusion_gap(&self, other: &Subspace) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        singular_values(&other.reject(&self.basis))[0]
    }

    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        other.inclusion_gap(self) < tol
    }

    pub fn intersect(&self, other: &Subspace, pol: &TolerancePolicy) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.ambient_dim);
        }
        let k = null_basis_abs(&other.reject(&self.basis), pol.subspace_tol);
        let gen = &self.basis * k.basis;
        let (u, _, _) = svd_sorted(&gen);
        Subspace { ambient_dim: self.ambient_dim, basis: u }
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let n = self.ambient_dim;
        let mut gen = CMatrix::zeros(n, self.dim() + other.dim());
        gen.view_mut((0, 0), (n, self.dim())).copy_from(&self.basis);
        gen.view_mut((0, self.dim()), (n, other.dim())).copy_from(&other.basis);
        let (u, s, _) = svd_sorted(&gen);
        let k = s.iter().filter(|&&x| x > 1e-8).count();
        Subspace { ambient_dim: n, basis: u.columns(0, k).into_owned() }
    }

    /// Orthonormality defect `‖QᴴQ − I‖`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.basis.adjoint() * &self.basis;
        (g - CMatrix::identity(self.dim(), self.dim())).norm()
    }
}
