use super::{CMatrix, TolerancePolicy, C64};

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn herm(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD with singular values sorted in decreasing order.
/// Returns `(U, σ, V)` with `m = U diag(σ) Vᴴ`.
///
/// Backed by faer: nalgebra 0.35's complex SVD returns inaccurate factors for some
/// rank-deficient inputs.
pub fn svd_sorted(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (r, c) = m.shape();
    if r.min(c) == 0 {
        return (CMatrix::zeros(r, 0), Vec::new(), CMatrix::zeros(c, 0));
    }
    let svd = to_faer(m).thin_svd().expect("SVD of a finite matrix converges");
    let s = svd.S().column_vector().iter().map(|z| z.re).collect();
    (from_faer(svd.U()), s, from_faer(svd.V()))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows().min(m.ncols()) == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD of a finite matrix converges")
}

fn rank_threshold(s: &[f64], rows: usize, cols: usize, pol: &TolerancePolicy, scale: f64) -> usize {
    let thresh = pol.rank_rel_tol * scale * rows.max(cols) as f64;
    if scale == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > thresh).count()
}

pub fn rank_with_tol(m: &CMatrix, pol: &TolerancePolicy) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    rank_threshold(&s, m.nrows(), m.ncols(), pol, smax)
}

/// Orthonormal basis of the column space, with the rank decided relative to σ_max.
pub fn range_basis(m: &CMatrix, pol: &TolerancePolicy) -> super::Subspace {
    let smax = singular_values(m).first().copied().unwrap_or(0.0);
    range_basis_scaled(m, pol, smax)
}

/// Column space with the rank decided relative to an external scale, e.g. the norm
/// of the operator that produced `m`. Keeps roundoff-level columns out of the basis.
pub fn range_basis_scaled(m: &CMatrix, pol: &TolerancePolicy, scale: f64) -> super::Subspace {
    let (u, s, _) = svd_sorted(m);
    let k = rank_threshold(&s, m.nrows(), m.ncols(), pol, scale);
    super::Subspace::from_orthonormal(u.columns(0, k).into_owned())
}

fn full_right_vectors(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (r, c) = m.shape();
    if c == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    if r >= c {
        let (_, s, v) = svd_sorted(m);
        (s, v)
    } else {
        let mut sq = CMatrix::zeros(c, c);
        sq.view_mut((0, 0), (r, c)).copy_from(m);
        let (_, mut s, v) = svd_sorted(&sq);
        s.truncate(r);
        (s, v)
    }
}

pub fn null_basis(m: &CMatrix, pol: &TolerancePolicy) -> super::Subspace {
    let (s, v) = full_right_vectors(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let k = rank_threshold(&s, m.nrows(), m.ncols(), pol, smax);
    let c = m.ncols();
    super::Subspace::from_orthonormal(v.columns(k, c - k).into_owned())
}

/// Kernel with the rank decided relative to an external scale.
pub fn null_basis_scaled(m: &CMatrix, pol: &TolerancePolicy, scale: f64) -> super::Subspace {
    let (s, v) = full_right_vectors(m);
    let k = rank_threshold(&s, m.nrows(), m.ncols(), pol, scale);
    let c = m.ncols();
    super::Subspace::from_orthonormal(v.columns(k, c - k).into_owned())
}

/// Kernel with an absolute singular-value threshold.
pub fn null_basis_abs(m: &CMatrix, tol: f64) -> super::Subspace {
    let (s, v) = full_right_vectors(m);
    let k = s.iter().filter(|&&x| x > tol).count();
    let c = m.ncols();
    super::Subspace::from_orthonormal(v.columns(k, c - k).into_owned())
}

/// Spectral norm.
pub fn norm2(m: &CMatrix) -> f64 {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return 0.0;
    }
    singular_values(m)[0]
}

/// Partial-pivoting LU solve; `None` when the result is not finite.
fn faer_solve(m: &CMatrix, rhs: faer::Mat<C64>) -> Option<CMatrix> {
    use faer::linalg::solvers::Solve;
    let x = to_faer(m).partial_piv_lu().solve(rhs);
    let x = from_faer(x.as_ref());
    is_finite(&x).then_some(x)
}

pub fn try_inverse(m: &CMatrix) -> Option<CMatrix> {
    let n = m.nrows();
    if n == 0 {
        return Some(CMatrix::zeros(0, 0));
    }
    faer_solve(m, faer::Mat::identity(n, n))
}

pub fn lu_solve(m: &CMatrix, rhs: &CMatrix) -> Option<CMatrix> {
    if m.nrows() == 0 {
        return Some(CMatrix::zeros(0, rhs.ncols()));
    }
    faer_solve(m, to_faer(rhs))
}

/// `a·b`, through faer once the product is large enough to matter.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() * a.ncols() * b.ncols() < 1 << 18 {
        return a * b;
    }
    from_faer((to_faer(a) * to_faer(b)).as_ref())
}

/// Smallest singular value of a square matrix; 0 when it is numerically singular.
pub fn min_singular(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    *singular_values(m).last().unwrap_or(&0.0)
}

/// Full column rank of a square matrix under the relative rank rule.
pub fn full_rank(m: &CMatrix, pol: &TolerancePolicy) -> bool {
    m.nrows() == 0 || rank_with_tol(m, pol) == m.nrows().min(m.ncols())
}

/// Eigenvalues of a square matrix.
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    to_faer(m).eigenvalues().expect("eigenvalues of a finite matrix converge")
}

/// Largest eigenvalue of a Hermitian matrix (only the Hermitian part is used).
pub fn max_eig_herm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return f64::NEG_INFINITY;
    }
    let ev = to_faer(&herm(m))
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("Hermitian eigenvalues converge");
    ev.last().copied().unwrap_or(f64::NEG_INFINITY)
}
