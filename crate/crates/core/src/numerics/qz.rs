//! Generalized Schur form of a regular pencil, used as an independent index oracle.
//!
//! The pencil is rotated, `A' = cA − sE`, `E' = sA + cE`, with the angle chosen so
//! that `E'` is well conditioned. A complex Schur form of `E'⁻¹A'` is reordered to
//! push the images of infinite eigenvalues to the bottom, then a QR step on `E'Z`
//! yields unitary `Q, Z` with `QᴴAZ` and `QᴴEZ` both upper triangular.

use super::linalg::{full_rank, min_singular, try_inverse};
use super::{CMatrix, TolerancePolicy, C64};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Chordal size below which an eigenvalue of the normalized pencil counts as infinite.
const INFINITE_CHORDAL: f64 = 1e-3;
/// Relative threshold on `‖N^k‖` for the nilpotency index of the infinite block.
const NILPOTENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GeneralizedSchur {
    pub q: CMatrix,
    pub z: CMatrix,
    /// `QᴴAZ`
    pub s: CMatrix,
    /// `QᴴEZ`
    pub t: CMatrix,
    /// Number of leading finite eigenvalues; the trailing block is infinite.
    pub n_finite: usize,
}

#[derive(Debug, Clone)]
pub struct QzResult {
    /// Finite eigenvalues, in Schur order.
    pub finite: Vec<C64>,
    pub n_infinite: usize,
    /// Nilpotency index of the infinite part (0 without infinite eigenvalues).
    pub index: usize,
    pub schur: GeneralizedSchur,
}

impl QzResult {
    /// All eigenvalues, `None` standing for ∞.
    pub fn eigenvalues(&self) -> Vec<Option<C64>> {
        self.finite.iter().map(|&l| Some(l)).chain(std::iter::repeat(None).take(self.n_infinite)).collect()
    }
}

/// Probe points with |λ| log-spaced in [1, 1e6] and scrambled phases.
pub(crate) fn regularity_probes() -> Vec<C64> {
    (0..8)
        .map(|j| {
            let r = 10f64.powf(6.0 * j as f64 / 7.0);
            let phase = 2.0 * PI * ((j as f64 * 0.618_033_988_75 + 0.137) % 1.0);
            C64::from_polar(r, phase)
        })
        .collect()
}

pub(crate) fn is_regular(e: &CMatrix, a: &CMatrix, pol: &TolerancePolicy) -> bool {
    let n = e.ncols();
    if e.nrows() != n {
        return false;
    }
    regularity_probes().into_iter().any(|l| full_rank(&(e * l - a), pol))
}

fn lartg(f: C64, g: C64) -> (f64, C64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let fn_ = f.norm();
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let rho = (fn_ * fn_ + gn * gn).sqrt();
    (fn_ / rho, (f / fn_) * g.conj() / rho)
}

/// Swaps the adjacent diagonal entries `k, k+1` of the upper triangular `t`,
/// updating the Schur vectors `q` (LAPACK ztrexc step).
fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, k: usize) {
    let n = t.nrows();
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    let (cs, sn) = lartg(t[(k, k + 1)], t22 - t11);
    let csc = C64::new(cs, 0.0);
    for j in (k + 2)..n {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = csc * x + sn * y;
        t[(k + 1, j)] = csc * y - sn.conj() * x;
    }
    for i in 0..k {
        let x = t[(i, k)];
        let y = t[(i, k + 1)];
        t[(i, k)] = csc * x + sn.conj() * y;
        t[(i, k + 1)] = csc * y - sn * x;
    }
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    for i in 0..n {
        let x = q[(i, k)];
        let y = q[(i, k + 1)];
        q[(i, k)] = csc * x + sn.conj() * y;
        q[(i, k + 1)] = csc * y - sn * x;
    }
}

/// Complex Schur form `m = Z T Zᴴ` (LAPACK `zgees`).
fn complex_schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    let ni = i32::try_from(n).map_err(|_| Error::InvalidInput("matrix too large for LAPACK".into()))?;
    let mut t = m.clone();
    let mut z = CMatrix::zeros(n, n);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut rwork = vec![0.0; n];
    let mut bwork = vec![0i32; n];
    let (mut sdim, mut info) = (0, 0);
    let mut query = [C64::new(0.0, 0.0)];
    // SAFETY: every buffer has the size zgees expects for an n×n problem.
    unsafe {
        lapack::zgees(
            b'V', b'N', None, ni, t.as_mut_slice(), ni, &mut sdim, &mut w, z.as_mut_slice(), ni, &mut query, -1,
            &mut rwork, &mut bwork, &mut info,
        );
    }
    let lwork = (query[0].re as usize).max(2 * n).max(1);
    let mut work = vec![C64::new(0.0, 0.0); lwork];
    unsafe {
        lapack::zgees(
            b'V', b'N', None, ni, t.as_mut_slice(), ni, &mut sdim, &mut w, z.as_mut_slice(), ni, &mut work,
            lwork as i32, &mut rwork, &mut bwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::NoConvergence);
    }
    Ok((z, t))
}

/// Generalized eigenvalues and Kronecker index of the regular pencil `λE − A`.
pub fn qz_canonical(e: &CMatrix, a: &CMatrix, pol: &TolerancePolicy) -> Result<QzResult> {
    let n = e.nrows();
    if e.shape() != a.shape() || e.ncols() != n {
        return Err(Error::DimensionMismatch("qz_canonical needs square E and A of equal size".into()));
    }
    if n == 0 {
        let empty = CMatrix::zeros(0, 0);
        return Ok(QzResult {
            finite: vec![],
            n_infinite: 0,
            index: 0,
            schur: GeneralizedSchur { q: empty.clone(), z: empty.clone(), s: empty.clone(), t: empty, n_finite: 0 },
        });
    }
    if !is_regular(e, a, pol) {
        return Err(Error::SingularPencil);
    }
    let ne = e.norm();
    let na = a.norm();
    let en = if ne > 0.0 { e / C64::new(ne, 0.0) } else { e.clone() };
    let an = if na > 0.0 { a / C64::new(na, 0.0) } else { a.clone() };

    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 0..8 {
        let th = (j as f64 + 0.5) * PI / 8.0 - PI / 2.0;
        let b = &an * C64::new(th.sin(), 0.0) + &en * C64::new(th.cos(), 0.0);
        let sm = min_singular(&b);
        if sm > best.0 {
            best = (sm, th);
        }
    }
    let th = best.1;
    let (c, s) = (th.cos(), th.sin());
    let ar = &an * C64::new(c, 0.0) - &en * C64::new(s, 0.0);
    let br = &an * C64::new(s, 0.0) + &en * C64::new(c, 0.0);
    let binv = try_inverse(&br).ok_or(Error::SingularPencil)?;
    let m = &binv * &ar;
    let (mut zq, mut tm) = complex_schur(&m)?;

    // (α, β) of the unrotated normalized pencil for a rotated eigenvalue λ'.
    let infinite = |lp: C64| {
        let alpha = C64::new(s, 0.0) + lp * c;
        let beta = C64::new(c, 0.0) - lp * s;
        beta.norm() <= INFINITE_CHORDAL * (alpha.norm_sqr() + beta.norm_sqr()).sqrt()
    };
    let mut flags: Vec<bool> = (0..n).map(|i| infinite(tm[(i, i)])).collect();
    loop {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1) {
            if flags[k] && !flags[k + 1] {
                swap_adjacent(&mut tm, &mut zq, k);
                flags.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let n_inf = flags.iter().filter(|&&f| f).count();
    let n_fin = n - n_inf;

    let qr = (&br * &zq).qr();
    let q = qr.q();
    let sm = q.adjoint() * &an * &zq;
    let tmat = q.adjoint() * &en * &zq;

    let mut finite = Vec::with_capacity(n_fin);
    for i in 0..n_fin {
        let lam_n = sm[(i, i)] / tmat[(i, i)];
        finite.push(if ne > 0.0 { lam_n * (na / ne) } else { lam_n });
    }

    let index = if n_inf == 0 {
        0
    } else {
        let s22 = sm.view((n_fin, n_fin), (n_inf, n_inf)).into_owned();
        let t22 = tmat.view((n_fin, n_fin), (n_inf, n_inf)).into_owned();
        let s22i = try_inverse(&s22).ok_or(Error::SingularPencil)?;
        // Powers of the computed block (not a zeroed-diagonal copy) stay O(ε)-close to
        // the exact nilpotent powers.
        let nmat = s22i * t22;
        let scale = 1.0 + nmat.norm();
        let mut p = nmat.clone();
        let mut k = 1;
        while p.norm() > NILPOTENT_TOL * scale.powi(k as i32) && k < n_inf {
            p = &p * &nmat;
            k += 1;
        }
        k
    };

    let s_out = q.adjoint() * a * &zq;
    let t_out = q.adjoint() * e * &zq;
    Ok(QzResult {
        finite,
        n_infinite: n_inf,
        index,
        schur: GeneralizedSchur { q, z: zq, s: s_out, t: t_out, n_finite: n_fin },
    })
}
