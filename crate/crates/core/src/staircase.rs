//! Unitary staircase form of a pseudo-resolvent.
//!
//! `ℂⁿ = V_1 ⊕ W_1` with `W_1 = ker R(μ)ᴴ`, then `V_j = V_{j+1} ⊕ W_{j+1}` orthogonally until
//! the range chain stops shrinking. In the basis `[V_k | W_k | … | W_1]` every `R(λ)` is
//! block upper triangular and its `W` diagonal blocks vanish.

use crate::numerics::{norm2, null_basis_abs, range_basis_scaled, CMatrix, Subspace, C64};
use crate::pencil::{MatrixPencil, Side};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct StaircaseForm {
    pub mu: C64,
    pub side: Side,
    pub unitary: CMatrix,
    /// `[dim V_k, dim W_k, …, dim W_1]`
    pub block_sizes: Vec<usize>,
    /// Zero-pattern residuals `(λ, residual)` from construction.
    pub residuals: Vec<(C64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StaircaseReport {
    pub mu: [f64; 2],
    pub side: Side,
    pub block_sizes: Vec<usize>,
    pub unitary_re: Vec<f64>,
    pub unitary_im: Vec<f64>,
    pub residuals: Vec<PatternResidual>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternResidual {
    pub lambda: [f64; 2],
    pub residual: f64,
}

/// Offsets from `μ` at which the zero pattern is verified.
const CHECK_OFFSETS: [(f64, f64); 3] = [(0.731, 0.217), (1.913, -0.402), (3.117, 0.05)];

impl StaircaseForm {
    /// Number of `W` blocks, i.e. the stabilization index of the range chain.
    pub fn index(&self) -> usize {
        self.block_sizes.len() - 1
    }

    pub fn dynamic_dim(&self) -> usize {
        self.block_sizes[0]
    }

    /// Start offset of every block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0];
        for s in &self.block_sizes {
            off.push(off.last().unwrap() + s);
        }
        off
    }

    pub fn v_basis(&self) -> CMatrix {
        self.unitary.columns(0, self.block_sizes[0]).into_owned()
    }

    /// `Uᴴ R(λ) U`.
    pub fn blocks_of(&self, p: &MatrixPencil, lambda: C64) -> Result<CMatrix> {
        let ru = p.apply_pseudo_resolvent(lambda, self.side, &self.unitary)?;
        Ok(self.unitary.adjoint() * ru)
    }

    /// Largest block that should vanish, relative to `1 + ‖R(λ)‖`.
    pub fn pattern_residual(&self, p: &MatrixPencil, lambda: C64) -> Result<f64> {
        let t = self.blocks_of(p, lambda)?;
        Ok(self.pattern_defect(&t) / (1.0 + norm2(&t)))
    }

    fn pattern_defect(&self, t: &CMatrix) -> f64 {
        let off = self.offsets();
        let nb = self.block_sizes.len();
        let mut worst: f64 = 0.0;
        for bi in 0..nb {
            for bj in 0..=bi {
                if bi == bj && bi == 0 {
                    continue;
                }
                let (ri, rj) = (self.block_sizes[bi], self.block_sizes[bj]);
                if ri == 0 || rj == 0 {
                    continue;
                }
                let blk = t.view((off[bi], off[bj]), (ri, rj));
                worst = worst.max(blk.norm());
            }
        }
        worst
    }

    pub fn report(&self) -> StaircaseReport {
        let u = &self.unitary;
        let mut unitary_re = Vec::with_capacity(u.len());
        let mut unitary_im = Vec::with_capacity(u.len());
        for i in 0..u.nrows() {
            for j in 0..u.ncols() {
                unitary_re.push(u[(i, j)].re);
                unitary_im.push(u[(i, j)].im);
            }
        }
        StaircaseReport {
            mu: [self.mu.re, self.mu.im],
            side: self.side,
            block_sizes: self.block_sizes.clone(),
            unitary_re,
            unitary_im,
            residuals: self
                .residuals
                .iter()
                .map(|(l, r)| PatternResidual { lambda: [l.re, l.im], residual: *r })
                .collect(),
        }
    }
}

fn complement_within(outer: &Subspace, inner: &Subspace) -> Subspace {
    let coords = outer.basis.adjoint() * &inner.basis;
    let k = null_basis_abs(&coords.adjoint(), 0.5);
    Subspace::from_orthonormal(&outer.basis * k.basis)
}

pub fn build_staircase(p: &MatrixPencil, mu: C64, side: Side) -> Result<StaircaseForm> {
    let r = p.pseudo_resolvent(mu, side)?;
    let n = r.nrows();
    let scale = norm2(&r);
    let mut vcur = range_basis_scaled(&r, &p.pol, scale);
    vcur.ambient_dim = n;
    let mut ws: Vec<Subspace> = Vec::new();
    if vcur.dim() < n {
        ws.push(vcur.orthogonal_complement());
        for _ in 0..n {
            let mut vnext = range_basis_scaled(&(&r * &vcur.basis), &p.pol, scale);
            vnext.ambient_dim = n;
            if vnext.dim() == vcur.dim() {
                break;
            }
            ws.push(complement_within(&vcur, &vnext));
            vcur = vnext;
        }
    }
    let mut block_sizes = vec![vcur.dim()];
    let mut unitary = CMatrix::zeros(n, n);
    unitary.view_mut((0, 0), (n, vcur.dim())).copy_from(&vcur.basis);
    let mut col = vcur.dim();
    for w in ws.iter().rev() {
        unitary.view_mut((0, col), (n, w.dim())).copy_from(&w.basis);
        col += w.dim();
        block_sizes.push(w.dim());
    }
    if col != n {
        return Err(Error::PatternViolation(1.0));
    }
    let mut form = StaircaseForm { mu, side, unitary, block_sizes, residuals: Vec::new() };
    for (dr, di) in CHECK_OFFSETS {
        let mut lambda = mu + C64::new(dr, di);
        let mut res = form.pattern_residual(p, lambda);
        for _ in 0..4 {
            if res.is_ok() {
                break;
            }
            lambda += C64::new(0.5, 0.0);
            res = form.pattern_residual(p, lambda);
        }
        let res = res?;
        form.residuals.push((lambda, res));
        if res > p.pol.residual_tol {
            return Err(Error::PatternViolation(res));
        }
    }
    Ok(form)
}
