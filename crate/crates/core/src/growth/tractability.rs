use crate::numerics::{identity, null_basis, try_inverse, CMatrix, Subspace};
use crate::pencil::MatrixPencil;
use crate::{Error, Result};

/// One stage `(E_i, A_i, Q_i, P_i)`; `ran Q_i = ker E_i`, `P_i = I − Q_i`.
#[derive(Debug, Clone)]
pub struct TractabilityStage {
    pub e: CMatrix,
    pub a: CMatrix,
    pub q: CMatrix,
    pub p: CMatrix,
}

#[derive(Debug, Clone)]
pub struct TractabilityChain {
    pub stages: Vec<TractabilityStage>,
    /// First `i` with `ker E_i = {0}`; `None` if `max_stages` ran out first.
    pub index: Option<usize>,
    /// `dim ker E_i` per stage, including the final one.
    pub kernel_dims: Vec<usize>,
}

/// `E_{i+1} = E_i − A_i Q_i`, `A_{i+1} = A_i P_i` with `Q_i` projecting onto `ker E_i`
/// along `Σ_{j<i} ker E_j ⊕ (ker E_i + Σ_{j<i} ker E_j)^⊥`.
pub fn tractability_chain(p: &MatrixPencil, max_stages: usize) -> Result<TractabilityChain> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch("tractability chain needs a square pencil".into()));
    }
    let n = p.n();
    let mut e = p.e.clone();
    let mut a = p.a.clone();
    let mut sum = Subspace::zero(n);
    let mut stages = Vec::new();
    let mut kernel_dims = Vec::new();
    for i in 0..=max_stages {
        let mut ker = null_basis(&e, &p.pol);
        ker.ambient_dim = n;
        kernel_dims.push(ker.dim());
        if ker.dim() == 0 {
            return Ok(TractabilityChain { stages, index: Some(i), kernel_dims });
        }
        if i == max_stages {
            break;
        }
        if i >= n || sum.intersect(&ker, &p.pol).dim() > 0 {
            return Err(Error::ChainStalled(i));
        }
        let both = sum.sum(&ker);
        let rest = both.orthogonal_complement();
        let (d, s) = (ker.dim(), sum.dim());
        if d + s + rest.dim() != n {
            return Err(Error::ChainStalled(i));
        }
        let mut m = CMatrix::zeros(n, n);
        m.view_mut((0, 0), (n, d)).copy_from(&ker.basis);
        m.view_mut((0, d), (n, s)).copy_from(&sum.basis);
        m.view_mut((0, d + s), (n, rest.dim())).copy_from(&rest.basis);
        let minv = try_inverse(&m).ok_or(Error::ChainStalled(i))?;
        let q = m.columns(0, d) * minv.rows(0, d);
        let pm = identity(n) - &q;
        let e_next = &e - &a * &q;
        let a_next = &a * &pm;
        stages.push(TractabilityStage { e, a, q, p: pm });
        sum = both;
        e = e_next;
        a = a_next;
    }
    Ok(TractabilityChain { stages, index: None, kernel_dims })
}
