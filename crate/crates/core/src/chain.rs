//! Kernel and range chains of pseudo-resolvent powers, the range/kernel splitting
//! and the restricted generator on the stabilized range.

use crate::numerics::{
    min_singular, norm2, null_basis_scaled, range_basis_scaled, try_inverse, CMatrix, Subspace, C64,
};
use crate::pencil::{MatrixPencil, Side};
use crate::{Error, Result};

/// `V_j = ran R(μ)^j` and `W_j = ker R(μ)^j`, `j = 0, 1, …`.
#[derive(Debug, Clone)]
pub struct SubspaceChain {
    pub mu: C64,
    pub side: Side,
    pub v: Vec<Subspace>,
    pub w: Vec<Subspace>,
    pub stabilization_k: Option<usize>,
    /// `R(μ)` itself, kept for the generator and the staircase.
    pub r_mu: CMatrix,
    pub r_norm: f64,
}

impl SubspaceChain {
    pub fn ambient_dim(&self) -> usize {
        self.r_mu.nrows()
    }

    pub fn dims(&self) -> (Vec<usize>, Vec<usize>) {
        (self.v.iter().map(Subspace::dim).collect(), self.w.iter().map(Subspace::dim).collect())
    }

    /// `(V_k, W_k)` at stabilization.
    pub fn stable_pair(&self) -> Result<(&Subspace, &Subspace)> {
        let k = self.stabilization_k.ok_or(Error::ChainNotStabilized)?;
        Ok((&self.v[k], &self.w[k]))
    }

    /// Largest inclusion defect along both chains.
    pub fn monotonicity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.v.len() - 1 {
            worst = worst.max(self.v[j + 1].inclusion_gap(&self.v[j]));
            worst = worst.max(self.w[j].inclusion_gap(&self.w[j + 1]));
        }
        worst
    }
}

/// Builds the chains by iterated products against orthonormal bases. Stops one step
/// past stabilization or at `max_k` (default: ambient dimension).
pub fn build_chain(p: &MatrixPencil, mu: C64, side: Side, max_k: Option<usize>) -> Result<SubspaceChain> {
    let r = p.pseudo_resolvent(mu, side)?;
    let n = r.nrows();
    let max_k = max_k.unwrap_or(n).max(1);
    let scale = norm2(&r);
    let tol = p.pol.subspace_tol;
    let mut v = vec![Subspace::full(n)];
    let mut w = vec![Subspace::zero(n)];
    let mut stab = None;
    for j in 0..=max_k {
        let img = &r * &v[j].basis;
        let mut next_v = range_basis_scaled(&img, &p.pol, scale);
        next_v.ambient_dim = n;
        let mut next_w = null_basis_scaled(&w[j].reject(&r), &p.pol, scale);
        next_w.ambient_dim = n;
        let done = v[j].distance(&next_v) < tol && w[j].distance(&next_w) < tol;
        v.push(next_v);
        w.push(next_w);
        if done {
            stab = Some(j);
            break;
        }
    }
    Ok(SubspaceChain { mu, side, v, w, stabilization_k: stab, r_mu: r, r_norm: scale })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionCheck {
    pub holds: bool,
    /// Sine of the smallest principal angle between `V_k` and `W_k`.
    pub gap: f64,
}

/// Tests `ℂⁿ = V_k ⊕ W_k`.
pub fn check_decomposition(chain: &SubspaceChain, subspace_tol: f64) -> Result<DecompositionCheck> {
    let (vk, wk) = chain.stable_pair()?;
    let gap = vk.min_angle_sine(wk);
    let holds = vk.dim() + wk.dim() == chain.ambient_dim() && gap > subspace_tol;
    Ok(DecompositionCheck { holds, gap })
}

/// `A_R = μI + S⁻¹` with `S = Qᴴ R(μ) Q` on `V_k = ran Q`.
#[derive(Debug, Clone)]
pub struct RestrictedGenerator {
    pub basis: Subspace,
    pub matrix: CMatrix,
    pub mu_used: C64,
}

impl RestrictedGenerator {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `‖(A_R − λ)⁻¹ − Qᴴ R(λ) Q‖`.
    pub fn resolvent_mismatch(&self, p: &MatrixPencil, side: Side, lambda: C64) -> Result<f64> {
        if self.dim() == 0 {
            return Ok(0.0);
        }
        let d = self.dim();
        let shifted = &self.matrix - CMatrix::identity(d, d) * lambda;
        let inv = try_inverse(&shifted).ok_or(Error::NotInResolventSet(lambda))?;
        let rq = p.apply_pseudo_resolvent(lambda, side, &self.basis.basis)?;
        let compressed = self.basis.basis.adjoint() * rq;
        Ok(norm2(&(inv - compressed)))
    }
}

pub fn restricted_generator(p: &MatrixPencil, chain: &SubspaceChain) -> Result<RestrictedGenerator> {
    let dec = check_decomposition(chain, p.pol.subspace_tol)?;
    if !dec.holds {
        return Err(Error::DecompositionUnavailable);
    }
    let (vk, _) = chain.stable_pair()?;
    let d = vk.dim();
    if d == 0 {
        return Ok(RestrictedGenerator { basis: vk.clone(), matrix: CMatrix::zeros(0, 0), mu_used: chain.mu });
    }
    let q = &vk.basis;
    let s = q.adjoint() * &chain.r_mu * q;
    if min_singular(&s) <= p.pol.rank_rel_tol * chain.r_norm * d as f64 {
        return Err(Error::NotInjectiveOnVk);
    }
    let sinv = try_inverse(&s).ok_or(Error::NotInjectiveOnVk)?;
    let matrix = CMatrix::identity(d, d) * chain.mu + sinv;
    Ok(RestrictedGenerator { basis: vk.clone(), matrix, mu_used: chain.mu })
}

#[derive(Debug, Clone)]
pub struct YImpliReport {
    pub holds: bool,
    /// Basis of `ran E`.
    pub range_e: Subspace,
    /// The operator with graph `{(EA⁻¹z, z) : z ∈ ran E}` in the `range_e` basis, when single-valued.
    pub generator: Option<CMatrix>,
}

/// `ker E ∩ A⁻¹(ran E) = {0}`; requires `0 ∈ ρ(A)`.
pub fn y_impli_check(p: &MatrixPencil) -> Result<YImpliReport> {
    let zero = C64::new(0.0, 0.0);
    let a_inv = crate::numerics::try_inverse(&p.a).ok_or(Error::NotInResolventSet(zero))?;
    if !crate::numerics::full_rank(&p.a, &p.pol) {
        return Err(Error::NotInResolventSet(zero));
    }
    let range_e = crate::numerics::range_basis(&p.e, &p.pol);
    let ker_e = crate::numerics::null_basis(&p.e, &p.pol);
    let ak = &p.a * &ker_e.basis;
    let off = range_e.reject(&ak);
    let inter = null_basis_scaled(&off, &p.pol, p.norm_a().max(f64::MIN_POSITIVE));
    let holds = ker_e.dim() == 0 || inter.dim() == 0;
    let generator = if holds && range_e.dim() > 0 {
        let q = &range_e.basis;
        let s = q.adjoint() * &p.e * &a_inv * q;
        try_inverse(&s)
    } else if holds {
        Some(CMatrix::zeros(0, 0))
    } else {
        None
    };
    Ok(YImpliReport { holds, range_e, generator })
}
