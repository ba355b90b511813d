//! Decoupled solution of `d/dt Ex = Ax + f` through the right pseudo-resolvent
//! `R = (A − μE)⁻¹E`.
//!
//! With `M = A − μE` and `x_μ = e^{−μt}x` the system becomes `R x_μ' = x_μ + ĝ`,
//! `ĝ(t) = e^{−μt} M⁻¹ f(t)`. The stabilized range `V_k` and kernel `W_k` of `R^k` are both
//! `R`-invariant, so the kernel part is found by back-substitution through the staircase
//! blocks and the range part by variation of constants with `A_R = μ + S⁻¹`.

use super::forcing::{ForcingSignal, MappedSignal};
use super::residuals::residuals;
use super::{check_grid, InitMode, SolveMethod, SolveReport};
use crate::chain::{build_chain, check_decomposition, SubspaceChain};
use crate::growth::auto_mu;
use crate::numerics::{expm, gauss_legendre, min_singular, try_inverse, CMatrix, CVector, C64};
use crate::pencil::{MatrixPencil, Side};
use crate::semigroup::{Complement, DegenerateSemigroup};
use crate::staircase::{build_staircase, StaircaseForm};
use crate::{Error, Result};
use std::collections::HashMap;

/// Gauss–Legendre nodes per step for forcing without exact stepping.
const GL_POINTS: usize = 6;

/// Oblique projectors onto `V_k` along `W_k` and onto `W_k` along `V_k`.
pub fn oblique_projectors(chain: &SubspaceChain, subspace_tol: f64) -> Result<(CMatrix, CMatrix)> {
    let dec = check_decomposition(chain, subspace_tol)?;
    if !dec.holds {
        return Err(Error::DecompositionUnavailable);
    }
    let (vk, wk) = chain.stable_pair()?;
    let n = chain.ambient_dim();
    let d = vk.dim();
    let mut basis = CMatrix::zeros(n, n);
    basis.view_mut((0, 0), (n, d)).copy_from(&vk.basis);
    basis.view_mut((0, d), (n, n - d)).copy_from(&wk.basis);
    let inv = try_inverse(&basis).ok_or(Error::DecompositionUnavailable)?;
    let p_r = &vk.basis * inv.rows(0, d);
    let p_k = CMatrix::identity(n, n) - &p_r;
    Ok((p_r, p_k))
}

/// `(A − μE)⁻¹`.
fn shifted_inverse(p: &MatrixPencil, mu: C64) -> Result<CMatrix> {
    Ok(-p.resolvent_at(mu)?.inverse)
}

/// Splits `ĝ_μ = e^{−μt}(A − μE)⁻¹ f` into `(f_R, f_K)` with values in `V_k` and `W_k`.
pub fn split_forcing(
    p: &MatrixPencil,
    chain: &SubspaceChain,
    f: &ForcingSignal,
) -> Result<(ForcingSignal, ForcingSignal)> {
    if f.dim() != p.n() {
        return Err(Error::DimensionMismatch(format!("forcing has length {}, pencil {}", f.dim(), p.n())));
    }
    let (p_r, p_k) = oblique_projectors(chain, p.pol.subspace_tol)?;
    let m_inv = shifted_inverse(p, chain.mu)?;
    let wrap = |proj: CMatrix| {
        ForcingSignal::Mapped(Box::new(MappedSignal { map: proj * &m_inv, decay: chain.mu, inner: f.clone() }))
    };
    Ok((wrap(p_r), wrap(p_k)))
}

/// Everything the stepping needs, fixed by the pencil and `μ`.
#[derive(Debug, Clone)]
pub struct Decoupling {
    pub mu: C64,
    pub chain: SubspaceChain,
    pub stair: StaircaseForm,
    /// Orthonormal basis of `V_k`, the leading staircase block.
    pub q: CMatrix,
    /// `V_k` coordinates along `W_k`: `P_R = q · coords`.
    pub coords: CMatrix,
    /// `A_R = μ + S⁻¹`, `S = qᴴ R(μ) q`.
    pub generator: CMatrix,
    /// Input map of the unshifted range equation `w' = A_R w + B f`.
    pub input: CMatrix,
    /// `x_K(t) = Σ_j kernel_ops[j] f^{(j)}(t)`.
    pub kernel_ops: Vec<CMatrix>,
}

impl Decoupling {
    pub fn new(p: &MatrixPencil, mu: C64) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::DimensionMismatch("solver needs a square pencil".into()));
        }
        let n = p.n();
        let chain = build_chain(p, mu, Side::Right, None)?;
        chain.stabilization_k.ok_or(Error::ChainNotStabilized)?;
        let (p_r, p_k) = oblique_projectors(&chain, p.pol.subspace_tol)?;
        let stair = build_staircase(p, mu, Side::Right)?;
        let (vk, _) = chain.stable_pair()?;
        let d = stair.dynamic_dim();
        if d != vk.dim() {
            return Err(Error::DecompositionUnavailable);
        }
        let m_inv = shifted_inverse(p, mu)?;
        let u = &stair.unitary;
        let q = stair.v_basis();
        let t = u.adjoint() * &chain.r_mu * u;

        let (generator, input, coords) = if d > 0 {
            let s = t.view((0, 0), (d, d)).into_owned();
            if min_singular(&s) <= p.pol.rank_rel_tol * chain.r_norm * d as f64 {
                return Err(Error::NotInjectiveOnVk);
            }
            let s_inv = try_inverse(&s).ok_or(Error::NotInjectiveOnVk)?;
            let coords = q.adjoint() * &p_r;
            let input = &s_inv * &coords * &m_inv;
            (CMatrix::identity(d, d) * mu + s_inv, input, coords)
        } else {
            (CMatrix::zeros(0, 0), CMatrix::zeros(0, n), CMatrix::zeros(0, n))
        };

        let kernel_ops = kernel_operators(&stair, &t, &chain, &p_k, &m_inv, mu)?;
        Ok(Self { mu, chain, stair, q, coords, generator, input, kernel_ops })
    }

    pub fn index(&self) -> usize {
        self.stair.index()
    }

    pub fn dynamic_dim(&self) -> usize {
        self.q.ncols()
    }

    /// Highest derivative order of `f` entering the kernel part (`k − 1`), if any.
    pub fn kernel_order(&self) -> Option<usize> {
        self.kernel_ops.len().checked_sub(1)
    }

    /// `x_K(t)` from derivatives of `f` up to `max_order`.
    fn kernel_part(&self, f: &ForcingSignal, t: f64, max_order: usize) -> Result<CVector> {
        let mut x = CVector::zeros(self.stair.unitary.nrows());
        for (j, kj) in self.kernel_ops.iter().enumerate().take(max_order.saturating_add(1)) {
            x += kj * f.derivative(t, j)?;
        }
        Ok(x)
    }

    fn assemble(&self, w: &CVector, xk: CVector) -> CVector {
        if self.dynamic_dim() == 0 {
            xk
        } else {
            &self.q * w + xk
        }
    }
}

/// Back-substitution through the staircase rows of `W_k` expressed as operators on the
/// derivatives of `f` after undoing the shift.
fn kernel_operators(
    stair: &StaircaseForm,
    t: &CMatrix,
    chain: &SubspaceChain,
    p_k: &CMatrix,
    m_inv: &CMatrix,
    mu: C64,
) -> Result<Vec<CMatrix>> {
    let k = stair.index();
    let n = t.nrows();
    if k == 0 {
        return Ok(Vec::new());
    }
    let off = stair.offsets();
    let d = stair.dynamic_dim();
    let nw = n - d;
    // z_W = Σ_r l[r] h^{(r)} with h = Uᴴ ĝ_K
    let mut l = vec![CMatrix::zeros(nw, n); k];
    for b in (1..=k).rev() {
        let (ob, sb) = (off[b], stair.block_sizes[b]);
        for i in 0..sb {
            l[0][(ob - d + i, ob + i)] = C64::new(-1.0, 0.0);
        }
        for r in 0..k - 1 {
            let mut acc = CMatrix::zeros(sb, n);
            for bp in b + 1..=k {
                let (op, sp) = (off[bp], stair.block_sizes[bp]);
                acc += t.view((ob, op), (sb, sp)) * l[r].rows(op - d, sp);
            }
            l[r + 1].rows_mut(ob - d, sb).copy_from(&acc);
        }
    }
    // y_K ∈ W_k is recovered from its staircase W-coordinates.
    let (_, wk) = chain.stable_pair()?;
    let u_w = stair.unitary.columns(d, nw);
    let gram = u_w.adjoint() * &wk.basis;
    let lift = &wk.basis * try_inverse(&gram).ok_or(Error::DecompositionUnavailable)?;
    let h_op = stair.unitary.adjoint() * p_k * m_inv;
    let g: Vec<CMatrix> = l.iter().map(|lr| &lift * lr * &h_op).collect();
    // e^{μt} (e^{−μt} f)^{(r)} = Σ_j C(r,j) (−μ)^{r−j} f^{(j)}
    let mut ops = vec![CMatrix::zeros(n, n); k];
    for (r, gr) in g.iter().enumerate() {
        let mut binom = 1.0;
        for (j, op) in ops.iter_mut().enumerate().take(r + 1) {
            *op += gr * ((-mu).powu((r - j) as u32) * binom);
            binom = binom * (r - j) as f64 / (j + 1) as f64;
        }
    }
    Ok(ops)
}

/// Consistent initial value and the size of the correction applied to the caller's `x0`.
#[derive(Debug, Clone)]
pub struct ConsistentInit {
    pub x0: CVector,
    pub correction_norm: f64,
    pub mode: InitMode,
    /// Highest derivative order of `f` used, `None` without kernel part.
    pub max_order: Option<usize>,
    /// Mild mode left out the order `k − 1` term for lack of derivatives.
    pub top_term_dropped: bool,
}

/// Keeps the `V_k` component of `x0` along `W_k` and replaces the rest by the series
/// dictated by `f` at the initial time.
pub fn consistent_initialize(
    dec: &Decoupling,
    x0: &CVector,
    f: &ForcingSignal,
    t0: f64,
    mode: InitMode,
) -> Result<ConsistentInit> {
    let n = dec.stair.unitary.nrows();
    if x0.len() != n || f.dim() != n {
        return Err(Error::DimensionMismatch(format!("x0 has length {}, forcing {}, pencil {n}", x0.len(), f.dim())));
    }
    let top = dec.kernel_order();
    let (max_order, dropped) = match (top, mode) {
        (None, _) => (None, false),
        (Some(j), InitMode::Classical) => {
            f.require_order(j)?;
            (Some(j), false)
        }
        (Some(j), InitMode::Mild) => {
            let low = j.saturating_sub(1);
            if j > 0 {
                f.require_order(low)?;
            }
            if f.available_order() >= j {
                (Some(j), false)
            } else {
                log::warn!("mild initialization drops the derivative of order {j}");
                (Some(low), j > 0)
            }
        }
    };
    let w = &dec.coords * x0;
    let xk = match max_order {
        Some(m) => dec.kernel_part(f, t0, m)?,
        None => CVector::zeros(n),
    };
    let consistent = dec.assemble(&w, xk);
    let correction_norm = (x0 - &consistent).norm();
    Ok(ConsistentInit { x0: consistent, correction_norm, mode, max_order, top_term_dropped: dropped })
}

/// `exp(h [[A_R, B F], [0, N]])` for one polynomial piece, `F` holding `m!·c_m`.
fn companion_exp(dec: &Decoupling, coeffs: &[CVector], h: f64) -> CMatrix {
    let d = dec.dynamic_dim();
    let deg = coeffs.len();
    let mut aug = CMatrix::zeros(d + deg, d + deg);
    aug.view_mut((0, 0), (d, d)).copy_from(&dec.generator);
    let mut fact = 1.0;
    for (m, c) in coeffs.iter().enumerate() {
        if m > 0 {
            fact *= m as f64;
        }
        let col = &dec.input * c * C64::new(fact, 0.0);
        aug.view_mut((0, d + m), (d, 1)).copy_from(&col);
        if m > 0 {
            aug[(d + m, d + m - 1)] = C64::new(1.0, 0.0);
        }
    }
    expm(&(aug * C64::new(h, 0.0)))
}

/// Exact stepping of `w' = A_R w + B f` for piecewise polynomial `f`.
fn step_polynomial(
    dec: &Decoupling,
    poly: &super::forcing::PiecewisePolynomial,
    times: &[f64],
    w0: CVector,
) -> Vec<CVector> {
    let d = dec.dynamic_dim();
    let mut cache: HashMap<(usize, u64), CMatrix> = HashMap::new();
    let mut out = Vec::with_capacity(times.len());
    let mut w = w0;
    out.push(w.clone());
    for win in times.windows(2) {
        let (a, b) = (win[0], win[1]);
        // sub-intervals split at interior breakpoints
        let mut cuts = vec![a];
        cuts.extend(poly.breakpoints.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        for seg in cuts.windows(2) {
            let (s0, s1) = (seg[0], seg[1]);
            let piece = poly.piece_index(s0);
            let coeffs = &poly.pieces[piece];
            let h = s1 - s0;
            let expo = cache
                .entry((piece, h.to_bits()))
                .or_insert_with(|| companion_exp(dec, coeffs, h));
            let mut state = CVector::zeros(d + coeffs.len());
            state.rows_mut(0, d).copy_from(&w);
            let tau = s0 - poly.breakpoints[piece];
            let mut xi = 1.0;
            for m in 0..coeffs.len() {
                if m > 0 {
                    xi *= tau / m as f64;
                }
                state[d + m] = C64::new(xi, 0.0);
            }
            w = (&*expo * state).rows(0, d).into_owned();
        }
        out.push(w.clone());
    }
    out
}

/// Gauss–Legendre variation of constants on a uniform grid.
fn step_quadrature(dec: &Decoupling, f: &ForcingSignal, times: &[f64], h: f64, w0: CVector) -> Vec<CVector> {
    let gen = &dec.generator;
    let full = expm(&(gen * C64::new(h, 0.0)));
    let rule: Vec<(f64, f64, CMatrix)> = gauss_legendre(0.0, h, GL_POINTS, 1)
        .into_iter()
        .map(|(s, wt)| (s, wt, expm(&(gen * C64::new(h - s, 0.0))) * &dec.input * C64::new(wt, 0.0)))
        .collect();
    let mut out = Vec::with_capacity(times.len());
    let mut w = w0;
    out.push(w.clone());
    for &t in &times[..times.len() - 1] {
        let mut next = &full * &w;
        for (s, _, op) in &rule {
            next += op * f.value(t + s);
        }
        w = next;
        out.push(w.clone());
    }
    out
}

/// Solves `d/dt Ex = Ax + f` on a uniform grid. `x0` is corrected to the consistent value.
pub fn solve_decoupled(
    p: &MatrixPencil,
    x0: &CVector,
    f: &ForcingSignal,
    t_grid: &[f64],
    mu: Option<C64>,
) -> Result<SolveReport> {
    let h = check_grid(t_grid)?;
    let mu = mu.unwrap_or_else(|| auto_mu(p));
    let dec = Decoupling::new(p, mu)?;
    solve_with(p, &dec, x0, f, t_grid, h)
}

/// [`solve_decoupled`] with a prepared decoupling, for repeated solves on one pencil.
pub fn solve_with(
    p: &MatrixPencil,
    dec: &Decoupling,
    x0: &CVector,
    f: &ForcingSignal,
    t_grid: &[f64],
    h: f64,
) -> Result<SolveReport> {
    let k = dec.index();
    // classical solutions need f_K ∈ C^k
    if k > 0 {
        f.require_order(k)?;
    }
    let mut notes = Vec::new();
    if !f.is_exact() && k > 0 {
        log::warn!("kernel part uses difference-stencil derivatives of the {} forcing", f.kind());
        notes.push(format!("{} forcing: derivatives by fourth-order differences", f.kind()));
    }
    let init = consistent_initialize(dec, x0, f, t_grid[0], InitMode::Classical)?;
    let w0 = &dec.coords * &init.x0;
    let ws = if dec.dynamic_dim() == 0 {
        vec![CVector::zeros(0); t_grid.len()]
    } else {
        match f {
            ForcingSignal::PiecewisePolynomial(poly) => step_polynomial(dec, poly, t_grid, w0),
            _ => {
                notes.push("range part by Gauss-Legendre quadrature".into());
                step_quadrature(dec, f, t_grid, h, w0)
            }
        }
    };
    let n = x0.len();
    let mut states = CMatrix::zeros(n, t_grid.len());
    for (i, (&t, w)) in t_grid.iter().zip(&ws).enumerate() {
        let xk = match dec.kernel_order() {
            Some(m) => dec.kernel_part(f, t, m)?,
            None => CVector::zeros(n),
        };
        states.set_column(i, &dec.assemble(w, xk));
    }
    let mut report = SolveReport {
        times: t_grid.to_vec(),
        states,
        consistent_x0: init.x0,
        correction_norm: init.correction_norm,
        classical_residual: f64::NAN,
        mild_residual: f64::NAN,
        mu: Some(dec.mu),
        index: Some(k),
        block_sizes: dec.stair.block_sizes.clone(),
        method: SolveMethod::Decoupled,
        notes,
    };
    let (c, m) = residuals(p, &report, f)?;
    report.classical_residual = c;
    report.mild_residual = m;
    Ok(report)
}

/// Homogeneous solve `x(t) = T_R(t) x0` with `x0` projected onto `V_k` along `W_k`.
pub fn solve_homogeneous(p: &MatrixPencil, x0: &CVector, t_grid: &[f64], mu: Option<C64>) -> Result<SolveReport> {
    check_grid(t_grid)?;
    let n = p.n();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!("x0 has length {}, pencil {n}", x0.len())));
    }
    let mu = mu.unwrap_or_else(|| auto_mu(p));
    let chain = build_chain(p, mu, Side::Right, None)?;
    let sg = DegenerateSemigroup::from_chain(p, &chain)?;
    let proj = sg.projector(Complement::Kernel)?;
    let start = &proj * x0;
    let states = sg.trajectory(x0, t_grid, Complement::Kernel)?;
    let stair = build_staircase(p, mu, Side::Right)?;
    let zero = ForcingSignal::zero(n);
    let mut report = SolveReport {
        times: t_grid.to_vec(),
        states,
        correction_norm: (x0 - &start).norm(),
        consistent_x0: start,
        classical_residual: f64::NAN,
        mild_residual: f64::NAN,
        mu: Some(mu),
        index: Some(stair.index()),
        block_sizes: stair.block_sizes.clone(),
        method: SolveMethod::Homogeneous,
        notes: Vec::new(),
    };
    let (c, m) = residuals(p, &report, &zero)?;
    report.classical_residual = c;
    report.mild_residual = m;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{from_real_rows, identity, re, real_diag};
    use crate::solver::forcing::PiecewisePolynomial;
    use crate::solver::uniform_grid;

    fn v(x: &[f64]) -> CVector {
        CVector::from_iterator(x.len(), x.iter().map(|&r| re(r)))
    }

    fn linear_forcing(dim: usize, slope: &[f64]) -> ForcingSignal {
        let p = PiecewisePolynomial::polynomial(0.0, 10.0, vec![CVector::zeros(dim), v(slope)]).unwrap();
        ForcingSignal::PiecewisePolynomial(p)
    }

    fn n2() -> MatrixPencil {
        MatrixPencil::new(from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), identity(2)).unwrap()
    }

    #[test]
    fn nilpotent_closed_form() {
        let p = n2();
        let t = uniform_grid(0.0, 1.0, 20);
        let r = solve_decoupled(&p, &v(&[0.0, 0.0]), &linear_forcing(2, &[0.0, 1.0]), &t, None).unwrap();
        for (i, &ti) in t.iter().enumerate() {
            assert!((r.states[(0, i)] - re(-1.0)).norm() < 1e-12);
            assert!((r.states[(1, i)] - re(-ti)).norm() < 1e-12);
        }
        assert!(r.classical_residual < 1e-10);
        assert_eq!(r.index, Some(2));
        assert!((r.correction_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn semi_explicit_index_two() {
        let e = from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let a = from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let p = MatrixPencil::new(e, a).unwrap();
        let f = linear_forcing(2, &[0.0, 1.0]);
        let t = uniform_grid(0.0, 2.0, 16);
        for mu in [None, Some(re(0.7)), Some(re(-1.3))] {
            let r = solve_decoupled(&p, &v(&[3.0, 3.0]), &f, &t, mu).unwrap();
            for (i, &ti) in t.iter().enumerate() {
                assert!((r.states[(0, i)] - re(-ti)).norm() < 1e-11);
                assert!((r.states[(1, i)] - re(1.0)).norm() < 1e-11);
            }
            assert!((r.consistent_x0[1] - re(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_decay() {
        let p = MatrixPencil::new(real_diag(&[1.0, 0.0]), real_diag(&[-1.0, 1.0])).unwrap();
        let t = uniform_grid(0.0, 5.0, 50);
        let r = solve_decoupled(&p, &v(&[1.0, 5.0]), &ForcingSignal::zero(2), &t, None).unwrap();
        assert!((r.correction_norm - 5.0).abs() < 1e-12);
        for (i, &ti) in t.iter().enumerate() {
            assert!((r.states[(0, i)] - re((-ti).exp())).norm() < 1e-12);
            assert!(r.states[(1, i)].norm() < 1e-12);
        }
        let hm = solve_homogeneous(&p, &v(&[1.0, 5.0]), &t, None).unwrap();
        assert!((hm.states - r.states).norm() < 1e-12);
        assert!((hm.correction_norm - 5.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_pure_ode_and_nilpotent() {
        let p = MatrixPencil::new(identity(2), real_diag(&[-1.0, -2.0])).unwrap();
        let t = uniform_grid(0.0, 1.0, 10);
        let r = solve_homogeneous(&p, &v(&[1.0, 1.0]), &t, None).unwrap();
        let last = t.len() - 1;
        assert!((r.states[(1, last)] - re((-2.0f64).exp())).norm() < 1e-12);
        let z = solve_homogeneous(&n2(), &v(&[3.0, 4.0]), &t, None).unwrap();
        assert!(z.states.norm() < 1e-14);
        assert!((z.correction_norm - 5.0).abs() < 1e-12);
    }

    #[test]
    fn split_diagonal_example() {
        let p = MatrixPencil::new(real_diag(&[1.0, 0.0]), real_diag(&[-1.0, 1.0])).unwrap();
        let chain = build_chain(&p, re(0.0), Side::Right, None).unwrap();
        let f = ForcingSignal::PiecewisePolynomial(PiecewisePolynomial::polynomial(0.0, 1.0, vec![v(&[2.0, 3.0])]).unwrap());
        let (fr, fk) = split_forcing(&p, &chain, &f).unwrap();
        assert!((fr.value(0.5) - v(&[-2.0, 0.0])).norm() < 1e-14);
        assert!((fk.value(0.5) - v(&[0.0, 3.0])).norm() < 1e-14);
        let (zr, zk) = split_forcing(&p, &chain, &ForcingSignal::zero(2)).unwrap();
        assert_eq!(zr.value(0.3).norm() + zk.value(0.3).norm(), 0.0);
    }

    #[test]
    fn kernel_operators_match_power_series() {
        // y_K = −Σ R^i ĝ_K^{(i)} for a transformed nilpotent block of size 3
        let spec = crate::models::WeierstrassSpec {
            ode_eigenvalues: vec![re(-1.0)],
            nilpotent_block_sizes: vec![3],
            transform_seed: 5,
        };
        let (p, _) = crate::models::weierstrass_pencil(&spec).unwrap();
        let mu = re(0.4);
        let dec = Decoupling::new(&p, mu).unwrap();
        assert_eq!(dec.index(), 3);
        let coeffs = vec![v(&[0.3, -1.0, 0.5, 2.0]), v(&[1.0, 0.0, -0.5, 0.2]), v(&[0.0, 0.7, 0.1, -0.4])];
        let f = ForcingSignal::PiecewisePolynomial(PiecewisePolynomial::polynomial(0.0, 1.0, coeffs).unwrap());
        let (_, fk) = split_forcing(&p, &dec.chain, &f).unwrap();
        let t = 0.37;
        let mut y = CVector::zeros(4);
        let mut rp = identity(4);
        for i in 0..3 {
            y -= &rp * fk.derivative(t, i).unwrap();
            rp = &rp * &dec.chain.r_mu;
        }
        let x = dec.kernel_part(&f, t, 2).unwrap() * (-mu * t).exp();
        assert!((&x - &y).norm() < 1e-10 * (1.0 + y.norm()));
    }

    #[test]
    fn smoothness_gate() {
        let spec = crate::models::WeierstrassSpec {
            ode_eigenvalues: vec![re(-1.0)],
            nilpotent_block_sizes: vec![3],
            transform_seed: 2,
        };
        let (p, _) = crate::models::weierstrass_pencil(&spec).unwrap();
        let f = ForcingSignal::callable(4, |t| v(&[t.sin(), 0.0, 1.0, t]));
        let t = uniform_grid(0.0, 1.0, 10);
        let err = solve_decoupled(&p, &CVector::zeros(4), &f, &t, None).unwrap_err();
        assert!(matches!(err, Error::InsufficientSmoothness { needed: 3, available: 2 }));
    }

    #[test]
    fn mild_init_drops_top_term() {
        let spec = crate::models::WeierstrassSpec {
            ode_eigenvalues: vec![],
            nilpotent_block_sizes: vec![4],
            transform_seed: 9,
        };
        let (p, _) = crate::models::weierstrass_pencil(&spec).unwrap();
        let dec = Decoupling::new(&p, re(0.0)).unwrap();
        let f = ForcingSignal::callable(4, |t| v(&[t, t * t, 1.0, 0.0]));
        let x0 = CVector::zeros(4);
        assert!(consistent_initialize(&dec, &x0, &f, 0.0, InitMode::Classical).is_err());
        let mild = consistent_initialize(&dec, &x0, &f, 0.0, InitMode::Mild).unwrap();
        assert!(mild.top_term_dropped);
        assert_eq!(mild.max_order, Some(2));
    }

    #[test]
    fn quadrature_path_matches_exact_path() {
        let spec = crate::models::WeierstrassSpec {
            ode_eigenvalues: vec![re(-1.0), C64::new(-0.5, 2.0)],
            nilpotent_block_sizes: vec![2],
            transform_seed: 11,
        };
        let (p, _) = crate::models::weierstrass_pencil(&spec).unwrap();
        let coeffs = vec![v(&[1.0, 0.0, -1.0, 0.5]), v(&[0.0, 2.0, 0.5, 0.0]), v(&[0.3, 0.0, 0.0, -1.0])];
        let poly = PiecewisePolynomial::polynomial(0.0, 2.0, coeffs.clone()).unwrap();
        let exact = ForcingSignal::PiecewisePolynomial(poly.clone());
        let call = ForcingSignal::callable(4, move |t| poly.derivative(t, 0));
        let t = uniform_grid(0.0, 2.0, 40);
        let x0 = v(&[1.0, 1.0, 0.0, 0.0]);
        let a = solve_decoupled(&p, &x0, &exact, &t, None).unwrap();
        let b = solve_decoupled(&p, &x0, &call, &t, None).unwrap();
        let dev = (&a.states - &b.states).camax();
        assert!(dev < 1e-6, "{dev}");
        let fine = solve_decoupled(&p, &x0, &exact, &uniform_grid(0.0, 2.0, 1000), None).unwrap();
        assert!(fine.classical_residual < 1e-8, "{}", fine.classical_residual);
    }

    #[test]
    fn breakpoints_inside_steps() {
        // step input u = 1 on [0.35, ∞) for x' = −x
        let p = MatrixPencil::new(identity(1), real_diag(&[-1.0])).unwrap();
        let poly = PiecewisePolynomial::new(vec![0.0, 0.35, 10.0], vec![vec![v(&[0.0])], vec![v(&[1.0])]], 1).unwrap();
        let t = uniform_grid(0.0, 1.0, 10);
        let r = solve_decoupled(&p, &v(&[0.0]), &ForcingSignal::PiecewisePolynomial(poly), &t, None).unwrap();
        let exact = 1.0 - (-(1.0 - 0.35f64)).exp();
        assert!((r.states[(0, 10)] - re(exact)).norm() < 1e-13);
    }
}
