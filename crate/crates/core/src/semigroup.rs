//! The degenerate semigroup `T_R(t) = Q e^{tA_R} Qᴴ` generated on the stabilized range
//! `V_k` and vanishing on a complement.

use crate::chain::{build_chain, check_decomposition, restricted_generator, RestrictedGenerator, SubspaceChain};
use crate::numerics::{eigenvalues, expm, gauss_legendre, norm2, try_inverse, CMatrix, CVector, C64};
use crate::pencil::{MatrixPencil, Side};
use crate::{Error, Result};

/// Complement of `V_k` on which the semigroup vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Complement {
    /// `V_k^⊥`.
    Orthogonal,
    /// `W_k = ker R(μ)^k`.
    Kernel,
}

#[derive(Debug, Clone)]
pub struct DegenerateSemigroup {
    pub gen: RestrictedGenerator,
    pub side: Side,
    /// Orthogonal projector onto `V_k`.
    pub proj_v: CMatrix,
    pub complement_dim: usize,
    /// Rows of `[Q | W]⁻¹` giving `V_k` coordinates along `W_k`.
    along_kernel: Option<CMatrix>,
}

impl DegenerateSemigroup {
    pub fn new(p: &MatrixPencil, mu: C64, side: Side) -> Result<Self> {
        let chain = build_chain(p, mu, side, None)?;
        Self::from_chain(p, &chain)
    }

    pub fn from_chain(p: &MatrixPencil, chain: &SubspaceChain) -> Result<Self> {
        let gen = restricted_generator(p, chain)?;
        let n = chain.ambient_dim();
        let q = &gen.basis.basis;
        let d = q.ncols();
        let proj_v = q * q.adjoint();
        let (_, wk) = chain.stable_pair()?;
        let along_kernel = if check_decomposition(chain, p.pol.subspace_tol)?.holds {
            let mut m = CMatrix::zeros(n, n);
            m.view_mut((0, 0), (n, d)).copy_from(q);
            m.view_mut((0, d), (n, n - d)).copy_from(&wk.basis);
            try_inverse(&m).map(|mi| mi.rows(0, d).into_owned())
        } else {
            None
        };
        Ok(Self { gen, side: chain.side, proj_v, complement_dim: n - d, along_kernel })
    }

    pub fn dim(&self) -> usize {
        self.gen.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.proj_v.nrows()
    }

    /// `T_R(t)` vanishing on `V_k^⊥`.
    pub fn evaluate(&self, t: f64) -> Result<CMatrix> {
        self.evaluate_with(t, Complement::Orthogonal)
    }

    pub fn evaluate_with(&self, t: f64, complement: Complement) -> Result<CMatrix> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("semigroup time must be finite and nonnegative, got {t}")));
        }
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Ok(CMatrix::zeros(n, n));
        }
        let q = &self.gen.basis.basis;
        let et = expm(&(&self.gen.matrix * C64::new(t, 0.0)));
        let coords = match complement {
            Complement::Orthogonal => q.adjoint(),
            Complement::Kernel => self.along_kernel.clone().ok_or(Error::DecompositionUnavailable)?,
        };
        Ok(q * et * coords)
    }

    /// States `T_R(t_i − t_0) x0` as columns, propagating `V_k` coordinates step by step.
    pub fn trajectory(&self, x0: &CVector, times: &[f64], complement: Complement) -> Result<CMatrix> {
        let n = self.ambient_dim();
        let mut out = CMatrix::zeros(n, times.len());
        if self.dim() == 0 || times.is_empty() {
            return Ok(out);
        }
        let q = &self.gen.basis.basis;
        let mut w = match complement {
            Complement::Orthogonal => q.adjoint() * x0,
            Complement::Kernel => self.along_kernel.as_ref().ok_or(Error::DecompositionUnavailable)? * x0,
        };
        out.set_column(0, &(q * &w));
        let mut step: Option<(f64, CMatrix)> = None;
        for i in 1..times.len() {
            let h = times[i] - times[i - 1];
            if !(h >= 0.0 && h.is_finite()) {
                return Err(Error::InvalidInput("trajectory times must be nondecreasing".into()));
            }
            let reuse = step.as_ref().is_some_and(|(hp, _)| (h - hp).abs() <= 1e-12 * hp.abs());
            if !reuse {
                step = Some((h, expm(&(&self.gen.matrix * C64::new(h, 0.0)))));
            }
            w = &step.as_ref().expect("step set above").1 * &w;
            out.set_column(i, &(q * &w));
        }
        Ok(out)
    }

    /// Projector onto `V_k` along the chosen complement.
    pub fn projector(&self, complement: Complement) -> Result<CMatrix> {
        self.evaluate_with(0.0, complement)
    }

    /// Least-squares fit `log‖T_R(t)‖ ≈ log M̂ + ω̂ t` on `samples + 1` equispaced points of
    /// `[0, horizon]`. The zero semigroup gives `(−∞, 0)`.
    pub fn omega_stability_estimate(&self, horizon: f64, samples: usize) -> Result<(f64, f64)> {
        if !(horizon > 0.0 && horizon.is_finite()) || samples == 0 {
            return Err(Error::InvalidInput("need a positive horizon and at least one sample".into()));
        }
        if self.dim() == 0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        let mut pts = Vec::with_capacity(samples + 1);
        for i in 0..=samples {
            let t = horizon * i as f64 / samples as f64;
            let nrm = norm2(&self.evaluate(t)?);
            if nrm > 0.0 && nrm.is_finite() {
                pts.push((t, nrm.ln()));
            }
        }
        if pts.len() < 2 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let stl: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
        let omega = stl / stt;
        Ok((omega, (ml - omega * mt).exp()))
    }

    /// Spectral abscissa of `A_R`.
    pub fn spectral_abscissa(&self) -> f64 {
        if self.dim() == 0 {
            return f64::NEG_INFINITY;
        }
        eigenvalues(&self.gen.matrix).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gauss–Legendre approximation of `∫₀^H e^{−λt} T_R(t) dt`, compared with
    /// `(λ − A_R)⁻¹ P_V = −R(λ) P_V`. Returns the spectral-norm difference.
    ///
    /// Without an explicit horizon `H` is chosen so that the tail bound
    /// `M̂ e^{(ω − Re λ)H}` is below `1e-10`.
    pub fn laplace_consistency(
        &self,
        p: &MatrixPencil,
        lambda: C64,
        horizon: Option<f64>,
        quad_points: usize,
    ) -> Result<f64> {
        let n = self.ambient_dim();
        let target = -p.pseudo_resolvent(lambda, self.side)? * &self.proj_v;
        if self.dim() == 0 {
            return Ok(norm2(&target));
        }
        let (fit_omega, m_hat) = self.omega_stability_estimate(10.0, 100)?;
        let omega = fit_omega.max(self.spectral_abscissa());
        let gap = lambda.re - omega;
        if gap <= 0.0 {
            return Err(Error::InvalidInput(format!("Re λ = {} does not exceed the growth bound {omega}", lambda.re)));
        }
        let m_hat = m_hat.max(1.0);
        let h = horizon.unwrap_or_else(|| ((m_hat.ln() + 1e10f64.ln()) / gap) * 1.05);
        let tail = m_hat * (-gap * h).exp();
        if tail >= 1e-10 {
            return Err(Error::HorizonTooShort(h));
        }
        let d = self.dim();
        let shifted = &self.gen.matrix - CMatrix::identity(d, d) * lambda;
        let panels = ((h * norm2(&shifted)) / 20.0).ceil().clamp(1.0, 256.0) as usize;
        let mut acc = CMatrix::zeros(d, d);
        for (t, w) in gauss_legendre(0.0, h, quad_points, panels) {
            acc += expm(&(&shifted * C64::new(t, 0.0))) * C64::new(w, 0.0);
        }
        let q = &self.gen.basis.basis;
        let quad = q * acc * q.adjoint();
        debug_assert_eq!(quad.nrows(), n);
        Ok(norm2(&(quad - target)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{from_real_rows, identity, re, real_diag};

    #[test]
    fn diagonal_decay() {
        let p = MatrixPencil::new(real_diag(&[1.0, 0.0]), real_diag(&[-1.0, 1.0])).unwrap();
        let s = DegenerateSemigroup::new(&p, re(0.0), Side::Right).unwrap();
        for t in [0.0, 0.5, 2.0] {
            let tt = s.evaluate(t).unwrap();
            assert!((tt - real_diag(&[(-t).exp(), 0.0])).norm() < 1e-13);
        }
        let (w, m) = s.omega_stability_estimate(5.0, 50).unwrap();
        assert!((w + 1.0).abs() < 1e-10 && (m - 1.0).abs() < 1e-10);
        let r = s.laplace_consistency(&p, re(1.0), None, 64).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn empty_dynamic_part() {
        let e = from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let a = from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let p = MatrixPencil::new(e, a).unwrap();
        let s = DegenerateSemigroup::new(&p, re(0.0), Side::Left).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.evaluate(3.0).unwrap().norm(), 0.0);
        assert_eq!(s.omega_stability_estimate(1.0, 10).unwrap().0, f64::NEG_INFINITY);
        assert_eq!(s.laplace_consistency(&p, re(1.0), None, 64).unwrap(), 0.0);
    }

    #[test]
    fn ode_laplace() {
        let p = MatrixPencil::new(identity(2), real_diag(&[-1.0, -2.0])).unwrap();
        let s = DegenerateSemigroup::new(&p, re(0.0), Side::Left).unwrap();
        assert!(s.laplace_consistency(&p, re(1.0), None, 64).unwrap() < 1e-8);
        assert!(matches!(s.laplace_consistency(&p, re(1.0), Some(1.0), 64), Err(Error::HorizonTooShort(_))));
    }

    #[test]
    fn zero_generator() {
        let p = MatrixPencil::new(identity(1), CMatrix::zeros(1, 1)).unwrap();
        let s = DegenerateSemigroup::new(&p, re(1.0), Side::Left).unwrap();
        let (w, m) = s.omega_stability_estimate(3.0, 30).unwrap();
        assert!(w.abs() < 1e-12 && (m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_complement_projector() {
        let e = from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let a = from_real_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        let p = MatrixPencil::new(e, a).unwrap();
        let s = DegenerateSemigroup::new(&p, re(0.0), Side::Right).unwrap();
        let pk = s.projector(Complement::Kernel).unwrap();
        assert!((&pk * &pk - &pk).norm() < 1e-13);
        let po = s.projector(Complement::Orthogonal).unwrap();
        assert!((&pk * &po - &po).norm() < 1e-13);
        assert!(s.evaluate(-1.0).is_err());
    }

    #[test]
    fn trajectory_matches_pointwise() {
        let p = MatrixPencil::new(real_diag(&[1.0, 1.0, 0.0]), real_diag(&[-1.0, -3.0, 1.0])).unwrap();
        let sg = DegenerateSemigroup::new(&p, C64::new(1.0, 0.0), Side::Right).unwrap();
        let x0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.5), C64::new(3.0, 0.0)]);
        let times = [0.0, 0.1, 0.2, 0.3, 0.5];
        let traj = sg.trajectory(&x0, &times, Complement::Kernel).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let want = sg.evaluate_with(t, Complement::Kernel).unwrap() * &x0;
            assert!((traj.column(i) - want).norm() < 1e-13);
        }
    }
}
