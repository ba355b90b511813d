//! Right-hand sides `f(t)` with derivative accessors.

use crate::numerics::{CMatrix, CVector, C64};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Highest derivative order the difference-stencil signals support.
pub const STENCIL_MAX_ORDER: usize = 2;

/// Piecewise polynomial `f(t) = Σ_m c_m (t − b_p)^m` on `[b_p, b_{p+1})`.
///
/// Evaluation is right-continuous at breakpoints; outside `[b_0, b_last]` the first or
/// last piece is extrapolated.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    pub dim: usize,
    pub breakpoints: Vec<f64>,
    /// `pieces[p][m]` is the coefficient of `(t − b_p)^m`.
    pub pieces: Vec<Vec<CVector>>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<CVector>>, dim: usize) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints do not bound {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("breakpoints must be finite and strictly increasing".into()));
        }
        for piece in &pieces {
            if piece.iter().any(|c| c.len() != dim) {
                return Err(Error::DimensionMismatch(format!("coefficient length differs from {dim}")));
            }
            if piece.iter().any(|c| c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { dim, breakpoints, pieces })
    }

    /// A single polynomial on `[t0, t1]`, coefficients in powers of `t − t0`.
    pub fn polynomial(t0: f64, t1: f64, coeffs: Vec<CVector>) -> Result<Self> {
        let dim = coeffs.first().map_or(0, |c| c.len());
        Self::new(vec![t0, t1], vec![coeffs], dim)
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, breakpoints: vec![0.0, 1.0], pieces: vec![vec![CVector::zeros(dim)]] }
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn piece_index(&self, t: f64) -> usize {
        let inner = &self.breakpoints[1..self.breakpoints.len() - 1];
        inner.partition_point(|&b| b <= t)
    }

    pub fn derivative(&self, t: f64, order: usize) -> CVector {
        let p = self.piece_index(t);
        let tau = t - self.breakpoints[p];
        let mut out = CVector::zeros(self.dim);
        // Horner on the differentiated coefficients
        for (m, c) in self.pieces[p].iter().enumerate().rev() {
            if m < order {
                break;
            }
            out *= C64::new(tau, 0.0);
            out += c * C64::new(falling(m, order), 0.0);
        }
        out
    }
}

/// `m (m−1) … (m−r+1)`.
fn falling(m: usize, r: usize) -> f64 {
    (0..r).map(|i| (m - i) as f64).product()
}

/// Uniformly sampled signal. Values and derivatives between and at the samples come from
/// local polynomial stencils on the `order + 4` nearest samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<CVector>,
}

impl SampledSignal {
    pub fn new(t0: f64, dt: f64, values: Vec<CVector>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t0.is_finite()) {
            return Err(Error::InvalidInput("sample spacing must be positive".into()));
        }
        if values.len() < STENCIL_MAX_ORDER + 4 {
            return Err(Error::GridTooCoarse(format!(
                "{} samples, stencils need {}",
                values.len(),
                STENCIL_MAX_ORDER + 4
            )));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch("samples of different length".into()));
        }
        Ok(Self { t0, dt, values })
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn derivative(&self, t: f64, order: usize) -> CVector {
        let n = self.values.len();
        let width = order + 4;
        let x = (t - self.t0) / self.dt;
        let start = ((x - (width as f64 - 1.0) / 2.0).round().max(0.0) as usize).min(n - width);
        let nodes: Vec<f64> = (start..start + width).map(|i| i as f64).collect();
        let w = fornberg(x, &nodes, order);
        let scale = self.dt.powi(order as i32);
        let mut out = CVector::zeros(self.dim());
        for (j, wj) in w.iter().enumerate() {
            out.axpy(C64::new(wj / scale, 0.0), &self.values[start + j], C64::new(1.0, 0.0));
        }
        out
    }
}

/// Finite-difference weights for the `order`-th derivative at `z` (Fornberg's recursion).
pub(crate) fn fornberg(z: f64, x: &[f64], order: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

pub type SignalFn = dyn Fn(f64) -> CVector + Send + Sync;

/// Closure-backed signal; derivatives by centered five-point differences with step `h`.
/// The closure may be evaluated up to `2h` outside the solve interval.
#[derive(Clone)]
pub struct CallableSignal {
    pub dim: usize,
    pub h: f64,
    pub func: Arc<SignalFn>,
}

impl fmt::Debug for CallableSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CallableSignal").field("dim", &self.dim).field("h", &self.h).finish_non_exhaustive()
    }
}

impl CallableSignal {
    fn derivative(&self, t: f64, order: usize) -> CVector {
        if order == 0 {
            return (self.func)(t);
        }
        let h = self.h * (1.0 + t.abs()).min(1e3);
        let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg(0.0, &nodes, order);
        let mut out = CVector::zeros(self.dim);
        for (s, wj) in nodes.iter().zip(&w) {
            if *wj != 0.0 {
                out.axpy(C64::new(wj / h.powi(order as i32), 0.0), &(self.func)(t + s * h), C64::new(1.0, 0.0));
            }
        }
        out
    }
}

/// `e^{−decay·t} · map · inner(t)`.
#[derive(Debug, Clone)]
pub struct MappedSignal {
    pub map: CMatrix,
    pub decay: C64,
    pub inner: ForcingSignal,
}

#[derive(Debug, Clone)]
pub enum ForcingSignal {
    PiecewisePolynomial(PiecewisePolynomial),
    Sampled(SampledSignal),
    Callable(CallableSignal),
    Mapped(Box<MappedSignal>),
}

impl ForcingSignal {
    pub fn zero(dim: usize) -> Self {
        Self::PiecewisePolynomial(PiecewisePolynomial::zero(dim))
    }

    pub fn callable(dim: usize, f: impl Fn(f64) -> CVector + Send + Sync + 'static) -> Self {
        Self::Callable(CallableSignal { dim, h: 2e-3, func: Arc::new(f) })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::PiecewisePolynomial(p) => p.dim,
            Self::Sampled(s) => s.dim(),
            Self::Callable(c) => c.dim,
            Self::Mapped(m) => m.map.nrows(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::PiecewisePolynomial(_) => "piecewise-polynomial",
            Self::Sampled(_) => "sampled",
            Self::Callable(_) => "callable",
            Self::Mapped(m) => m.inner.kind(),
        }
    }

    /// Highest derivative order the signal can deliver.
    pub fn available_order(&self) -> usize {
        match self {
            Self::PiecewisePolynomial(_) => usize::MAX,
            Self::Sampled(_) | Self::Callable(_) => STENCIL_MAX_ORDER,
            Self::Mapped(m) => m.inner.available_order(),
        }
    }

    pub fn require_order(&self, needed: usize) -> Result<()> {
        let available = self.available_order();
        if needed > available {
            return Err(Error::InsufficientSmoothness { needed, available });
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.available_order() == usize::MAX
    }

    pub fn value(&self, t: f64) -> CVector {
        self.derivative_unchecked(t, 0)
    }

    pub fn derivative(&self, t: f64, order: usize) -> Result<CVector> {
        self.require_order(order)?;
        Ok(self.derivative_unchecked(t, order))
    }

    fn derivative_unchecked(&self, t: f64, order: usize) -> CVector {
        match self {
            Self::PiecewisePolynomial(p) => p.derivative(t, order),
            Self::Sampled(s) => s.derivative(t, order),
            Self::Callable(c) => c.derivative(t, order),
            Self::Mapped(m) => {
                // Leibniz rule with (e^{−dt})^{(i)} = (−d)^i e^{−dt}
                let mut acc = CVector::zeros(m.inner.dim());
                let mut binom = 1.0;
                for j in (0..=order).rev() {
                    let i = order - j;
                    acc += m.inner.derivative_unchecked(t, j) * ((-m.decay).powu(i as u32) * binom);
                    binom = binom * (order - i) as f64 / (i + 1) as f64;
                }
                &m.map * acc * (-m.decay * t).exp()
            }
        }
    }
}

/// JSON form of a forcing signal.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingJson {
    /// Each piece lists coefficient vectors of `(t − b_p)^m`, `m = 0, 1, …`.
    Polynomial {
        breakpoints: Vec<f64>,
        coeffs_re: Vec<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeffs_im: Option<Vec<Vec<Vec<f64>>>>,
    },
    Sampled {
        t0: f64,
        dt: f64,
        values_re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values_im: Option<Vec<Vec<f64>>>,
    },
}

fn complex_vec(re: &[f64], im: Option<&Vec<f64>>) -> Result<CVector> {
    if let Some(im) = im {
        if im.len() != re.len() {
            return Err(Error::DimensionMismatch("real and imaginary parts differ in length".into()));
        }
    }
    Ok(CVector::from_iterator(
        re.len(),
        re.iter().enumerate().map(|(i, &r)| C64::new(r, im.map_or(0.0, |v| v[i]))),
    ))
}

impl ForcingJson {
    pub fn to_signal(&self, dim: usize) -> Result<ForcingSignal> {
        match self {
            Self::Polynomial { breakpoints, coeffs_re, coeffs_im } => {
                let mut pieces = Vec::with_capacity(coeffs_re.len());
                for (p, piece) in coeffs_re.iter().enumerate() {
                    let im = coeffs_im.as_ref().and_then(|c| c.get(p));
                    let mut cs = Vec::with_capacity(piece.len());
                    for (m, re) in piece.iter().enumerate() {
                        cs.push(complex_vec(re, im.and_then(|c| c.get(m)))?);
                    }
                    if cs.is_empty() {
                        cs.push(CVector::zeros(dim));
                    }
                    pieces.push(cs);
                }
                Ok(ForcingSignal::PiecewisePolynomial(PiecewisePolynomial::new(breakpoints.clone(), pieces, dim)?))
            }
            Self::Sampled { t0, dt, values_re, values_im } => {
                let vals = values_re
                    .iter()
                    .enumerate()
                    .map(|(i, re)| complex_vec(re, values_im.as_ref().and_then(|v| v.get(i))))
                    .collect::<Result<Vec<_>>>()?;
                let s = SampledSignal::new(*t0, *dt, vals)?;
                if s.dim() != dim {
                    return Err(Error::DimensionMismatch(format!("forcing has length {}, pencil {dim}", s.dim())));
                }
                Ok(ForcingSignal::Sampled(s))
            }
        }
    }
}
