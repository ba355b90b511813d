use super::forcing::ForcingSignal;
use super::{check_grid, SolveReport};
use crate::numerics::{CVector, C64};
use crate::pencil::MatrixPencil;
use crate::{Error, Result};

/// Classical and mild residuals of a trajectory, each relative to
/// `1 + ‖E‖‖x‖∞ + ‖A‖‖x‖∞ + ‖f‖∞`.
///
/// Classical: `‖D_h(Ex) − Ax − f‖` at interior points with the five-point central
/// difference. Mild: `‖Ex(t) − Ex(t₀) − A∫x − ∫f‖` with fourth-order cumulative sums
/// (cubic interpolation on each step, one-sided at both ends).
pub fn residuals(p: &MatrixPencil, report: &SolveReport, f: &ForcingSignal) -> Result<(f64, f64)> {
    let t = &report.times;
    let h = check_grid(t)?;
    let n = p.n();
    if report.states.nrows() != n || report.states.ncols() != t.len() || f.dim() != n {
        return Err(Error::DimensionMismatch("trajectory, forcing and pencil disagree".into()));
    }
    let xs: Vec<CVector> = (0..t.len()).map(|i| report.state(i)).collect();
    let fs: Vec<CVector> = t.iter().map(|&ti| f.value(ti)).collect();
    let ex: Vec<CVector> = xs.iter().map(|x| &p.e * x).collect();
    let ax: Vec<CVector> = xs.iter().map(|x| &p.a * x).collect();
    let xmax = xs.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let fmax = fs.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let scale = 1.0 + (p.norm_e() + p.norm_a()) * xmax + fmax;

    let c = C64::new(1.0 / (12.0 * h), 0.0);
    let mut classical: f64 = 0.0;
    for i in 2..t.len() - 2 {
        let d = (&ex[i - 2] - &ex[i + 2] + (&ex[i + 1] - &ex[i - 1]) * C64::new(8.0, 0.0)) * c;
        classical = classical.max((d - &ax[i] - &fs[i]).norm());
    }

    let g: Vec<CVector> = ax.iter().zip(&fs).map(|(a, f)| a + f).collect();
    let last = t.len() - 1;
    let mut int = CVector::zeros(n);
    let mut mild: f64 = 0.0;
    for i in 0..last {
        let (j, w) = match i {
            0 => (0, [9.0, 19.0, -5.0, 1.0]),
            _ if i + 1 == last => (i - 2, [1.0, -5.0, 19.0, 9.0]),
            _ => (i - 1, [-1.0, 13.0, 13.0, -1.0]),
        };
        for (k, wk) in w.iter().enumerate() {
            int += &g[j + k] * C64::new(wk * h / 24.0, 0.0);
        }
        mild = mild.max((&ex[i + 1] - &ex[0] - &int).norm());
    }
    Ok((classical / scale, mild / scale))
}
