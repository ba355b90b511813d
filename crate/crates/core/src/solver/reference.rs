use super::forcing::ForcingSignal;
use super::residuals::residuals;
use super::{check_grid, SolveMethod, SolveReport};
use crate::numerics::{min_singular, norm2, CMatrix, CVector, C64};
use crate::pencil::MatrixPencil;
use crate::{Error, Result};

const RETRIES: usize = 3;

/// Implicit Euler `(E − hA)x_{n+1} = Ex_n + h f(t_{n+1})` from the caller's `x0`.
///
/// When `E − hA` is numerically singular the step is stretched by 1% (at most three
/// times); the returned grid then differs from `t_grid`.
pub fn implicit_euler_reference(
    p: &MatrixPencil,
    x0: &CVector,
    f: &ForcingSignal,
    t_grid: &[f64],
) -> Result<SolveReport> {
    let mut h = check_grid(t_grid)?;
    let n = p.n();
    if x0.len() != n || f.dim() != n {
        return Err(Error::DimensionMismatch(format!("x0 has length {}, forcing {}, pencil {n}", x0.len(), f.dim())));
    }
    let mut attempt = 0;
    let lu = loop {
        let m: CMatrix = &p.e - &p.a * C64::new(h, 0.0);
        let smax = norm2(&m);
        if smax > 0.0 && min_singular(&m) > p.pol.rank_rel_tol * smax * n as f64 {
            break m.lu();
        }
        if attempt == RETRIES {
            return Err(Error::StepSingular);
        }
        attempt += 1;
        h *= 1.01;
        log::warn!("E - hA singular, retrying with h = {h:e}");
    };
    let t0 = t_grid[0];
    let times: Vec<f64> =
        if attempt == 0 { t_grid.to_vec() } else { (0..t_grid.len()).map(|i| t0 + i as f64 * h).collect() };
    let mut states = CMatrix::zeros(n, times.len());
    states.set_column(0, x0);
    let mut x = x0.clone();
    for (i, &t) in times.iter().enumerate().skip(1) {
        let rhs = &p.e * &x + f.value(t) * C64::new(h, 0.0);
        x = lu.solve(&rhs).ok_or(Error::StepSingular)?;
        states.set_column(i, &x);
    }
    let mut notes = Vec::new();
    if attempt > 0 {
        notes.push(format!("step stretched to {h:e}"));
    }
    let mut report = SolveReport {
        times,
        states,
        consistent_x0: x0.clone(),
        correction_norm: 0.0,
        classical_residual: f64::NAN,
        mild_residual: f64::NAN,
        mu: None,
        index: None,
        block_sizes: Vec::new(),
        method: SolveMethod::ImplicitEuler,
        notes,
    };
    let (c, m) = residuals(p, &report, f)?;
    report.classical_residual = c;
    report.mild_residual = m;
    Ok(report)
}
