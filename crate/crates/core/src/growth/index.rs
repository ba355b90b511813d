use super::certificate::{CertificateKind, Evidence, GrowthCertificate, Verdict};
use super::grid::LambdaGrid;
use crate::numerics::{norm2, range_basis_scaled, CMatrix, C64};
use crate::pencil::{MatrixPencil, ResolventKind, Side};
use crate::{Error, Result};

/// Log10 fit residual above which a slope is not trusted.
const FIT_RMS_LIMIT: f64 = 0.2;
/// Slopes this close to a rounding boundary `j + 0.1` are inconclusive.
const BOUNDARY_BAND: f64 = 0.05;
/// Weighted D-values below `NOISE_FLOOR (1 + ‖E‖)` count as zero in the slope test.
const NOISE_FLOOR: f64 = 1e-7;

/// Samples `f` on the grid and keeps the longest run of consecutive points where the
/// shifted pencil is numerically invertible (the upper one on ties). Points drop out
/// either at eigenvalues or, for higher index, where `cond(λE − A)` grows past the rank
/// tolerance at the top of the grid.
pub(crate) fn sample(grid: &LambdaGrid, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<Evidence>> {
    grid.validate()?;
    let vals = grid.map(&f);
    let (mut best, mut cur) = ((0, 0), 0);
    for (i, v) in vals.iter().enumerate() {
        if v.is_ok() {
            if i + 1 - cur >= best.1 - best.0 {
                best = (cur, i + 1);
            }
        } else {
            cur = i + 1;
        }
    }
    let (start, end) = best;
    if end - start < grid.len() {
        log::warn!(
            "λE − A is not numerically invertible at {} grid points; using λ ∈ [{:.3e}, {:.3e}]",
            grid.len() - (end - start),
            grid.points.get(start).copied().unwrap_or(f64::NAN),
            grid.points.get(end.max(1) - 1).copied().unwrap_or(f64::NAN)
        );
    }
    let mut ev = Vec::with_capacity(end - start);
    for (i, v) in vals.into_iter().enumerate() {
        match v {
            Ok(value) if (start..end).contains(&i) => ev.push(Evidence { lambda: grid.points[i], value }),
            Ok(_) | Err(Error::NotInResolventSet(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if ev.len() < 4 {
        return Err(Error::GridTooCoarse(format!("only {} usable grid points", ev.len())));
    }
    Ok(ev)
}

/// Least-squares slope of `log10 v` against `log10 λ` and the RMS residual.
pub(crate) fn loglog_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(l, v)| (l.log10(), v.log10())).collect();
    let n = xy.len() as f64;
    if xy.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let s = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rms = (xy.iter().map(|p| (p.1 - my - s * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (s, rms)
}

/// Points in the top `decades` of the sampled range with a positive value.
fn window(ev: &[Evidence], decades: f64) -> Vec<(f64, f64)> {
    let top = ev.last().map(|e| e.lambda).unwrap_or(1.0);
    let lo = top / 10f64.powf(decades);
    ev.iter().filter(|e| e.lambda >= lo && e.value > 0.0).map(|e| (e.lambda, e.value)).collect()
}

fn growth_certificate(kind: CertificateKind, offset: i64, omega: f64, ev: Vec<Evidence>) -> GrowthCertificate {
    if ev.iter().all(|e| e.value == 0.0) {
        let mut c = GrowthCertificate::new(kind, 0, omega, 0.0, Verdict::Holds);
        c.evidence = ev;
        c.note = Some("identically zero on the grid".into());
        return c;
    }
    let (s, rms) = loglog_fit(&window(&ev, 2.0));
    let k = ((s - 0.1).ceil() as i64 + offset).max(0) as usize;
    let mut c = GrowthCertificate::new(kind, k, omega, 0.0, Verdict::Holds);
    c.evidence = ev;
    c.m = c.evidence.iter().map(|e| c.bounded_value(e)).fold(0.0, f64::max);
    c.slope = Some(s);
    c.fit_residual = Some(rms);
    let frac = (s - 0.1) - (s - 0.1).round();
    if rms >= FIT_RMS_LIMIT {
        c.verdict = Verdict::Inconclusive;
        c.note = Some(format!("log-log fit residual {rms:.3} too large"));
    } else if frac.abs() < BOUNDARY_BAND {
        c.verdict = Verdict::Inconclusive;
        c.note = Some(format!("slope {s:.3} sits on a rounding boundary"));
    }
    c
}

/// Pseudo-resolvent index from the growth of `‖R(λ)‖` along the grid.
pub fn estimate_g_index(p: &MatrixPencil, grid: &LambdaGrid, side: Side) -> Result<GrowthCertificate> {
    let ev = sample(grid, |l| p.resolvent_norm(C64::new(l, 0.0), ResolventKind::Pseudo(side)))?;
    Ok(growth_certificate(CertificateKind::G, 2, grid.omega, ev))
}

/// Resolvent index from the growth of `‖(λE − A)⁻¹‖` along the grid.
pub fn estimate_r_index(p: &MatrixPencil, grid: &LambdaGrid) -> Result<GrowthCertificate> {
    let ev = sample(grid, |l| p.resolvent_norm(C64::new(l, 0.0), ResolventKind::Resolvent))?;
    Ok(growth_certificate(CertificateKind::R, 1, grid.omega, ev))
}

/// Orthonormal basis of `ran R(ω)^{k−1}`.
pub(crate) fn power_range(p: &MatrixPencil, omega: f64, k: usize, side: Side) -> Result<CMatrix> {
    let n = p.n();
    let mut q = CMatrix::identity(n, n);
    if k <= 1 {
        return Ok(q);
    }
    let r = p.pseudo_resolvent(C64::new(omega, 0.0), side)?;
    let scale = norm2(&r);
    for _ in 1..k {
        if q.ncols() == 0 {
            break;
        }
        q = range_basis_scaled(&(&r * &q), &p.pol, scale).basis;
    }
    Ok(q)
}

/// `‖R(λ)x‖ ≤ M/(λ − ω) ‖x‖` on `ran R(ω)^{k−1}` along the grid. Holds when the weighted
/// values do not grow over the top decade of the grid.
pub fn check_dk(p: &MatrixPencil, k: usize, grid: &LambdaGrid, side: Side) -> Result<GrowthCertificate> {
    if k == 0 {
        return Err(Error::InvalidInput("D_k needs k >= 1".into()));
    }
    grid.validate()?;
    let omega = grid.omega;
    let q = power_range(p, omega, k, side)?;
    let mut c = GrowthCertificate::new(CertificateKind::D, k, omega, 0.0, Verdict::Holds);
    if q.ncols() == 0 {
        c.note = Some(format!("ran R(ω)^{} is trivial", k - 1));
        return Ok(c);
    }
    let full = q.ncols() == p.n();
    c.evidence = sample(grid, |l| {
        let lam = C64::new(l, 0.0);
        if full {
            p.resolvent_norm(lam, ResolventKind::Pseudo(side))
        } else {
            Ok(norm2(&p.apply_pseudo_resolvent(lam, side, &q)?))
        }
    })?;
    let weighted: Vec<(f64, f64)> = c.evidence.iter().map(|e| (e.lambda, c.bounded_value(e))).collect();
    c.m = weighted.iter().map(|w| w.1).fold(0.0, f64::max);
    let floor = NOISE_FLOOR * (1.0 + p.norm_e());
    let top = weighted.last().map(|w| w.0).unwrap_or(1.0);
    let tail: Vec<(f64, f64)> =
        weighted.iter().copied().filter(|&(l, w)| l >= omega + (top - omega) / 10.0 && w > floor).collect();
    if !c.m.is_finite() {
        c.verdict = Verdict::Fails;
        c.note = Some("non-finite weighted norm".into());
    } else if tail.len() >= 2 {
        let (s, rms) = loglog_fit(&tail.iter().map(|&(l, w)| (l - omega, w)).collect::<Vec<_>>());
        c.slope = Some(s);
        c.fit_residual = Some(rms);
        if s > 0.1 {
            c.verdict = Verdict::Fails;
            c.note = Some(format!("(λ−ω)‖R(λ)Q‖ grows like (λ−ω)^{s:.2}"));
        }
    }
    Ok(c)
}
