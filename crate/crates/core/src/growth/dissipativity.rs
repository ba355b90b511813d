use super::certificate::{CertificateKind, Evidence, GrowthCertificate, Verdict};
use super::grid::LambdaGrid;
use super::index::check_dk;
use crate::numerics::{full_rank, herm, max_eig_herm, norm2, rank_with_tol, singular_values, CMatrix, C64};
use crate::pencil::{MatrixPencil, Side};
use crate::{Error, Result};

/// Relative slack allowed between a certified bound and its grid measurement.
const SOUNDNESS_SLACK: f64 = 1e-6;

fn require_square(p: &MatrixPencil) -> Result<()> {
    if p.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("dissipativity criteria need a square pencil".into()))
    }
}

/// `λ_max(Herm(EᴴA) − ω EᴴE) ≤ tol · (1 + ‖E‖(‖A‖ + |ω|‖E‖))`.
pub fn check_left_dissipativity(p: &MatrixPencil, omega: f64) -> Result<GrowthCertificate> {
    require_square(p)?;
    let eh = p.e.adjoint();
    let form = herm(&(&eh * &p.a)) - herm(&(&eh * &p.e)) * C64::new(omega, 0.0);
    let top = max_eig_herm(&form);
    let (ne, na) = (norm2(&p.e), norm2(&p.a));
    let thr = p.pol.residual_tol * (1.0 + ne * (na + omega.abs() * ne));
    let verdict = if top <= thr { Verdict::Holds } else { Verdict::Fails };
    let mut c = GrowthCertificate::new(CertificateKind::Dissip, 1, omega, thr, verdict);
    c.evidence.push(Evidence { lambda: omega, value: top });
    if verdict == Verdict::Fails {
        c.note = Some(format!("Herm(EᴴA) − ωEᴴE has eigenvalue {top:.3e} > 0"));
    }
    Ok(c)
}

/// `ker E ∩ ker A = {0}`.
fn kernels_meet_trivially(p: &MatrixPencil) -> bool {
    let n = p.n();
    let mut st = CMatrix::zeros(2 * n, n);
    st.view_mut((0, 0), (n, n)).copy_from(&p.e);
    st.view_mut((n, 0), (n, n)).copy_from(&p.a);
    rank_with_tol(&st, &p.pol) == n
}

/// Some `λ₀ = ω + 10^j`, `j = 0..8`, with `λ₀E − A` invertible.
fn probe_point(p: &MatrixPencil, omega: f64) -> Option<f64> {
    (0..=8).map(|j| omega + 10f64.powi(j)).find(|&l| full_rank(&p.shifted(C64::new(l, 0.0)), &p.pol))
}

fn cross_check(c: &mut GrowthCertificate, p: &MatrixPencil, k: usize, omega: f64) {
    match check_dk(p, k, &LambdaGrid::default().with_omega(omega), Side::Left) {
        Ok(d) => {
            c.measured_m = Some(d.m);
            c.evidence = d.evidence;
            if d.m > c.m * (1.0 + SOUNDNESS_SLACK) + f64::MIN_POSITIVE {
                c.verdict = Verdict::Inconclusive;
                c.note = Some(format!("grid measurement {:.6e} exceeds the certified bound", d.m));
            }
        }
        Err(e) => c.note = Some(format!("grid cross-check unavailable: {e}")),
    }
}

/// Hypotheses under which `E(A − λE)⁻¹` satisfies `(D₁)` with `M = 1`.
pub fn certify_d1(p: &MatrixPencil, omega: f64) -> Result<GrowthCertificate> {
    let kind = CertificateKind::D1Cert;
    let dis = check_left_dissipativity(p, omega)?;
    if !dis.holds() {
        return Ok(GrowthCertificate::failing(kind, 1, omega, "pencil is not left ω-dissipative"));
    }
    if !kernels_meet_trivially(p) {
        return Ok(GrowthCertificate::failing(kind, 1, omega, "ker E ∩ ker A is nontrivial"));
    }
    if probe_point(p, omega).is_none() {
        return Ok(GrowthCertificate::failing(kind, 1, omega, "no probe λ₀ > ω with λ₀E − A invertible"));
    }
    let mut c = GrowthCertificate::new(kind, 1, omega, 1.0, Verdict::Holds);
    cross_check(&mut c, p, 1, omega);
    Ok(c)
}

/// Hypotheses of the self-adjoint criterion for `(D₂)` with `M = M₁/M₂`.
pub fn certify_d2(p: &MatrixPencil, omega: f64) -> Result<GrowthCertificate> {
    require_square(p)?;
    let kind = CertificateKind::D2Cert;
    let tol = p.pol.residual_tol;
    let ne = norm2(&p.e);
    if (&p.e - p.e.adjoint()).norm() > tol * (1.0 + ne) {
        return Ok(GrowthCertificate::failing(kind, 2, omega, "E is not self-adjoint"));
    }
    if max_eig_herm(&(-herm(&p.e))) > tol * (1.0 + ne) {
        return Ok(GrowthCertificate::failing(kind, 2, omega, "E is not nonnegative"));
    }
    let shifted = &p.a - &p.e * C64::new(omega, 0.0);
    if max_eig_herm(&shifted) > tol * (1.0 + norm2(&shifted)) {
        return Ok(GrowthCertificate::failing(kind, 2, omega, "A − ωE is not dissipative"));
    }
    if !kernels_meet_trivially(p) {
        return Ok(GrowthCertificate::failing(kind, 2, omega, "ker E ∩ ker A is nontrivial"));
    }
    if probe_point(p, omega).is_none() {
        return Ok(GrowthCertificate::failing(kind, 2, omega, "no probe λ₀ > ω with λ₀E − A invertible"));
    }
    let sv = singular_values(&p.e);
    let m1 = sv.first().copied().unwrap_or(0.0);
    let cut = p.pol.rank_rel_tol * m1 * p.n() as f64;
    let m = match sv.iter().rev().find(|&&s| s > cut) {
        Some(&m2) => m1 / m2,
        None => 0.0,
    };
    let mut c = GrowthCertificate::new(kind, 2, omega, m, Verdict::Holds);
    cross_check(&mut c, p, 2, omega);
    Ok(c)
}

/// Candidate shifts `0, ±2^j` (`j = −4..4`) in increasing order.
fn omega_candidates() -> Vec<f64> {
    let mut v = vec![0.0];
    for j in -4..=4 {
        let x = 2f64.powi(j);
        v.push(x);
        v.push(-x);
    }
    v.sort_by(f64::total_cmp);
    v
}

/// Smallest candidate `ω` for which the certificate holds.
pub fn search_omega(p: &MatrixPencil, kind: CertificateKind) -> Result<Option<GrowthCertificate>> {
    for w in omega_candidates() {
        let c = match kind {
            CertificateKind::D1Cert => certify_d1(p, w)?,
            CertificateKind::D2Cert => certify_d2(p, w)?,
            CertificateKind::Dissip => check_left_dissipativity(p, w)?,
            _ => return Err(Error::InvalidInput(format!("no ω search for {kind:?}"))),
        };
        if c.holds() {
            return Ok(Some(c));
        }
    }
    Ok(None)
}
