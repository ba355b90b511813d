use super::certificate::{GrowthCertificate, Verdict};
use super::grid::LambdaGrid;
use super::index::{check_dk, estimate_g_index, estimate_r_index};
use super::tractability::tractability_chain;
use crate::chain::build_chain;
use crate::numerics::{min_singular, qz_canonical, C64};
use crate::pencil::{MatrixPencil, Side};
use crate::Result;
use serde::Serialize;

/// One row of the index table. `value` is `None` when the method did not produce an index.
#[derive(Debug, Clone, Serialize)]
pub struct IndexRow {
    pub method: String,
    pub value: Option<usize>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub rows: Vec<IndexRow>,
    pub g_left: GrowthCertificate,
    pub g_right: GrowthCertificate,
    pub r: GrowthCertificate,
    pub rw: GrowthCertificate,
    pub dk: Option<GrowthCertificate>,
    pub mu: [f64; 2],
    pub violations: Vec<String>,
}

impl IndexReport {
    pub fn value(&self, method: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.method == method).and_then(|r| r.value)
    }

    /// Plain-text table.
    pub fn table(&self) -> String {
        let mut s = format!("{:<14} {:>6}  {}\n", "method", "index", "verdict");
        for r in &self.rows {
            let v = r.value.map_or("-".to_string(), |v| v.to_string());
            s.push_str(&format!("{:<14} {:>6}  {:?}", r.method, v, r.verdict));
            if let Some(n) = &r.note {
                s.push_str(&format!("  ({n})"));
            }
            s.push('\n');
        }
        for v in &self.violations {
            s.push_str(&format!("VIOLATION: {v}\n"));
        }
        s
    }
}

/// Shift `μ ∈ {0, ±½, ±1, ±2}` maximizing `σ_min(μE − A)`.
pub fn auto_mu(p: &MatrixPencil) -> C64 {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for m in [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
        let s = min_singular(&p.shifted(C64::new(m, 0.0)));
        if s > best.0 * (1.0 + 1e-12) {
            best = (s, m);
        }
    }
    C64::new(best.1, 0.0)
}

fn row(method: &str, value: Option<usize>, verdict: Verdict, note: Option<String>) -> IndexRow {
    IndexRow { method: method.into(), value, verdict, note }
}

fn cert_row(method: &str, c: &GrowthCertificate) -> IndexRow {
    row(method, Some(c.k), c.verdict, c.note.clone())
}

/// Runs every index estimator and lists broken implications between them.
pub fn index_comparison_report(p: &MatrixPencil, grid: &LambdaGrid) -> Result<IndexReport> {
    let g_left = estimate_g_index(p, grid, Side::Left)?;
    let g_right = estimate_g_index(p, grid, Side::Right)?;
    let r = estimate_r_index(p, grid)?;
    let mut rw = r.clone();
    rw.kind = super::certificate::CertificateKind::Rw;
    let mut rows = vec![cert_row("G (left)", &g_left), cert_row("G (right)", &g_right), cert_row("R", &r)];

    let tract = tractability_chain(p, p.n() + 1);
    rows.push(match &tract {
        Ok(t) => row("tractability", t.index, if t.index.is_some() { Verdict::Holds } else { Verdict::Inconclusive }, None),
        Err(e) => row("tractability", None, Verdict::Inconclusive, Some(e.to_string())),
    });
    let mu = auto_mu(p);
    rows.push(match build_chain(p, mu, Side::Left, None) {
        Ok(ch) => row("Wong", ch.stabilization_k, Verdict::Holds, None),
        Err(e) => row("Wong", None, Verdict::Inconclusive, Some(e.to_string())),
    });
    let qz = qz_canonical(&p.e, &p.a, &p.pol);
    let max_re = qz.as_ref().ok().and_then(|q| q.finite.iter().map(|l| l.re).reduce(f64::max));
    rows.push(match &qz {
        Ok(q) => row("QZ", Some(q.index), Verdict::Holds, None),
        Err(e) => row("QZ", None, Verdict::Inconclusive, Some(e.to_string())),
    });

    let mut violations = Vec::new();
    let conclusive = |c: &GrowthCertificate| c.verdict == Verdict::Holds;
    let mut dk = None;
    if conclusive(&r) {
        for (side, g) in [("left", &g_left), ("right", &g_right)] {
            if !conclusive(g) {
                continue;
            }
            if r.k > g.k {
                violations.push(format!("G_{} ({side}) holds but R^w_{} does not", g.k, g.k));
            }
            if g.k > r.k + 1 {
                violations.push(format!("R^w_{} holds but G_{} ({side}) does not", r.k, r.k + 1));
            }
        }
        let omega = max_re.map_or(0.0, |m| m.max(0.0) + 1.0);
        match check_dk(p, r.k.max(1), &grid.with_omega(omega), Side::Left) {
            Ok(d) => {
                if d.verdict == Verdict::Fails {
                    violations.push(format!("R_{} holds but D_{} fails at ω = {omega}", r.k, r.k.max(1)));
                }
                dk = Some(d);
            }
            Err(e) => log::warn!("D_k cross-check skipped: {e}"),
        }
        if let Ok(t) = &tract {
            if let Some(ti) = t.index {
                if ti != r.k {
                    violations.push(format!("tractability index {ti} differs from R-index {}", r.k));
                }
            }
        }
    }
    Ok(IndexReport { rows, g_left, g_right, r, rw, dk, mu: [mu.re, mu.im], violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{from_real_rows, identity, real_diag};

    #[test]
    fn nilpotent_reports_agree() {
        let n2 = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let rep = index_comparison_report(&MatrixPencil::new(n2, identity(2)).unwrap(), &LambdaGrid::default()).unwrap();
        for m in ["G (left)", "G (right)", "R", "tractability", "Wong", "QZ"] {
            assert_eq!(rep.value(m), Some(2), "{m}\n{}", rep.table());
        }
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn ode_report() {
        let p = MatrixPencil::new(identity(2), real_diag(&[-1.0, -2.0])).unwrap();
        let rep = index_comparison_report(&p, &LambdaGrid::default()).unwrap();
        assert_eq!(rep.value("G (left)"), Some(1));
        assert_eq!(rep.value("R"), Some(0));
        assert_eq!(rep.value("tractability"), Some(0));
        assert_eq!(rep.value("QZ"), Some(0));
        assert!(rep.violations.is_empty(), "{}", rep.table());
    }

    #[test]
    fn semi_dissipative_pencil_reports_two() {
        let e = from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let a = from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let rep = index_comparison_report(&MatrixPencil::new(e, a).unwrap(), &LambdaGrid::default()).unwrap();
        for m in ["G (left)", "R", "tractability", "Wong", "QZ"] {
            assert_eq!(rep.value(m), Some(2), "{m}\n{}", rep.table());
        }
        assert!(rep.violations.is_empty());
    }
}
