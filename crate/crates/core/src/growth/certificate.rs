use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    G,
    R,
    Rw,
    D,
    #[serde(rename = "dissip")]
    Dissip,
    #[serde(rename = "D1-cert")]
    D1Cert,
    #[serde(rename = "D2-cert")]
    D2Cert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// A measured norm at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub lambda: f64,
    pub value: f64,
}

/// Bounds `(k, ω, M)` with the samples they were derived from.
///
/// Evidence values are raw norms: `‖R(λ)‖` for G, `‖(λE − A)⁻¹‖` for R/Rw,
/// `‖R(λ)Q‖` for D and the D certificates, `λ_max` of the dissipativity form for dissip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub kind: CertificateKind,
    pub k: usize,
    pub omega: f64,
    /// Non-finite bounds serialize as `null`.
    #[serde(rename = "M", with = "finite_or_null")]
    pub m: f64,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub measured_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl GrowthCertificate {
    pub(crate) fn new(kind: CertificateKind, k: usize, omega: f64, m: f64, verdict: Verdict) -> Self {
        Self {
            kind,
            k,
            omega,
            m,
            verdict,
            evidence: Vec::new(),
            slope: None,
            fit_residual: None,
            measured_m: None,
            note: None,
        }
    }

    pub(crate) fn failing(kind: CertificateKind, k: usize, omega: f64, note: impl Into<String>) -> Self {
        let mut c = Self::new(kind, k, omega, f64::INFINITY, Verdict::Fails);
        c.note = Some(note.into());
        c
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Weighted value that must stay below `M` at `λ`.
    pub fn bounded_value(&self, e: &Evidence) -> f64 {
        match self.kind {
            CertificateKind::G => e.lambda.powi(2 - self.k as i32) * e.value,
            CertificateKind::R | CertificateKind::Rw => e.lambda.powi(1 - self.k as i32) * e.value,
            CertificateKind::D | CertificateKind::D1Cert | CertificateKind::D2Cert => (e.lambda - self.omega) * e.value,
            CertificateKind::Dissip => e.value,
        }
    }

    /// Every evidence point obeys the stored bound up to relative slack `rel`.
    pub fn evidence_consistent(&self, rel: f64) -> bool {
        self.evidence.iter().all(|e| self.bounded_value(e) <= self.m * (1.0 + rel) + f64::MIN_POSITIVE)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
