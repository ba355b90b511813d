use crate::input::{lambda_grid, load, Problem};
use crate::output::{to_json, write_artifacts};
use crate::{CliResult, CommonArgs, Failure};
use adae_core::chain::{build_chain, check_decomposition, y_impli_check};
use adae_core::growth::{
    auto_mu, certify_d1, certify_d2, check_left_dissipativity, index_comparison_report, search_omega,
    CertificateKind, GrowthCertificate, IndexReport, LambdaGrid,
};
use adae_core::numerics::min_singular;
use adae_core::staircase::build_staircase;
use adae_core::{Side, TolerancePolicy, C64};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Probe {
    pub lambda: [f64; 2],
    pub min_singular: f64,
}

#[derive(Debug, Serialize)]
pub struct Regularity {
    pub regular: bool,
    pub probes: Vec<Probe>,
}

#[derive(Debug, Serialize)]
pub struct WongSummary {
    pub side: Side,
    pub mu: [f64; 2],
    pub v_dims: Vec<usize>,
    pub w_dims: Vec<usize>,
    pub stabilization: Option<usize>,
    pub decomposition_gap: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct StaircaseSummary {
    pub side: Side,
    pub block_sizes: Vec<usize>,
    pub max_pattern_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct Indices {
    pub g: Option<usize>,
    pub r: Option<usize>,
    pub tractability: Option<usize>,
    pub wong: Option<usize>,
    pub qz: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct Certificates {
    pub d1: Option<GrowthCertificate>,
    pub d2: Option<GrowthCertificate>,
    pub dissipativity: Option<GrowthCertificate>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub source: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_index: Option<usize>,
    pub tolerances: TolerancePolicy,
    pub regularity: Regularity,
    pub wong: WongSummary,
    pub staircase: Option<StaircaseSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub staircase_error: Option<String>,
    pub indices: Indices,
    pub index_report: IndexReport,
    pub certificates: Certificates,
    pub y_impli: Option<bool>,
    pub violations: Vec<String>,
}

fn certificates(p: &adae_core::MatrixPencil, omega: Option<f64>) -> CliResult<Certificates> {
    Ok(match omega {
        Some(w) => Certificates {
            d1: Some(certify_d1(p, w)?),
            d2: Some(certify_d2(p, w)?),
            dissipativity: Some(check_left_dissipativity(p, w)?),
        },
        None => Certificates {
            d1: search_omega(p, CertificateKind::D1Cert)?,
            d2: search_omega(p, CertificateKind::D2Cert)?,
            dissipativity: search_omega(p, CertificateKind::Dissip)?,
        },
    })
}

pub fn analyze(problem: &Problem, grid: &LambdaGrid, omega: Option<f64>) -> CliResult<AnalyzeReport> {
    let p = &problem.pencil;
    let probes = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)]
        .iter()
        .map(|&l| Probe { lambda: [l.re, l.im], min_singular: min_singular(&p.shifted(l)) })
        .collect();
    let regularity = Regularity { regular: true, probes };

    let mu = auto_mu(p);
    let chain = build_chain(p, mu, Side::Left, None)?;
    let (v_dims, w_dims) = chain.dims();
    let gap = check_decomposition(&chain, p.pol.subspace_tol).ok().map(|d| d.gap);
    let wong = WongSummary {
        side: Side::Left,
        mu: [mu.re, mu.im],
        v_dims,
        w_dims,
        stabilization: chain.stabilization_k,
        decomposition_gap: gap,
    };

    let (staircase, staircase_error) = match build_staircase(p, mu, Side::Right) {
        Ok(s) => (
            Some(StaircaseSummary {
                side: Side::Right,
                max_pattern_residual: s.residuals.iter().map(|r| r.1).fold(0.0, f64::max),
                block_sizes: s.block_sizes,
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };

    let index_report = index_comparison_report(p, grid)?;
    let indices = Indices {
        g: index_report.value("G (left)"),
        r: index_report.value("R"),
        tractability: index_report.value("tractability"),
        wong: index_report.value("Wong"),
        qz: index_report.value("QZ"),
    };
    let certificates = certificates(p, omega)?;
    let y_impli = y_impli_check(p).ok().map(|r| r.holds);
    let violations = index_report.violations.clone();
    Ok(AnalyzeReport {
        source: problem.source.clone(),
        n: p.n(),
        true_index: problem.true_index,
        tolerances: p.pol,
        regularity,
        wong,
        staircase,
        staircase_error,
        indices,
        index_report,
        certificates,
        y_impli,
        violations,
    })
}

pub fn cmd_analyze(args: &CommonArgs) -> CliResult<()> {
    let problem = load(args)?;
    let grid = lambda_grid(args)?;
    let report = analyze(&problem, &grid, args.omega)?;
    write_artifacts(&args.out, &[("report.json", to_json(&report))])?;
    print!("{}", report.index_report.table());
    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(report.violations))
    }
}
