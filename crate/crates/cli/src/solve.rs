use crate::analyze::analyze;
use crate::input::{lambda_grid, load, load_forcing, Problem};
use crate::output::{energy_csv, to_json, write_artifacts};
use crate::{CliResult, DemoArgs, Failure, SolveArgs};
use adae_core::io::trajectory_csv;
use adae_core::solver::{
    implicit_euler_reference, solve_decoupled, solve_homogeneous, uniform_grid, ForcingSignal, SolveReport,
    SolveSummary,
};
use adae_core::{CVector, MatrixPencil, C64};
use anyhow::anyhow;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct CrossCheck {
    pub max_deviation: f64,
    pub reference_classical_residual: f64,
    pub reference_mild_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct EnergySummary {
    pub initial: f64,
    pub last: f64,
    /// Largest increase between consecutive grid points.
    pub max_step_increase: f64,
    /// `max_t |E(t) − E(0)|`.
    pub max_drift: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveOutput {
    pub source: String,
    pub forcing: String,
    #[serde(flatten)]
    pub summary: SolveSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergySummary>,
}

fn check_time(tf: f64, steps: usize) -> CliResult<Vec<f64>> {
    if !(tf > 0.0 && tf.is_finite()) {
        return Err(Failure::Input(anyhow!("--tf must be positive, got {tf}")));
    }
    if steps < 4 {
        return Err(Failure::Input(anyhow!("--steps must be at least 4, got {steps}")));
    }
    Ok(uniform_grid(0.0, tf, steps))
}

fn energies(p: &MatrixPencil, r: &SolveReport) -> Vec<f64> {
    (0..r.times.len()).map(|i| {
        let x = r.state(i);
        x.dotc(&(&p.e * &x)).re
    }).collect()
}

fn energy_summary(e: &[f64]) -> EnergySummary {
    let e0 = e[0];
    EnergySummary {
        initial: e0,
        last: e[e.len() - 1],
        max_step_increase: e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max),
        max_drift: e.iter().map(|x| (x - e0).abs()).fold(0.0, f64::max),
    }
}

struct Solved {
    files: Vec<(&'static str, String)>,
}

fn run_solve(problem: &Problem, forcing: ForcingSignal, t: &[f64], mu: Option<f64>, cross: bool) -> CliResult<Solved> {
    let p = &problem.pencil;
    let n = p.n();
    let x0 = problem.x0.clone().unwrap_or_else(|| CVector::zeros(n));
    let mu = mu.map(|m| C64::new(m, 0.0));
    let report = solve_decoupled(p, &x0, &forcing, t, mu)?;
    let cross_check = if cross {
        let r = implicit_euler_reference(p, &report.consistent_x0, &forcing, t)?;
        let max_deviation = if r.times == report.times { report.max_deviation(&r)? } else { f64::NAN };
        Some(CrossCheck {
            max_deviation,
            reference_classical_residual: r.classical_residual,
            reference_mild_residual: r.mild_residual,
        })
    } else {
        None
    };
    finish(problem, &report, forcing.kind(), cross_check)
}

fn finish(problem: &Problem, report: &SolveReport, kind: &str, cross_check: Option<CrossCheck>) -> CliResult<Solved> {
    let mut files = vec![("trajectory.csv", trajectory_csv(&report.times, &report.states))];
    let energy = if problem.energy {
        let e = energies(&problem.pencil, report);
        files.push(("energy.csv", energy_csv(&report.times, &e)));
        Some(energy_summary(&e))
    } else {
        None
    };
    let out = SolveOutput {
        source: problem.source.clone(),
        forcing: kind.to_string(),
        summary: report.summary(),
        cross_check,
        energy,
    };
    files.push(("solve.json", to_json(&out)));
    Ok(Solved { files })
}

pub fn cmd_solve(args: &SolveArgs) -> CliResult<()> {
    let t = check_time(args.tf, args.steps)?;
    let problem = load(&args.common)?;
    let n = problem.pencil.n();
    let forcing = match &args.forcing {
        Some(path) => load_forcing(path, n)?,
        None => problem.forcing.clone().unwrap_or_else(|| ForcingSignal::zero(n)),
    };
    let solved = run_solve(&problem, forcing, &t, args.mu, args.cross_check)?;
    write_artifacts(&args.common.out, &solved.files)?;
    Ok(())
}

pub fn cmd_demo(args: &DemoArgs) -> CliResult<()> {
    let mut common = args.common.clone();
    common.input = None;
    common.model = Some(match args.name.as_str() {
        "heat-wave" | "rlc" | "weierstrass" => args.name.clone(),
        other => return Err(Failure::Input(anyhow!("unknown demo '{other}' (heat-wave, rlc, weierstrass)"))),
    });
    let t = check_time(args.tf, args.steps)?;
    let problem = load(&common)?;
    let report = analyze(&problem, &lambda_grid(&common)?, common.omega)?;
    let solved = if args.name == "heat-wave" {
        let x0 = problem.x0.clone().unwrap_or_else(|| CVector::zeros(problem.pencil.n()));
        let r = solve_homogeneous(&problem.pencil, &x0, &t, None)?;
        finish(&problem, &r, "none", None)?
    } else {
        let forcing = problem.forcing.clone().unwrap_or_else(|| ForcingSignal::zero(problem.pencil.n()));
        run_solve(&problem, forcing, &t, None, true)?
    };
    let mut files = solved.files;
    files.push(("report.json", to_json(&report)));
    write_artifacts(&common.out, &files)?;
    print!("{}", report.index_report.table());
    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(report.violations))
    }
}
