use crate::output::write_artifacts;
use crate::{CliResult, CommonArgs, Failure};
use adae_core::growth::LambdaGrid;
use adae_core::io::PencilJson;
use adae_core::models::{
    heat_wave_pencil, random_spec, rlc_pencil, weierstrass_pencil, HeatWaveConfig, RlcConfig,
};
use adae_core::numerics::{from_real_rows, identity};
use adae_core::solver::{ForcingJson, ForcingSignal, PiecewisePolynomial};
use adae_core::{CVector, MatrixPencil, TolerancePolicy, C64};
use anyhow::{anyhow, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
struct ProblemJson {
    pencil: PencilJson,
    #[serde(default)]
    forcing: Option<ForcingJson>,
    #[serde(default)]
    x0_re: Option<Vec<f64>>,
    #[serde(default)]
    x0_im: Option<Vec<f64>>,
}

/// A pencil with the default forcing and initial state of its source.
pub struct Problem {
    pub source: String,
    pub pencil: MatrixPencil,
    pub forcing: Option<ForcingSignal>,
    pub x0: Option<CVector>,
    pub true_index: Option<usize>,
    /// Report the stored energy `(x, Ex)` along solves.
    pub energy: bool,
}

pub fn policy(args: &CommonArgs) -> CliResult<TolerancePolicy> {
    let mut pol = TolerancePolicy::default();
    if let Some(t) = args.tol {
        pol.residual_tol = t;
    }
    pol.validate()?;
    Ok(pol)
}

pub fn lambda_grid(args: &CommonArgs) -> CliResult<LambdaGrid> {
    let d = LambdaGrid::default();
    let lo = args.lambda_min.unwrap_or(d.points[0]);
    let hi = args.lambda_max.unwrap_or(*d.points.last().expect("default grid is nonempty"));
    let n = args.lambda_points.unwrap_or(d.len());
    Ok(LambdaGrid::log_spaced(lo, hi, n, 0.0)?)
}

fn real_vec(x: &[f64]) -> CVector {
    CVector::from_iterator(x.len(), x.iter().map(|&r| C64::new(r, 0.0)))
}

fn ramp(n: usize) -> ForcingSignal {
    let mut slope = vec![0.0; n];
    slope[n - 1] = 1.0;
    let poly = PiecewisePolynomial::polynomial(0.0, 1.0, vec![CVector::zeros(n), real_vec(&slope)])
        .expect("valid ramp");
    ForcingSignal::PiecewisePolynomial(poly)
}

fn random_state(seed: u64, n: usize) -> CVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CVector::from_iterator(n, (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)))
}

fn quadratic(seed: u64, n: usize) -> ForcingSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let coeffs = (0..3).map(|_| real_vec(&(0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())).collect();
    ForcingSignal::PiecewisePolynomial(PiecewisePolynomial::polynomial(0.0, 1.0, coeffs).expect("valid quadratic"))
}

fn model(name: &str, args: &CommonArgs, pol: TolerancePolicy) -> CliResult<Problem> {
    let base = |source: String, pencil: MatrixPencil| Problem {
        source,
        pencil,
        forcing: None,
        x0: None,
        true_index: None,
        energy: false,
    };
    let p = match name {
        "heat-wave" => {
            let cfg = HeatWaveConfig { m: args.m.unwrap_or(HeatWaveConfig::default().m) };
            let pencil = heat_wave_pencil(&cfg)?.with_tolerances(pol);
            let n = pencil.n();
            Problem { x0: Some(random_state(args.seed, n)), energy: true, ..base(format!("heat-wave m={}", cfg.m), pencil) }
        }
        "rlc" | "rlc-degenerate" => {
            let m = args.m.unwrap_or(if name == "rlc" { 50 } else { 30 });
            let cfg = match (name, args.lossless) {
                ("rlc-degenerate", _) => RlcConfig::degenerate_inductance(m),
                (_, true) => RlcConfig::uniform(m, 1.0, 1.0, 0.0, 0.0),
                _ => RlcConfig::uniform(m, 1.0, 1.0, 0.2, 0.1),
            };
            let line = rlc_pencil(&cfg)?;
            let pencil = line.square.clone().with_tolerances(pol);
            let n = pencil.n();
            // lossless runs check conservation, so the boundary data stay zero
            let (forcing, x0) = if args.lossless {
                (ForcingSignal::zero(n), random_state(args.seed, n))
            } else {
                let step = line.boundary_forcing(1.0, 0.0).column(0).into_owned();
                let poly = PiecewisePolynomial::polynomial(0.0, 1.0, vec![step]).expect("valid step");
                (ForcingSignal::PiecewisePolynomial(poly), CVector::zeros(n))
            };
            let label = format!("{name} m={m}{}", if args.lossless { " lossless" } else { "" });
            Problem {
                forcing: Some(forcing),
                x0: Some(x0),
                energy: true,
                ..base(label, pencil)
            }
        }
        "weierstrass" => {
            let spec = random_spec(args.seed, args.index, 8);
            let (pencil, k) = weierstrass_pencil(&spec)?;
            let n = pencil.n();
            Problem {
                forcing: Some(quadratic(args.seed, n)),
                true_index: Some(k),
                ..base(format!("weierstrass index={k} seed={}", args.seed), pencil.with_tolerances(pol))
            }
        }
        "n2" => {
            let pencil = MatrixPencil::with_policy(from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), identity(2), pol)?;
            Problem { forcing: Some(ramp(2)), true_index: Some(2), ..base("n2".into(), pencil) }
        }
        "semi-explicit" => {
            let e = from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
            let a = from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
            let pencil = MatrixPencil::with_policy(e, a, pol)?;
            Problem { forcing: Some(ramp(2)), true_index: Some(2), ..base("semi-explicit".into(), pencil) }
        }
        other => return Err(Failure::Input(anyhow!("unknown model '{other}'"))),
    };
    Ok(p)
}

fn from_file(path: &Path, pol: TolerancePolicy) -> CliResult<Problem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    // a problem file wraps the pencil under "pencil"; anything else must be a bare pencil
    let (pj, forcing, x0_re, x0_im) = if value.get("pencil").is_some() {
        let p: ProblemJson = serde_json::from_value(value).with_context(|| format!("{} is not a valid problem", path.display()))?;
        (p.pencil, p.forcing, p.x0_re, p.x0_im)
    } else {
        let p: PencilJson = serde_json::from_value(value).with_context(|| format!("{} is not a valid pencil", path.display()))?;
        (p, None, None, None)
    };
    let pencil = pj.to_pencil(pol)?;
    let n = pencil.n();
    let forcing = forcing.map(|f| f.to_signal(n)).transpose()?;
    let x0 = match (x0_re, x0_im) {
        (None, None) => None,
        (re, im) => {
            let re = re.unwrap_or_else(|| vec![0.0; n]);
            let im = im.unwrap_or_else(|| vec![0.0; n]);
            if re.len() != n || im.len() != n {
                return Err(Failure::Input(anyhow!("x0 must have length {n}")));
            }
            Some(CVector::from_iterator(n, re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i))))
        }
    };
    Ok(Problem {
        source: path.display().to_string(),
        pencil,
        forcing,
        x0,
        true_index: None,
        energy: false,
    })
}

pub fn load(args: &CommonArgs) -> CliResult<Problem> {
    let pol = policy(args)?;
    match (&args.input, &args.model) {
        (Some(path), None) => from_file(path, pol),
        (None, Some(name)) => model(name, args, pol),
        _ => Err(Failure::Input(anyhow!("exactly one of --input and --model is required"))),
    }
}

pub fn load_forcing(path: &Path, n: usize) -> CliResult<ForcingSignal> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let fj: ForcingJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(fj.to_signal(n)?)
}

pub fn cmd_generate(args: &CommonArgs) -> CliResult<()> {
    let problem = load(args)?;
    let json = PencilJson::from_pencil(&problem.pencil).to_json();
    write_artifacts(&args.out, &[("pencil.json", json)])?;
    match problem.true_index {
        Some(k) => println!("{}: n = {}, index {k}", problem.source, problem.pencil.n()),
        None => println!("{}: n = {}", problem.source, problem.pencil.n()),
    }
    Ok(())
}
