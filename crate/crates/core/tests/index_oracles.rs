use adae_core::chain::build_chain;
use adae_core::growth::{estimate_g_index, estimate_r_index, tractability_chain, LambdaGrid, Verdict};
use adae_core::models::{random_spec, weierstrass_pencil};
use adae_core::numerics::qz_canonical;
use adae_core::{Side, C64};

#[test]
fn weierstrass_corpus_agreement() {
    let grid = LambdaGrid::default();
    let mut failures = Vec::new();
    for seed in 0..25u64 {
        for k in 0..4 {
            let spec = random_spec(1000 + seed, k, 12);
            let (p, truth) = weierstrass_pencil(&spec).unwrap();
            let r = estimate_r_index(&p, &grid).unwrap();
            let t = tractability_chain(&p, 14).unwrap().index;
            let q = qz_canonical(&p.e, &p.a, &p.pol).unwrap().index;
            if r.k != truth || t != Some(truth) || q != truth || r.verdict != Verdict::Holds {
                failures.push(format!("seed {seed} k {truth}: R {} ({:?}, s={:?}) tract {t:?} qz {q}", r.k, r.verdict, r.slope));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn wong_chain_and_g_index_match_construction() {
    let grid = LambdaGrid::default();
    for seed in 0..10u64 {
        for k in 1..4 {
            let (p, truth) = weierstrass_pencil(&random_spec(seed, k, 10)).unwrap();
            let ch = build_chain(&p, C64::new(0.0, 0.0), Side::Left, None).unwrap();
            assert_eq!(ch.stabilization_k, Some(truth), "seed {seed}");
            let g = estimate_g_index(&p, &grid, Side::Left).unwrap();
            assert_eq!(g.k, truth.max(1), "seed {seed}");
        }
    }
}
