mod common;

use common::{all_vectors, coset_minimum, cost, random_matrix, random_vec};
use proptest::prelude::*;
use qtanner_core::decode::{
    bp_decode, decode, lsd, lsd_clusters, osd, reliability_order, BpVariant, DecoderConfig, Decoder, MaxIter,
    OsdPolicy, PostKind, Prior,
};
use qtanner_core::{BitMatrix, BitVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_posterior<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.01..0.6)).collect()
}

#[test]
fn exhaustive_osd_matches_coset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let cols = rng.random_range(1..=12);
        let rows = rng.random_range(1..=cols);
        let h = random_matrix(rows, cols, 0.4, &mut rng);
        let e = random_vec(cols, 0.3, &mut rng);
        let s = h.mul_vec(&e).unwrap();
        let post = random_posterior(cols, &mut rng);
        let got = osd(&h, &s, &post, OsdPolicy::Exhaustive).unwrap();
        assert_eq!(h.mul_vec(&got).unwrap(), s);
        let best = coset_minimum(&h, &s, &post).unwrap();
        assert!((cost(&got, &post) - best).abs() < 1e-9);
    }
}

#[test]
fn sweep_is_exhaustive_for_two_free_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 100 {
        let cols = rng.random_range(2..=10);
        let h = random_matrix(cols - 2, cols, 0.5, &mut rng);
        if h.rank() != cols - 2 {
            continue;
        }
        let s = h.mul_vec(&random_vec(cols, 0.3, &mut rng)).unwrap();
        let post = random_posterior(cols, &mut rng);
        let got = osd(&h, &s, &post, OsdPolicy::CombinationSweep { order: 2 }).unwrap();
        let best = coset_minimum(&h, &s, &post).unwrap();
        assert!((cost(&got, &post) - best).abs() < 1e-9);
        checked += 1;
    }
}

#[test]
fn lsd_equals_osd_on_a_single_spanning_cluster() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut spanning = 0;
    for _ in 0..2000 {
        let cols = rng.random_range(2..=10);
        let rows = rng.random_range(1..=cols);
        let h = random_matrix(rows, cols, 0.5, &mut rng);
        let s = h.mul_vec(&random_vec(cols, 0.4, &mut rng)).unwrap();
        if s.is_zero() {
            continue;
        }
        let post = random_posterior(cols, &mut rng);
        let Ok(clusters) = lsd_clusters(&h, &s, &post) else { continue };
        if clusters.len() != 1 || clusters[0].1.len() != cols {
            continue;
        }
        let l = lsd(&h, &s, &post, 3).unwrap();
        let o = osd(&h, &s, &post, OsdPolicy::CombinationSweep { order: 3 }).unwrap();
        assert_eq!(l, o);
        spanning += 1;
    }
    assert!(spanning >= 50, "only {spanning} spanning instances");
}


#[test]
fn lsd_on_a_ring_solves_distant_errors_independently() {
    // Ring code on 16 bits: check i covers bits i and i+1.
    let n = 16;
    let rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let h = BitMatrix::from_row_indices(n, &rows).unwrap();
    let mut e = BitVec::zeros(n);
    e.set(2, true);
    e.set(10, true);
    let s = h.mul_vec(&e).unwrap();
    let mut post = vec![0.05; n];
    post[2] = 0.3;
    post[10] = 0.3;
    let clusters = lsd_clusters(&h, &s, &post).unwrap();
    assert_eq!(clusters.len(), 2);
    let got = lsd(&h, &s, &post, 3).unwrap();
    assert_eq!(got, e);
    assert!((cost(&got, &post) - coset_minimum(&h, &s, &post).unwrap()).abs() < 1e-9);
}

/// Random trees: a spanning tree over check and variable nodes.
fn random_tree<R: Rng>(rng: &mut R) -> BitMatrix {
    let vars = rng.random_range(2..=6);
    let checks = rng.random_range(1..vars);
    let total = vars + checks;
    // Prüfer-free construction: attach nodes one by one to an earlier node of
    // the other kind, keeping the graph bipartite and acyclic.
    let mut h = BitMatrix::zeros(checks, vars);
    let kinds: Vec<bool> = (0..total).map(|i| i >= vars).collect();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by_key(|&i| (rng.random::<u32>(), i));
    // Ensure the first two nodes are of different kinds.
    let first_check = order.iter().position(|&i| kinds[i]).unwrap();
    order.swap(1, first_check.max(1));
    if kinds[order[0]] == kinds[order[1]] {
        let v = order.iter().position(|&i| !kinds[i]).unwrap();
        order.swap(0, v);
    }
    for idx in 1..order.len() {
        let node = order[idx];
        let candidates: Vec<usize> = order[..idx]
            .iter()
            .copied()
            .filter(|&m| kinds[m] != kinds[node])
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let other = candidates[rng.random_range(0..candidates.len())];
        let (c, v) = if kinds[node] { (node - vars, other) } else { (other - vars, node) };
        h.set(c, v, true);
    }
    h
}

/// Exact per-bit log-likelihood ratios `ln P(e_i = 0 | s) / P(e_i = 1 | s)`
/// and the min-cost (max-marginal) version.
fn brute_force_marginals(h: &BitMatrix, s: &BitVec, prior: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = h.cols();
    let mut p0 = vec![0.0; n];
    let mut p1 = vec![0.0; n];
    let mut c0 = vec![f64::INFINITY; n];
    let mut c1 = vec![f64::INFINITY; n];
    for e in all_vectors(n) {
        if &h.mul_vec(&e).unwrap() != s {
            continue;
        }
        let w: f64 = (0..n)
            .map(|i| if e.get(i) { prior[i] } else { 1.0 - prior[i] })
            .product();
        let c = cost(&e, prior);
        for i in 0..n {
            if e.get(i) {
                p1[i] += w;
                c1[i] = c1[i].min(c);
            } else {
                p0[i] += w;
                c0[i] = c0[i].min(c);
            }
        }
    }
    let exact = (0..n).map(|i| (p0[i] / p1[i]).ln()).collect();
    let maxmarg = (0..n).map(|i| c1[i] - c0[i]).collect();
    (exact, maxmarg)
}

#[test]
fn bp_on_trees_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 300 {
        let h = random_tree(&mut rng);
        if (0..h.cols()).any(|c| h.col_weight(c) == 0) {
            continue;
        }
        let e = random_vec(h.cols(), 0.3, &mut rng);
        let s = h.mul_vec(&e).unwrap();
        let prior: Vec<f64> = (0..h.cols()).map(|_| rng.random_range(0.05..0.45)).collect();
        let (exact, maxmarg) = brute_force_marginals(&h, &s, &prior);
        let depth = h.rows() + h.cols();
        for (variant, target) in [(BpVariant::ProductSum, &exact), (BpVariant::MinSum, &maxmarg)] {
            let cfg = DecoderConfig {
                bp_variant: variant,
                post: PostKind::None,
                ..DecoderConfig::default()
            };
            let mut dec = Decoder::new(&h, cfg).unwrap();
            let llrs = dec.llrs_after(&s, &Prior::new(prior.clone(), 1e-12), depth).unwrap();
            for (i, (&got, &want)) in llrs.iter().zip(target.iter()).enumerate() {
                if want.abs() > 1e-9 {
                    assert_eq!(got > 0.0, want > 0.0, "{variant:?} bit {i}: {got} vs {want}");
                }
                if variant == BpVariant::ProductSum && want.abs() < 40.0 {
                    assert!((got - want).abs() < 1e-6, "bit {i}: {got} vs {want}");
                }
            }
        }
        checked += 1;
    }
}

#[test]
fn reliability_order_and_osd0_survive_affine_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let cols = rng.random_range(2..=12);
        let rows = rng.random_range(1..=cols);
        let h = random_matrix(rows, cols, 0.4, &mut rng);
        let s = h.mul_vec(&random_vec(cols, 0.3, &mut rng)).unwrap();
        let post = random_posterior(cols, &mut rng);
        let scale = rng.random_range(0.1..2.0);
        let shift = rng.random_range(-0.005..0.005);
        let mapped: Vec<f64> = post.iter().map(|&p| scale * p + shift).collect();
        assert_eq!(reliability_order(&post), reliability_order(&mapped));
        let order = reliability_order(&post);
        assert_eq!(
            h.echelonize(&order).unwrap().pivot_cols,
            h.echelonize(&reliability_order(&mapped)).unwrap().pivot_cols
        );
        assert_eq!(
            osd(&h, &s, &post, OsdPolicy::Zero).unwrap(),
            osd(&h, &s, &mapped, OsdPolicy::Zero).unwrap()
        );
    }
}

#[test]
fn post_processing_rescues_a_conflicting_prior() {
    let h = BitMatrix::from_dense(&[[1u8, 1, 0], [0, 1, 1]]);
    let s = BitVec::from_bytes(&[1, 1]);
    let prior = Prior::new(vec![0.45, 0.01, 0.45], 1e-9);
    let cfg = DecoderConfig {
        max_iter: MaxIter::Fixed(1),
        ..DecoderConfig::default()
    };
    let out = decode(&h, &s, &prior, &cfg).unwrap();
    assert!(out.converged);
    assert_eq!(h.mul_vec(&out.estimate).unwrap(), s);
}

#[test]
fn without_post_processing_failure_keeps_the_hard_decision() {
    let h = BitMatrix::from_dense(&[[1u8, 1], [1, 1]]);
    let s = BitVec::from_bytes(&[1, 0]);
    let cfg = DecoderConfig {
        post: PostKind::None,
        ..DecoderConfig::default()
    };
    let prior = Prior::uniform(2, 0.1);
    let bp = bp_decode(&h, &s, &prior, &cfg).unwrap();
    let full = decode(&h, &s, &prior, &cfg).unwrap();
    assert!(!full.converged);
    assert_eq!(bp, full);
    // An unreachable syndrome also fails OSD; the outcome is still returned.
    let out = decode(&h, &s, &prior, &DecoderConfig::bp_osd(3)).unwrap();
    assert!(!out.converged);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Whatever the configuration, a converged outcome matches the syndrome.
    #[test]
    fn converged_means_syndrome_match(
        seed in any::<u64>(),
        post in prop_oneof![Just(PostKind::None), Just(PostKind::Osd0), Just(PostKind::OsdCs), Just(PostKind::LsdCs)],
        variant in prop_oneof![Just(BpVariant::MinSum), Just(BpVariant::ProductSum)],
        reachable in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = rng.random_range(1..=30);
        let rows = rng.random_range(1..=30);
        let h = random_matrix(rows, cols, 0.2, &mut rng);
        let s = if reachable {
            h.mul_vec(&random_vec(cols, 0.2, &mut rng)).unwrap()
        } else {
            random_vec(rows, 0.3, &mut rng)
        };
        let prior = Prior::new(random_posterior(cols, &mut rng), 1e-9);
        let cfg = DecoderConfig { post, bp_variant: variant, ..DecoderConfig::default() };
        let out = decode(&h, &s, &prior, &cfg).unwrap();
        prop_assert_eq!(out.converged, h.mul_vec(&out.estimate).unwrap() == s);
        prop_assert!(out.posterior.iter().all(|p| (0.0..=1.0).contains(p)));
        if reachable && post != PostKind::None {
            prop_assert!(out.converged);
        }
    }
}
