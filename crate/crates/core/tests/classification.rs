mod common;

use common::{random_vec, row_combinations};
use qtanner_core::channel::{
    classify_residual, sample_depolarizing, syndrome, trial_rng, Classifier, ErrorType, Verdict,
};
use qtanner_core::codes::LinearCode;
use qtanner_core::complex::{construct, FaceMode, FiniteGroup, GeneratorSets, TannerCode};
use qtanner_core::BitVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn small_codes() -> Vec<TannerCode> {
    let rep = LinearCode::builtin("rep3").unwrap();
    let rep2 = LinearCode::builtin("rep2").unwrap();
    let z4 = FiniteGroup::cyclic(4).unwrap();
    let z3 = FiniteGroup::cyclic(3).unwrap();
    let z8 = FiniteGroup::cyclic(8).unwrap();
    vec![
        construct(
            &z4,
            &GeneratorSets::new(&z4, vec![0, 1, 3], vec![1, 2, 3]).unwrap(),
            FaceMode::Tuple,
            &rep,
            &rep.dual(),
        )
        .unwrap(),
        construct(
            &z3,
            &GeneratorSets::new(&z3, vec![0, 1, 2], vec![0, 1, 2]).unwrap(),
            FaceMode::Tuple,
            &rep,
            &rep,
        )
        .unwrap(),
        construct(
            &z8,
            &GeneratorSets::new(&z8, vec![1, 7], vec![2, 6]).unwrap(),
            FaceMode::Quotient,
            &rep2,
            &rep2.dual(),
        )
        .unwrap(),
    ]
}

/// Verdict from explicit enumeration of the stabilizer group.
fn oracle(stabilizers: &HashSet<BitVec>, code: &TannerCode, t: ErrorType, r: &BitVec) -> Verdict {
    if !code.check_matrix(t).mul_vec(r).unwrap().is_zero() {
        Verdict::DecodeFailure
    } else if stabilizers.contains(r) {
        Verdict::Success
    } else {
        Verdict::LogicalFailure
    }
}

#[test]
fn classifier_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for code in small_codes() {
        assert!(code.n <= 40);
        let classifier = Classifier::new(&code);
        for t in ErrorType::BOTH {
            let basis = code.stabilizers(t).row_basis();
            let group: HashSet<BitVec> = row_combinations(&basis).into_iter().collect();
            let kernel = code.check_matrix(t).kernel();
            let mut counts = [0usize; 3];
            for i in 0..1000 {
                // Mix plain random residuals with kernel elements so all three
                // verdicts occur.
                let r = match i % 3 {
                    0 => random_vec(code.n, 0.2, &mut rng),
                    1 => {
                        let mut v = BitVec::zeros(code.n);
                        for row in 0..kernel.rows() {
                            if rng.random_bool(0.5) {
                                v.xor_assign(&kernel.row(row));
                            }
                        }
                        v
                    }
                    _ => {
                        let mut v = BitVec::zeros(code.n);
                        for row in 0..basis.rows() {
                            if rng.random_bool(0.5) {
                                v.xor_assign(&basis.row(row));
                            }
                        }
                        v
                    }
                };
                let want = oracle(&group, &code, t, &r);
                assert_eq!(classifier.classify(&code, t, &r).unwrap(), want);
                assert_eq!(classify_residual(&code, t, &r).unwrap(), want);
                counts[want as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c > 0) || code.k == 0, "{counts:?}");
        }
    }
}

#[test]
fn depolarizing_marginals() {
    let n = 200_000;
    let p = 0.3;
    let e = sample_depolarizing(n, p, &mut trial_rng(5, p, 0)).unwrap();
    let tol = |q: f64| 5.0 * (q * (1.0 - q) / n as f64).sqrt();
    let fx = e.ex.weight() as f64 / n as f64;
    let fz = e.ez.weight() as f64 / n as f64;
    let fy = e.ex.iter_ones().filter(|&i| e.ez.get(i)).count() as f64 / n as f64;
    assert!((fx - 0.2).abs() < tol(0.2), "{fx}");
    assert!((fz - 0.2).abs() < tol(0.2), "{fz}");
    assert!((fy - 0.1).abs() < tol(0.1), "{fy}");
}

#[test]
fn syndromes_follow_css_pairing() {
    let code = &small_codes()[0];
    let e = sample_depolarizing(code.n, 0.2, &mut trial_rng(1, 0.2, 3)).unwrap();
    let syn = syndrome(code, &e).unwrap();
    assert_eq!(syn.of(ErrorType::Z), &code.hx.mul_vec(&e.ez).unwrap());
    assert_eq!(syn.of(ErrorType::X), &code.hz.mul_vec(&e.ex).unwrap());
    for r in 0..code.hz.rows() {
        assert!(code.hx.mul_vec(&code.hz.row(r)).unwrap().is_zero());
    }
}
