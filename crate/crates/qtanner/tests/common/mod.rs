//! Codes and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use qtanner_core::codes::LinearCode;
use qtanner_core::complex::{construct, CodeMeta, FaceMode, FiniteGroup, GeneratorSets, TannerCode, ViewCover};
use qtanner_core::decode::bit_cost;
use qtanner_core::{BitMatrix, BitVec};
use rand::Rng;

/// The [[36,8]] instance on Z4 with A = {0,1,3}, B = {1,2,3}.
pub fn z4_code() -> TannerCode {
    let g = FiniteGroup::cyclic(4).unwrap();
    let gens = GeneratorSets::new(&g, vec![0, 1, 3], vec![1, 2, 3]).unwrap();
    let rep = LinearCode::builtin("rep3").unwrap();
    let mut code = construct(&g, &gens, FaceMode::Tuple, &rep, &rep.dual()).unwrap();
    code.meta.set("name", "z4-rep3");
    code
}

/// The [[252,18]] instance on Z7 with A = B = {1..6} and the [6,3] code.
pub fn z7() -> TannerCode {
    let g = FiniteGroup::cyclic(7).unwrap();
    let gens = GeneratorSets::new(&g, (1..7).collect(), (1..7).collect()).unwrap();
    let eq6 = LinearCode::builtin("rand_eq6").unwrap();
    let mut code = construct(&g, &gens, FaceMode::Tuple, &eq6, &eq6.dual()).unwrap();
    code.meta.set("name", "z7-rand_eq6");
    code
}

/// `n` qubits and no checks: every nonzero error component is logical.
pub fn checkless(n: usize) -> TannerCode {
    let h = BitMatrix::zeros(0, n);
    let cover = ViewCover::from_rows(&h, Vec::new()).unwrap();
    let mut meta = CodeMeta::default();
    meta.set("name", format!("checkless-{n}"));
    TannerCode::new(h.clone(), h, cover.clone(), cover, meta).unwrap()
}

pub fn mask_to_vec(mask: u64, n: usize) -> BitVec {
    let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
    BitVec::from_bools(&bits)
}

pub fn all_vectors(n: usize) -> impl Iterator<Item = BitVec> {
    assert!(n <= 24);
    (0u32..1 << n).map(move |m| mask_to_vec(m as u64, n))
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, density: f64, rng: &mut R) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, rng.random_bool(density));
        }
    }
    m
}

pub fn random_vec<R: Rng>(n: usize, density: f64, rng: &mut R) -> BitVec {
    let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(density)).collect();
    BitVec::from_bools(&bits)
}

pub fn cost(e: &BitVec, posterior: &[f64]) -> f64 {
    e.iter_ones().map(|i| bit_cost(posterior[i])).sum()
}

/// Minimum soft cost over all solutions of `h · e = s`.
pub fn coset_minimum(h: &BitMatrix, s: &BitVec, posterior: &[f64]) -> Option<f64> {
    all_vectors(h.cols())
        .filter(|e| &h.mul_vec(e).unwrap() == s)
        .map(|e| cost(&e, posterior))
        .min_by(f64::total_cmp)
}

/// All GF(2) combinations of the rows of `m`.
pub fn row_combinations(m: &BitMatrix) -> Vec<BitVec> {
    assert!(m.rows() <= 20);
    (0u32..1 << m.rows())
        .map(|mask| {
            let mut v = BitVec::zeros(m.cols());
            for r in 0..m.rows() {
                if mask >> r & 1 == 1 {
                    v.xor_assign(&m.row(r));
                }
            }
            v
        })
        .collect()
}
