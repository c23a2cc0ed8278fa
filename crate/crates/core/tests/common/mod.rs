//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use qtanner_core::decode::bit_cost;
use qtanner_core::{BitMatrix, BitVec};
use rand::Rng;

/// Every vector of length `n`, as bit masks.
pub fn all_vectors(n: usize) -> impl Iterator<Item = BitVec> {
    assert!(n <= 24);
    (0u32..1 << n).map(move |m| mask_to_vec(m as u64, n))
}

pub fn mask_to_vec(mask: u64, n: usize) -> BitVec {
    let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
    BitVec::from_bools(&bits)
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

/// Minimum soft cost over all solutions of `h · e = s`, or `None` when the
/// coset is empty.
pub fn coset_minimum(h: &BitMatrix, s: &BitVec, posterior: &[f64]) -> Option<f64> {
    all_vectors(h.cols())
        .filter(|e| &h.mul_vec(e).unwrap() == s)
        .map(|e| cost(&e, posterior))
        .min_by(f64::total_cmp)
}
