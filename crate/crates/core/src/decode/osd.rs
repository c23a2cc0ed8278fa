//! Ordered-statistics post-processing.

use alloc::format;
use alloc::vec::Vec;

use crate::gf2::{back_substitute, gauss, BitMatrix, BitVec};
use crate::{Error, Result};

/// Largest non-pivot set accepted by [`OsdPolicy::Exhaustive`].
pub const MAX_EXHAUSTIVE_BITS: usize = 20;

/// Which patterns on the non-pivot columns are tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OsdPolicy {
    /// Only the all-zero pattern.
    Zero,
    /// Zero, every weight-1 pattern, and every weight-2 pattern inside the
    /// first `order` non-pivot columns.
    CombinationSweep { order: usize },
    /// Every pattern on the non-pivot set.
    Exhaustive,
}

/// Probabilities are held away from 0 and 1 before taking log-odds.
const COST_EPS: f64 = 1e-15;

/// Per-bit cost `ln((1 - p) / p)` of setting a bit.
#[inline]
pub fn bit_cost(p: f64) -> f64 {
    let p = p.clamp(COST_EPS, 1.0 - COST_EPS);
    libm::log((1.0 - p) / p)
}

/// Sum of [`bit_cost`] over the support of `e`.
pub fn soft_cost(e: &BitVec, posterior: &[f64]) -> f64 {
    e.iter_ones().map(|i| bit_cost(posterior[i])).sum()
}

/// Columns by decreasing posterior, ties to the lower index.
pub fn reliability_order(posterior: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..posterior.len()).collect();
    order.sort_by(|&a, &b| posterior[b].total_cmp(&posterior[a]).then(a.cmp(&b)));
    order
}

/// Finds `e` with `h · e = s` of low soft cost under `policy`.
pub fn osd(h: &BitMatrix, s: &BitVec, posterior: &[f64], policy: OsdPolicy) -> Result<BitVec> {
    if s.len() != h.rows() {
        return Err(Error::Dimension {
            context: "osd syndrome",
            expected: h.rows(),
            found: s.len(),
        });
    }
    if posterior.len() != h.cols() {
        return Err(Error::Dimension {
            context: "osd posterior",
            expected: h.cols(),
            found: posterior.len(),
        });
    }
    let order = reliability_order(posterior);
    let mut work = h.clone();
    let mut rhs = s.clone();
    let pivots = gauss(&mut work, order.iter().copied(), &mut rhs, true);
    let base = back_substitute(&pivots, &rhs, h.cols())
        .ok_or(Error::PostProcess("syndrome outside the column space"))?;
    if policy == OsdPolicy::Zero {
        return Ok(base);
    }

    let rank = pivots.len();
    let mut is_pivot = alloc::vec![false; h.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = order.iter().copied().filter(|&c| !is_pivot[c]).collect();
    if free.is_empty() {
        return Ok(base);
    }
    // Column `t` of the reduced matrix, restricted to pivot rows: the pivot
    // bits that flip when non-pivot bit `t` is set.
    let flips: Vec<BitVec> = free
        .iter()
        .map(|&t| {
            let mut col = BitVec::zeros(rank);
            for r in 0..rank {
                if work.get(r, t) {
                    col.set(r, true);
                }
            }
            col
        })
        .collect();
    let weights: Vec<f64> = posterior.iter().map(|&p| bit_cost(p)).collect();
    // Flipping pivot row r changes the cost by delta[r].
    let delta: Vec<f64> = pivots
        .iter()
        .enumerate()
        .map(|(r, &p)| if rhs.get(r) { -weights[p] } else { weights[p] })
        .collect();

    let mut search = Search {
        free: &free,
        flips: &flips,
        weights: &weights,
        delta: &delta,
        scratch: BitVec::zeros(rank),
        best_cost: 0.0,
        best: Vec::new(),
    };
    match policy {
        OsdPolicy::Zero => unreachable!(),
        OsdPolicy::CombinationSweep { order } => {
            for i in 0..free.len() {
                search.try_pattern(&[i]);
            }
            let lambda = order.min(free.len());
            for i in 0..lambda {
                for j in i + 1..lambda {
                    search.try_pattern(&[i, j]);
                }
            }
        }
        OsdPolicy::Exhaustive => {
            if free.len() > MAX_EXHAUSTIVE_BITS {
                return Err(Error::InvalidParameter(format!(
                    "exhaustive OSD over {} free columns",
                    free.len()
                )));
            }
            let mut pattern = Vec::with_capacity(free.len());
            for mask in 1u32..1 << free.len() {
                pattern.clear();
                pattern.extend((0..free.len()).filter(|&i| mask >> i & 1 == 1));
                search.try_pattern(&pattern);
            }
        }
    }

    let mut e = base;
    let mut pivot_flip = BitVec::zeros(rank);
    for &i in &search.best {
        e.set(free[i], true);
        pivot_flip.xor_assign(&flips[i]);
    }
    for r in pivot_flip.iter_ones() {
        e.flip(pivots[r]);
    }
    Ok(e)
}

/// Tracks the cheapest pattern relative to the zero pattern.
struct Search<'a> {
    free: &'a [usize],
    flips: &'a [BitVec],
    weights: &'a [f64],
    delta: &'a [f64],
    scratch: BitVec,
    best_cost: f64,
    best: Vec<usize>,
}

impl Search<'_> {
    fn try_pattern(&mut self, pattern: &[usize]) {
        self.scratch.clear();
        let mut cost = 0.0;
        for &i in pattern {
            cost += self.weights[self.free[i]];
            self.scratch.xor_assign(&self.flips[i]);
        }
        for r in self.scratch.iter_ones() {
            cost += self.delta[r];
        }
        if cost < self.best_cost {
            self.best_cost = cost;
            self.best.clear();
            self.best.extend_from_slice(pattern);
        }
    }
}
