//! Syndrome-matching belief propagation over a fixed Tanner graph.

use alloc::vec;
use alloc::vec::Vec;

use super::{BpVariant, Schedule};
use crate::gf2::{BitMatrix, BitVec};

/// Magnitude bound for all messages.
pub const LLR_CLIP: f64 = 50.0;

#[inline]
fn clip(x: f64) -> f64 {
    x.clamp(-LLR_CLIP, LLR_CLIP)
}

/// `ln((1 - p) / p)`, clipped.
#[inline]
pub fn llr(p: f64) -> f64 {
    clip(libm::log((1.0 - p) / p))
}

/// Logistic map from an LLR back to an error probability.
#[inline]
pub fn posterior(l: f64) -> f64 {
    1.0 / (1.0 + libm::exp(l))
}

/// Compressed adjacency of a check matrix. Edges are numbered check by check.
#[derive(Clone, Debug)]
pub(crate) struct Graph {
    pub rows: usize,
    pub cols: usize,
    pub check_ptr: Vec<usize>,
    pub edge_var: Vec<usize>,
    pub var_ptr: Vec<usize>,
    pub var_edges: Vec<usize>,
    /// Owning check of each entry of `var_edges`.
    pub var_checks: Vec<usize>,
}

impl Graph {
    pub fn new(h: &BitMatrix) -> Self {
        let mut check_ptr = Vec::with_capacity(h.rows() + 1);
        let mut edge_var = Vec::new();
        check_ptr.push(0);
        let mut degree = vec![0usize; h.cols()];
        for r in 0..h.rows() {
            for c in h.row_ones(r) {
                edge_var.push(c);
                degree[c] += 1;
            }
            check_ptr.push(edge_var.len());
        }
        let mut var_ptr = Vec::with_capacity(h.cols() + 1);
        var_ptr.push(0);
        for d in &degree {
            var_ptr.push(var_ptr.last().unwrap() + d);
        }
        let mut fill = var_ptr[..h.cols()].to_vec();
        let mut var_edges = vec![0; edge_var.len()];
        let mut var_checks = vec![0; edge_var.len()];
        for c in 0..h.rows() {
            for e in check_ptr[c]..check_ptr[c + 1] {
                let v = edge_var[e];
                var_edges[fill[v]] = e;
                var_checks[fill[v]] = c;
                fill[v] += 1;
            }
        }
        Self {
            rows: h.rows(),
            cols: h.cols(),
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
            var_checks,
        }
    }

    #[inline]
    pub fn checks_of(&self, v: usize) -> &[usize] {
        &self.var_checks[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    #[inline]
    pub fn vars_of(&self, c: usize) -> &[usize] {
        &self.edge_var[self.check_ptr[c]..self.check_ptr[c + 1]]
    }
}

/// Message buffers reused across decodes.
#[derive(Clone, Debug)]
pub(crate) struct BpEngine {
    pub graph: Graph,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    channel: Vec<f64>,
    /// Posterior LLR per variable after the last iteration.
    pub total: Vec<f64>,
    pub hard: Vec<u8>,
    syn: Vec<u8>,
    prefix: Vec<f64>,
}

impl BpEngine {
    pub fn new(h: &BitMatrix) -> Self {
        let graph = Graph::new(h);
        let edges = graph.edge_var.len();
        let max_deg = (0..graph.rows)
            .map(|c| graph.check_ptr[c + 1] - graph.check_ptr[c])
            .max()
            .unwrap_or(0);
        Self {
            c2v: vec![0.0; edges],
            v2c: vec![0.0; edges],
            channel: vec![0.0; graph.cols],
            total: vec![0.0; graph.cols],
            hard: vec![0; graph.cols],
            syn: vec![0; graph.rows],
            prefix: vec![0.0; max_deg + 1],
            graph,
        }
    }

    /// Runs up to `max_iter` iterations (at least one). With `stop_early`,
    /// returns as soon as the hard decision matches `s`. Returns the number of
    /// iterations executed and whether the final hard decision matches.
    pub fn run(
        &mut self,
        s: &BitVec,
        prior: &[f64],
        variant: BpVariant,
        schedule: Schedule,
        ms_scale: f64,
        max_iter: usize,
        stop_early: bool,
    ) -> (usize, bool) {
        for (i, &p) in prior.iter().enumerate() {
            self.channel[i] = llr(p);
        }
        for c in 0..self.graph.rows {
            self.syn[c] = u8::from(s.get(c));
        }
        match schedule {
            Schedule::Flooding => {
                for v in 0..self.graph.cols {
                    for &e in &self.graph.var_edges[self.graph.var_ptr[v]..self.graph.var_ptr[v + 1]] {
                        self.v2c[e] = self.channel[v];
                    }
                }
            }
            Schedule::Serial => {
                self.total.copy_from_slice(&self.channel);
                self.c2v.iter_mut().for_each(|m| *m = 0.0);
            }
        }
        let max_iter = max_iter.max(1);
        let mut matched = false;
        let mut it = 0;
        while it < max_iter {
            it += 1;
            match schedule {
                Schedule::Flooding => self.flooding_step(variant, ms_scale),
                Schedule::Serial => self.serial_step(variant, ms_scale),
            }
            for v in 0..self.graph.cols {
                self.hard[v] = u8::from(self.total[v] < 0.0);
            }
            matched = self.syndrome_matches();
            if matched && stop_early {
                break;
            }
        }
        (it, matched)
    }

    fn syndrome_matches(&self) -> bool {
        (0..self.graph.rows).all(|c| {
            let parity = self.graph.vars_of(c).iter().fold(0u8, |acc, &v| acc ^ self.hard[v]);
            parity == self.syn[c]
        })
    }

    fn flooding_step(&mut self, variant: BpVariant, ms_scale: f64) {
        for c in 0..self.graph.rows {
            let (lo, hi) = (self.graph.check_ptr[c], self.graph.check_ptr[c + 1]);
            check_update(
                &self.v2c[lo..hi],
                &mut self.c2v[lo..hi],
                self.syn[c] == 1,
                variant,
                ms_scale,
                &mut self.prefix,
            );
        }
        for v in 0..self.graph.cols {
            let edges = &self.graph.var_edges[self.graph.var_ptr[v]..self.graph.var_ptr[v + 1]];
            let sum = self.channel[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
            self.total[v] = sum;
            for &e in edges {
                self.v2c[e] = sum - self.c2v[e];
            }
        }
    }

    fn serial_step(&mut self, variant: BpVariant, ms_scale: f64) {
        for c in 0..self.graph.rows {
            let (lo, hi) = (self.graph.check_ptr[c], self.graph.check_ptr[c + 1]);
            for e in lo..hi {
                self.v2c[e] = self.total[self.graph.edge_var[e]] - self.c2v[e];
            }
            check_update(
                &self.v2c[lo..hi],
                &mut self.c2v[lo..hi],
                self.syn[c] == 1,
                variant,
                ms_scale,
                &mut self.prefix,
            );
            for e in lo..hi {
                self.total[self.graph.edge_var[e]] = self.v2c[e] + self.c2v[e];
            }
        }
    }
}

/// Check-to-variable messages of one check from its incoming messages.
#[inline]
fn check_update(
    incoming: &[f64],
    out: &mut [f64],
    flipped: bool,
    variant: BpVariant,
    ms_scale: f64,
    prefix: &mut [f64],
) {
    let deg = incoming.len();
    if deg == 0 {
        return;
    }
    if deg == 1 {
        out[0] = if flipped { -LLR_CLIP } else { LLR_CLIP };
        return;
    }
    match variant {
        BpVariant::MinSum => {
            let mut negative = flipped;
            let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, 0);
            for (i, &q) in incoming.iter().enumerate() {
                negative ^= q < 0.0;
                let a = q.abs();
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = i;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for (i, (&q, r)) in incoming.iter().zip(out.iter_mut()).enumerate() {
                let mag = ms_scale * if i == arg { min2 } else { min1 };
                let neg = negative ^ (q < 0.0);
                *r = clip(if neg { -mag } else { mag });
            }
        }
        BpVariant::ProductSum => {
            // prefix[i] = product of tanh over entries before i.
            prefix[0] = 1.0;
            for (i, &q) in incoming.iter().enumerate() {
                prefix[i + 1] = prefix[i] * libm::tanh(q / 2.0);
            }
            let mut suffix = 1.0;
            for i in (0..deg).rev() {
                let prod = prefix[i] * suffix;
                let r = 2.0 * libm::atanh(prod);
                out[i] = clip(if flipped { -r } else { r });
                suffix *= libm::tanh(incoming[i] / 2.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_adjacency() {
        let h = BitMatrix::from_dense(&[[1u8, 1, 0], [0, 1, 1]]);
        let g = Graph::new(&h);
        assert_eq!(g.vars_of(1), [1, 2]);
        assert_eq!(g.checks_of(1), [0, 1]);
        assert_eq!(g.checks_of(2), [1]);
    }

    #[test]
    fn llr_round_trip() {
        for p in [0.01, 0.2, 0.5, 0.9] {
            assert!((posterior(llr(p)) - p).abs() < 1e-12);
        }
        assert_eq!(llr(1e-30), LLR_CLIP);
    }

    #[test]
    fn product_sum_with_saturated_inputs_stays_finite() {
        let mut out = [0.0; 3];
        let mut prefix = [0.0; 4];
        check_update(&[LLR_CLIP, LLR_CLIP, -3.0], &mut out, false, BpVariant::ProductSum, 1.0, &mut prefix);
        assert!(out.iter().all(|x| x.is_finite()));
        assert_eq!(out[2], LLR_CLIP);
        assert!(out[0] < 0.0);
    }
}
