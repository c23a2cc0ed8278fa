//! Localized cluster post-processing.
//!
//! Clusters start at unsatisfied checks and absorb one qubit at a time, always
//! the most likely qubit on the frontier of any invalid cluster. A cluster is
//! valid once its local syndrome lies in the column space of its local check
//! matrix. Valid clusters are then solved independently by OSD.

use alloc::vec;
use alloc::vec::Vec;

use super::bp::Graph;
use super::osd::{osd, OsdPolicy};
use crate::gf2::{BitMatrix, BitVec};
use crate::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, Default)]
struct Cluster {
    checks: Vec<usize>,
    qubits: Vec<usize>,
    valid: bool,
    alive: bool,
}

/// Cluster decomposition followed by per-cluster combination-sweep OSD.
pub fn lsd(h: &BitMatrix, s: &BitVec, posterior: &[f64], order: usize) -> Result<BitVec> {
    lsd_with_graph(h, &Graph::new(h), s, posterior, order)
}

pub(crate) fn lsd_with_graph(
    h: &BitMatrix,
    graph: &Graph,
    s: &BitVec,
    posterior: &[f64],
    order: usize,
) -> Result<BitVec> {
    if s.len() != h.rows() {
        return Err(Error::Dimension {
            context: "lsd syndrome",
            expected: h.rows(),
            found: s.len(),
        });
    }
    if posterior.len() != h.cols() {
        return Err(Error::Dimension {
            context: "lsd posterior",
            expected: h.cols(),
            found: posterior.len(),
        });
    }
    let clusters = grow_clusters(h, graph, s, posterior)?;
    let mut e = BitVec::zeros(h.cols());
    for cl in clusters.iter().filter(|c| c.alive) {
        let mut rows = cl.checks.clone();
        let mut cols = cl.qubits.clone();
        rows.sort_unstable();
        cols.sort_unstable();
        let sub = h.submatrix(&rows, &cols);
        let local_s = s.gather(&rows);
        let local_p: Vec<f64> = cols.iter().map(|&c| posterior[c]).collect();
        let local = osd(&sub, &local_s, &local_p, OsdPolicy::CombinationSweep { order })?;
        for i in local.iter_ones() {
            e.set(cols[i], true);
        }
    }
    Ok(e)
}

/// The final clusters as `(checks, qubits)`, each sorted, before any
/// per-cluster solve.
pub fn lsd_clusters(h: &BitMatrix, s: &BitVec, posterior: &[f64]) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if s.len() != h.rows() || posterior.len() != h.cols() {
        return Err(Error::Dimension {
            context: "lsd inputs",
            expected: h.rows(),
            found: s.len(),
        });
    }
    let clusters = grow_clusters(h, &Graph::new(h), s, posterior)?;
    Ok(clusters
        .into_iter()
        .filter(|c| c.alive)
        .map(|c| {
            let (mut checks, mut qubits) = (c.checks, c.qubits);
            checks.sort_unstable();
            qubits.sort_unstable();
            (checks, qubits)
        })
        .collect())
}

fn grow_clusters(
    h: &BitMatrix,
    graph: &Graph,
    s: &BitVec,
    posterior: &[f64],
) -> Result<Vec<Cluster>> {
    let mut check_owner = vec![NONE; h.rows()];
    let mut qubit_owner = vec![NONE; h.cols()];
    let mut clusters: Vec<Cluster> = Vec::new();
    for c in s.iter_ones() {
        check_owner[c] = clusters.len();
        clusters.push(Cluster {
            checks: vec![c],
            qubits: Vec::new(),
            valid: false,
            alive: true,
        });
    }
    let mut seen = vec![false; h.cols()];
    loop {
        // Highest-posterior frontier qubit over all invalid clusters.
        let mut pick: Option<(usize, usize)> = None;
        let mut any_invalid = false;
        for (ci, cl) in clusters.iter().enumerate() {
            if !cl.alive || cl.valid {
                continue;
            }
            any_invalid = true;
            let mut frontier_found = false;
            for &c in &cl.checks {
                for &q in graph.vars_of(c) {
                    if qubit_owner[q] == ci || seen[q] {
                        continue;
                    }
                    seen[q] = true;
                    frontier_found = true;
                    let better = match pick {
                        None => true,
                        Some((_, best)) => {
                            posterior[q] > posterior[best]
                                || (posterior[q] == posterior[best] && q < best)
                        }
                    };
                    if better {
                        pick = Some((ci, q));
                    }
                }
            }
            for &c in &cl.checks {
                for &q in graph.vars_of(c) {
                    seen[q] = false;
                }
            }
            if !frontier_found {
                // Every check of every member qubit is already inside, so no
                // growth can ever make this cluster valid.
                return Err(Error::PostProcess("cluster cannot be grown to validity"));
            }
        }
        if !any_invalid {
            return Ok(clusters);
        }
        let (ci, q) = pick.expect("an invalid cluster has a frontier");
        let target = absorb(&mut clusters, &mut check_owner, &mut qubit_owner, graph, ci, q);
        clusters[target].valid = is_valid(h, s, &clusters[target]);
    }
}

/// Adds qubit `q` and its checks to cluster `ci`, merging every cluster met
/// on the way. Returns the surviving cluster index.
fn absorb(
    clusters: &mut [Cluster],
    check_owner: &mut [usize],
    qubit_owner: &mut [usize],
    graph: &Graph,
    ci: usize,
    q: usize,
) -> usize {
    let mut target = merge(clusters, check_owner, qubit_owner, ci, qubit_owner[q]);
    if qubit_owner[q] == NONE {
        qubit_owner[q] = target;
        clusters[target].qubits.push(q);
    }
    for &c in graph.checks_of(q) {
        if check_owner[c] == NONE {
            check_owner[c] = target;
            clusters[target].checks.push(c);
        } else {
            target = merge(clusters, check_owner, qubit_owner, target, check_owner[c]);
        }
    }
    target
}

/// Merges cluster `other` into `target` (or the reverse, keeping the larger
/// one). Returns the surviving index.
fn merge(
    clusters: &mut [Cluster],
    check_owner: &mut [usize],
    qubit_owner: &mut [usize],
    target: usize,
    other: usize,
) -> usize {
    if other == NONE || other == target {
        return target;
    }
    let size = |c: &Cluster| c.checks.len() + c.qubits.len();
    let (keep, gone) = if size(&clusters[target]) >= size(&clusters[other]) {
        (target, other)
    } else {
        (other, target)
    };
    let moved = core::mem::take(&mut clusters[gone]);
    for &c in &moved.checks {
        check_owner[c] = keep;
    }
    for &x in &moved.qubits {
        qubit_owner[x] = keep;
    }
    clusters[keep].checks.extend(moved.checks);
    clusters[keep].qubits.extend(moved.qubits);
    clusters[keep].valid = false;
    keep
}

fn is_valid(h: &BitMatrix, s: &BitVec, cl: &Cluster) -> bool {
    let sub = h.submatrix(&cl.checks, &cl.qubits);
    let local_s = s.gather(&cl.checks);
    sub.solve(&local_s).is_ok_and(|x| x.is_some())
}
