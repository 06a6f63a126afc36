//! One-way communication demo: labeled vertices against a directed
//! matching.
//!
//! One party holds `n` labeled vertices, the other a vertex-disjoint set of
//! directed edges plus a target label pair `(i, j)` and wants the number of
//! matching edges whose head is labeled `i` and tail `j`. The quantum
//! protocol sends `k` copies of a labeled-vertex superposition; measuring a
//! copy against an edge's paired projectors returns the `+` combination
//! with probability `1/n` when both labels are correct and either sign
//! with probability `1/(4n)` when exactly one is, so adding `n/k` per `+`
//! hit and subtracting per `-` hit is unbiased. The classical baseline
//! samples vertices and rescales by the pair-inclusion probability.

use rand::Rng;

use crate::exact::ceil_log2;
use crate::seeds::rng_from;
use crate::{QdError, Result};

/// Vertex labels `0..n -> label`.
#[derive(Debug, Clone)]
pub struct LabeledVertices {
    labels: Vec<u32>,
}

impl LabeledVertices {
    pub fn new(labels: Vec<u32>) -> Self {
        Self { labels }
    }

    pub fn n(&self) -> u32 {
        self.labels.len() as u32
    }

    pub fn label(&self, v: u32) -> u32 {
        self.labels[v as usize]
    }
}

/// A set of vertex-disjoint directed edges.
#[derive(Debug, Clone)]
pub struct DirectedMatching {
    edges: Vec<(u32, u32)>,
}

impl DirectedMatching {
    pub fn new(edges: Vec<(u32, u32)>, n: u32) -> Result<Self> {
        let mut seen = vec![false; n as usize];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(QdError::Param(format!("matching endpoint out of range: {u} -> {v}")));
            }
            if u == v {
                return Err(QdError::Param(format!("matching self-loop at {u}")));
            }
            for w in [u, v] {
                if seen[w as usize] {
                    return Err(QdError::Param(format!("matching reuses vertex {w}")));
                }
                seen[w as usize] = true;
            }
        }
        Ok(Self { edges })
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
}

/// Exact count of matching edges with head labeled `i` and tail labeled `j`.
pub fn protocol_truth(matching: &DirectedMatching, labels: &LabeledVertices, i: u32, j: u32) -> u64 {
    matching
        .edges()
        .iter()
        .filter(|&&(u, v)| labels.label(u) == i && labels.label(v) == j)
        .count() as u64
}

/// Simulates `k` copies of the quantum protocol and returns the estimate.
///
/// Per copy the measurement outcome distribution over the matching's
/// projector pairs is exact: a both-correct edge returns its `+` outcome
/// with probability `1/n`, a one-correct edge returns `+` or `-` with
/// probability `1/(4n)` each, and everything else falls through to the
/// complement.
pub fn quantum_protocol_estimate(
    matching: &DirectedMatching,
    labels: &LabeledVertices,
    i: u32,
    j: u32,
    k: u64,
    seed: u64,
) -> Result<f64> {
    if k < 1 {
        return Err(QdError::Param("need at least one copy".into()));
    }
    let n = labels.n() as u64;
    if n == 0 {
        return Err(QdError::Param("need at least one vertex".into()));
    }
    // weights over denominator 4n: both-correct edge -> 4 on the plus
    // outcome; one-correct -> 1 on each sign
    let mut outcomes: Vec<(u64, f64)> = Vec::new();
    for &(u, v) in matching.edges() {
        let correct = (labels.label(u) == i) as u8 + (labels.label(v) == j) as u8;
        match correct {
            2 => outcomes.push((4, 1.0)),
            1 => {
                outcomes.push((1, 1.0));
                outcomes.push((1, -1.0));
            }
            _ => {}
        }
    }
    let den = 4 * n;
    debug_assert!(outcomes.iter().map(|&(w, _)| w).sum::<u64>() <= den);
    let mut rng = rng_from(seed, "comm-q", 0);
    let unit = n as f64 / k as f64;
    let mut estimate = 0.0;
    for _ in 0..k {
        let mut x = rng.gen_range(0..den);
        for &(w, sign) in &outcomes {
            if x < w {
                estimate += sign * unit;
                break;
            }
            x -= w;
        }
    }
    Ok(estimate)
}

/// Classical sampling baseline: draw `s` distinct vertices, count matching
/// edges with both endpoints sampled and correctly labeled, and rescale by
/// the inverse pair-inclusion probability.
pub fn classical_baseline_estimate(
    matching: &DirectedMatching,
    labels: &LabeledVertices,
    i: u32,
    j: u32,
    s: u32,
    seed: u64,
) -> Result<f64> {
    let n = labels.n();
    if s > n {
        return Err(QdError::Param(format!("sample size {s} exceeds n = {n}")));
    }
    if s <= 1 {
        return Ok(0.0);
    }
    let mut rng = rng_from(seed, "comm-c", 0);
    let mut sampled = vec![false; n as usize];
    for idx in rand::seq::index::sample(&mut rng, n as usize, s as usize) {
        sampled[idx] = true;
    }
    let count = matching
        .edges()
        .iter()
        .filter(|&&(u, v)| {
            sampled[u as usize]
                && sampled[v as usize]
                && labels.label(u) == i
                && labels.label(v) == j
        })
        .count() as f64;
    let pair_prob = (s as f64 / n as f64) * ((s - 1) as f64 / (n - 1) as f64);
    Ok(count / pair_prob)
}

/// Message cost of the quantum protocol: `k` copies of a register holding
/// a vertex id, a label, and the head/tail flag.
pub fn message_cost_quantum_qubits(n: u64, k: u64, label_bits: u64) -> u64 {
    k * (ceil_log2(n) + label_bits + 1)
}

/// Message cost of the classical baseline: `s` sampled vertex ids with
/// labels.
pub fn message_cost_classical_bits(n: u64, s: u64, label_bits: u64) -> u64 {
    s * (ceil_log2(n) + label_bits)
}
