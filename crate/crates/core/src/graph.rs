//! Directed edge streams, degree and bias bookkeeping, generators, and a
//! brute-force Max-DiCut oracle for small instances.
//!
//! Convention used throughout the crate: for an edge `u -> v`, `u` is the
//! *head* (origin, counted in `out[u]`) and `v` is the *tail* (destination,
//! counted in `in[v]`).

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::exact::ratio_i64;
use crate::seeds::rng_from;
use crate::{QdError, Result};

/// Default vertex cap for the brute-force Max-DiCut oracle.
pub const BRUTE_FORCE_CAP: u32 = 24;

/// An ordered stream of directed edges over vertices `0..n`.
///
/// Repeated edges are permitted (multigraph stream); self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeStream {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl EdgeStream {
    pub fn new(n: u32, edges: Vec<(u32, u32)>) -> Result<Self> {
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(QdError::Parse {
                    line: idx + 2,
                    reason: format!("endpoint out of range: {u} -> {v} with n = {n}"),
                });
            }
            if u == v {
                return Err(QdError::Parse {
                    line: idx + 2,
                    reason: format!("self-loop at vertex {u}"),
                });
            }
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Serializes back to the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parses the line-oriented stream format: a `"n m"` header followed by `m`
/// lines `"u v"`. Whitespace-separated, 0-indexed.
pub fn parse_stream(text: &str) -> Result<EdgeStream> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(QdError::Parse {
        line: 1,
        reason: "missing \"n m\" header".into(),
    })?;
    let mut it = header.split_whitespace();
    let n: u32 = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| QdError::Parse { line: 1, reason: "bad vertex count".into() })?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| QdError::Parse { line: 1, reason: "bad edge count".into() })?;
    if it.next().is_some() {
        return Err(QdError::Parse { line: 1, reason: "trailing tokens in header".into() });
    }

    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let mut it = line.split_whitespace();
        let parse = |t: Option<&str>| -> Result<u32> {
            t.and_then(|t| t.parse().ok()).ok_or_else(|| QdError::Parse {
                line: lineno + 1,
                reason: format!("malformed edge line {line:?}"),
            })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(QdError::Parse {
                line: lineno + 1,
                reason: format!("trailing tokens in edge line {line:?}"),
            });
        }
        if u >= n || v >= n {
            return Err(QdError::Parse {
                line: lineno + 1,
                reason: format!("endpoint out of range: {u} -> {v} with n = {n}"),
            });
        }
        if u == v {
            return Err(QdError::Parse {
                line: lineno + 1,
                reason: format!("self-loop at vertex {u}"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(QdError::Parse {
            line: edges.len() + 2,
            reason: format!("edge count mismatch: header says {m}, found {}", edges.len()),
        });
    }
    EdgeStream::new(n, edges)
}

/// Final (whole-stream) degree counts per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub deg: Vec<u64>,
    pub out: Vec<u64>,
    pub inc: Vec<u64>,
}

impl DegreeProfile {
    pub fn degree(&self, v: u32) -> u64 {
        self.deg[v as usize]
    }
}

/// Exact degree counts over the whole stream. Permutation-invariant in the
/// arrival order.
pub fn degrees(stream: &EdgeStream) -> DegreeProfile {
    let n = stream.n() as usize;
    let mut out = vec![0u64; n];
    let mut inc = vec![0u64; n];
    for &(u, v) in stream.edges() {
        out[u as usize] += 1;
        inc[v as usize] += 1;
    }
    let deg = out.iter().zip(&inc).map(|(a, b)| a + b).collect();
    DegreeProfile { deg, out, inc }
}

/// The bias `(out - in) / deg` of vertex `v`, exact. Errors on isolated
/// vertices, which must not be classified.
pub fn bias(profile: &DegreeProfile, v: u32) -> Result<BigRational> {
    let i = v as usize;
    if profile.deg[i] == 0 {
        return Err(QdError::Param(format!("vertex {v} is isolated and has no bias")));
    }
    let num = ratio_i64(profile.out[i] as i64) - ratio_i64(profile.inc[i] as i64);
    Ok(num / ratio_i64(profile.deg[i] as i64))
}

/// Directed G(n, p): each ordered pair `(u, v)` with `u != v` is included
/// independently with probability `p`; arrival order is shuffled. Fully
/// deterministic given `(n, p, seed)`.
pub fn gen_random(n: u32, p: f64, seed: u64) -> Result<EdgeStream> {
    if n < 2 {
        return Err(QdError::Param("gen_random needs n >= 2".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(QdError::Param("gen_random needs p in (0, 1]".into()));
    }
    let mut pick = rng_from(seed, "gen-pick", 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && pick.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges.shuffle(&mut rng_from(seed, "gen-order", 0));
    EdgeStream::new(n, edges)
}

/// A bipartite stream whose every edge goes from side A to side B, so the
/// whole stream is cuttable: `max_dicut = m`.
pub fn gen_bipartite_forward(a: u32, b: u32, p: f64, seed: u64) -> Result<EdgeStream> {
    if a == 0 || b == 0 {
        return Err(QdError::Param("gen_bipartite_forward needs both sides nonempty".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(QdError::Param("gen_bipartite_forward needs p in (0, 1]".into()));
    }
    let n = a + b;
    let mut pick = rng_from(seed, "gen-bip-pick", 0);
    let mut edges = Vec::new();
    for u in 0..a {
        for v in a..n {
            if pick.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges.shuffle(&mut rng_from(seed, "gen-bip-order", 0));
    EdgeStream::new(n, edges)
}

/// Maximum directed cut value by exhaustive search over all `2^n`
/// assignments. An edge `u -> v` is cut when `u` is on side 0 and `v` on
/// side 1; multiplicity counts.
pub fn max_dicut_bruteforce(stream: &EdgeStream) -> Result<u64> {
    max_dicut_bruteforce_capped(stream, BRUTE_FORCE_CAP)
}

pub fn max_dicut_bruteforce_capped(stream: &EdgeStream, cap: u32) -> Result<u64> {
    let n = stream.n();
    if n > cap {
        return Err(QdError::TooLarge(format!("brute force capped at {cap} vertices, got {n}")));
    }
    if stream.m() == 0 {
        return Ok(0);
    }
    let mut best = 0u64;
    for assign in 0u64..(1u64 << n) {
        let mut cut = 0u64;
        for &(u, v) in stream.edges() {
            // side 1 = bit set; cut edges go from side 0 to side 1
            if assign & (1 << u) == 0 && assign & (1 << v) != 0 {
                cut += 1;
            }
        }
        best = best.max(cut);
    }
    Ok(best)
}
