//! Closed-form check of the per-vertex interval sets.
//!
//! After any number of completely processed edges (state still running,
//! scratch not exhausted), each family set is determined by two replay
//! quantities per vertex: `r`, the number of processed edges incident to
//! it, and the positions of the hash-sampled out-edges. The checker
//! recomputes the sets from that closed form and demands exact equality
//! with the live interval sets.

use super::intervals::IntSet;
use super::{Family, PairWindows, SimState};

/// Replay bookkeeping maintained alongside a run.
#[derive(Debug, Clone)]
pub struct ReplayTracker {
    /// Processed edges incident to each vertex.
    r: Vec<u64>,
    /// For each vertex, the values of `r` at which a head-side hash hit
    /// (`f_alpha` with this vertex as head) was processed, in order.
    head_hits: Vec<Vec<u64>>,
    /// Same for the tail-side hash `f_beta`.
    tail_hits: Vec<Vec<u64>>,
}

impl ReplayTracker {
    pub fn new(n: u32) -> Self {
        Self {
            r: vec![0; n as usize],
            head_hits: vec![Vec::new(); n as usize],
            tail_hits: vec![Vec::new(); n as usize],
        }
    }

    /// Records one completely processed edge `u -> v` with its hash draws.
    pub fn record_edge(&mut self, u: u32, v: u32, f_alpha: bool, f_beta: bool) {
        self.r[u as usize] += 1;
        self.r[v as usize] += 1;
        if f_alpha {
            let pos = self.r[u as usize];
            self.head_hits[u as usize].push(pos);
        }
        if f_beta {
            let pos = self.r[u as usize];
            self.tail_hits[u as usize].push(pos);
        }
    }
}

/// The closed form of one family set.
///
/// With no hits the set is the plain counter `[1, min(r+1, cap))` where
/// `cap` is `d_lo` for the lower-threshold families and `d_hi` for the
/// upper ones. Each hit contributes one block whose lower edge trails the
/// hit's age (`rho_i = r - position + 1`); the newest hit owns block 1.
pub fn expected_family_set(r: u64, hit_positions: &[u64], d_lo: u64, d_hi: u64, low: bool) -> IntSet {
    let cap = if low { d_lo } else { d_hi };
    let blocks = hit_positions.len() as u64;
    if blocks == 0 {
        return IntSet::from_intervals([(1, (r + 1).min(cap))]);
    }
    let mut intervals = vec![(1, cap)];
    for i in 1..=blocks {
        // block i corresponds to the (blocks - i + 1)-th chronological hit
        let pos = hit_positions[(blocks - i) as usize];
        let rho = r - pos + 1;
        let (lo, hi) = if low {
            if i < blocks {
                (d_lo + (i - 1) * d_hi + rho, d_lo + i * d_hi)
            } else {
                (d_lo + (blocks - 1) * d_hi + rho, blocks * d_hi + (r + 1).min(d_lo))
            }
        } else if i < blocks {
            (i * d_hi + rho, (i + 1) * d_hi)
        } else {
            (blocks * d_hi + rho, blocks * d_hi + (r + 1).min(d_hi))
        };
        intervals.push((lo, hi));
    }
    IntSet::from_intervals(intervals)
}

/// Compares every live family set against its closed form. Exact equality
/// required; returns a description of the first mismatch.
pub fn check_state_invariant(
    state: &SimState,
    tracker: &ReplayTracker,
    pair: &PairWindows,
) -> std::result::Result<(), String> {
    for v in 0..tracker.r.len() {
        let r = tracker.r[v];
        let head = &tracker.head_hits[v];
        let tail = &tracker.tail_hits[v];
        let expect = [
            (Family::A, expected_family_set(r, head, pair.d_lo_head, pair.d_hi_head, true)),
            (Family::B, expected_family_set(r, head, pair.d_lo_head, pair.d_hi_head, false)),
            (Family::C, expected_family_set(r, tail, pair.d_lo_tail, pair.d_hi_tail, true)),
            (Family::D, expected_family_set(r, tail, pair.d_lo_tail, pair.d_hi_tail, false)),
        ];
        for (fam, want) in expect {
            let got = state.family_set(v as u32, fam);
            if *got != want {
                return Err(format!(
                    "vertex {v} family {fam:?}: live {:?} but closed form {:?} (r = {r}, head hits {head:?}, tail hits {tail:?})",
                    got.runs(),
                    want.runs(),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::BiasClassConfig;
    use crate::exact::parse_decimal;
    use crate::graph::gen_random;
    use crate::pseudo::{DegreeGrid, HashOracle};
    use crate::seeds::rng_from;
    use crate::sim::{run_with_decider, NeverDecider, SingleCopyConfig, SketchParams};

    #[test]
    fn closed_form_without_hits_is_a_plain_counter() {
        // r = 2, d_lo = 5: counter {1, 2}; the lower threshold is still out
        // of reach.
        let s = expected_family_set(2, &[], 5, 9, true);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1, 2]);
        // saturation: r >= d_lo leaves [1, d_lo - 1] with the threshold
        // value removed by each measurement
        let s = expected_family_set(7, &[], 5, 9, true);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        let s = expected_family_set(0, &[], 5, 9, true);
        assert!(s.is_empty());
    }

    #[test]
    fn closed_form_single_hit_matches_hand_trace() {
        // d_lo = 2, d_hi = 4; one hit on the vertex's first incident edge.
        // After that edge: {1} u [3, 6); one more non-hit edge: {1} u [4, 6).
        let s = expected_family_set(1, &[1], 2, 4, true);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1, 3, 4, 5]);
        let s = expected_family_set(2, &[1], 2, 4, true);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1, 4, 5]);
        let s = expected_family_set(1, &[1], 2, 4, false);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1, 2, 3, 5]);
        let s = expected_family_set(2, &[1], 2, 4, false);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1, 2, 3, 6]);
    }

    #[test]
    fn live_runs_match_the_closed_form_after_every_edge() {
        let classes = BiasClassConfig::from_toml_str(
            "ell = 2\nt = [\"-1\", \"0\"]\nr = [\"0.2\", \"0.9\"]\nalpha = 0.0\n",
        )
        .unwrap();
        for seed in 0..6u64 {
            let stream = gen_random(6, 0.5, seed).unwrap();
            if stream.m() == 0 {
                continue;
            }
            let eps = parse_decimal("1").unwrap();
            let grid = DegreeGrid::new(6, &eps).unwrap();
            let oracle = HashOracle::new(seed ^ 77, 2, &grid).unwrap();
            for &alpha in &grid.nonempty_levels() {
                for &beta in &grid.nonempty_levels() {
                    let pair =
                        crate::sim::PairWindows::new(&grid, alpha, beta, stream.m() as u64).unwrap();
                    let cfg = SingleCopyConfig {
                        stream: &stream,
                        oracle: &oracle,
                        classes: &classes,
                        pair,
                        params: SketchParams { kappa: 2, capacity_const: 32 },
                        trace: false,
                        accounting: true,
                    };
                    // the never-terminate branch visits every edge
                    let mut tracker = ReplayTracker::new(6);
                    let mut state = crate::sim::SimState::new(
                        6,
                        stream.m() as u64,
                        cfg.params,
                        pair,
                        true,
                        false,
                    )
                    .unwrap();
                    for (idx, &(u, v)) in stream.edges().iter().enumerate() {
                        let fa = oracle.f(alpha, idx).unwrap();
                        let fb = oracle.f(beta, idx).unwrap();
                        state.process_edge(idx, u, v, fa, fb, &mut NeverDecider);
                        if !state.is_running() {
                            break;
                        }
                        tracker.record_edge(u, v, fa, fb);
                        check_state_invariant(&state, &tracker, &pair).unwrap();
                    }
                    // and a sampled run reaches the same states while alive
                    let mut rng = rng_from(seed, "inv", alpha as u64 * 8 + beta as u64);
                    let _ = run_with_decider(&cfg, &mut crate::sim::RngDecider(&mut rng)).unwrap();
                }
            }
        }
    }
}
