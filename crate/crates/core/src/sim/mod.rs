//! Exact classical simulation of the quantum sketch.
//!
//! One run maintains a uniform-amplitude superposition over `M = C k^3 m`
//! basis states: a scratch reservoir plus, for every vertex, four counter
//! families (`A`/`B` track head-side degree thresholds, `C`/`D` tail-side),
//! each replicated across `2 k^2` identical copies. Processing an edge
//! shifts counters, spends scratch states on hash-sampled out-edge blocks,
//! then performs the projective measurement and cleanup whose outcome
//! distribution the estimator consumes.
//!
//! Because amplitudes stay uniform, a state is fully described by *which*
//! basis states are present; per-vertex sets are stored once as integer
//! interval sets ([`intervals::IntSet`]) shared by all copies, which is
//! sound because copies only diverge transiently inside a single edge's
//! measurement and are re-identified by cleanup.

pub mod dense;
pub mod intervals;
pub mod invariant;
pub mod schedule;
mod state;

pub use state::{single_copy_run, SimState, SingleCopyConfig, SingleCopyResult};
pub(crate) use state::run_with_decider;

use crate::classes::EstMatrix;
use crate::pseudo::DegreeGrid;
use crate::{QdError, Result};

/// Counter families. `A`/`B` watch the head-side degree window, `C`/`D` the
/// tail-side one; the first of each pair checks the lower threshold, the
/// second the upper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

pub const FAMILIES: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];

/// Sketch accuracy parameters.
#[derive(Debug, Clone, Copy)]
pub struct SketchParams {
    /// Out-edge sampling accuracy; the measurement grid is `kappa x kappa`.
    pub kappa: u32,
    /// Capacity constant `C` in `M = C kappa^3 m`.
    pub capacity_const: u64,
}

impl SketchParams {
    pub fn validate(&self) -> Result<()> {
        if self.kappa < 2 {
            return Err(QdError::Param("kappa must be at least 2".into()));
        }
        if self.capacity_const < 1 {
            return Err(QdError::Param("capacity constant must be at least 1".into()));
        }
        Ok(())
    }

    pub fn copies(&self) -> u64 {
        2 * (self.kappa as u64) * (self.kappa as u64)
    }

    /// Initial basis-state count `M = C kappa^3 m`.
    pub fn capacity(&self, m: u64) -> u64 {
        let k = self.kappa as u64;
        self.capacity_const * k * k * k * m
    }
}

/// The degree windows of one (head level, tail level) pair, with the block
/// strides `d_{level+1}` already resolved (the top window gets a finite
/// stand-in no degree can reach).
#[derive(Debug, Clone, Copy)]
pub struct PairWindows {
    pub alpha: usize,
    pub beta: usize,
    pub d_lo_head: u64,
    pub d_hi_head: u64,
    pub d_lo_tail: u64,
    pub d_hi_tail: u64,
}

impl PairWindows {
    pub fn new(grid: &DegreeGrid, alpha: usize, beta: usize, m: u64) -> Result<Self> {
        let last = grid.levels().len() - 1;
        if alpha > last || beta > last {
            return Err(QdError::Param(format!(
                "degree pair ({alpha}, {beta}) out of range, grid has levels 0..={last}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            d_lo_head: grid.value(alpha),
            d_hi_head: grid.upper_for_blocks(alpha, m),
            d_lo_tail: grid.value(beta),
            d_hi_tail: grid.upper_for_blocks(beta, m),
        })
    }
}

/// A measurement outcome that terminated the quantum stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub edge: usize,
    pub u: u32,
    pub v: u32,
    /// Projector family 1..=4.
    pub family: u8,
    pub i: u32,
    pub j: u32,
    pub b: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MeasureStep {
    Continue,
    Terminated { b: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CleanupStep {
    Continue,
    Zeroed { hit: u64 },
}

/// One record per measurement step that had nonzero termination
/// probability, with exact probability numerators over the recorded
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum TraceRecord {
    Measure {
        edge: u32,
        family: u8,
        i: u32,
        j: u32,
        num0: u64,
        num1: u64,
        /// `2 M'` at the step.
        den: u64,
        outcome: MeasureStep,
    },
    Cleanup {
        edge: u32,
        /// Number of present target states across copies.
        present: u64,
        /// `M'` at the step.
        den: u64,
        outcome: CleanupStep,
    },
    Exhausted { edge: u32 },
}

/// Where a single-copy run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// A measurement outcome was passed to the classical stage.
    Sampled,
    /// Cleanup terminated the run; the estimate is zero.
    Zeroed,
    /// Scratch states ran out; the estimate is zero.
    Exhausted,
    /// The whole stream was processed without an outcome; zero estimate.
    Survived,
}

/// How measurement steps are resolved: by sampling (a live run) or by
/// collecting the never-terminate branch (schedule building).
pub(crate) trait Decider {
    fn measure_step(&mut self, n0: u64, n1: u64, den: u64) -> MeasureStep;
    fn cleanup_batch(&mut self, present: u64, den: u64) -> CleanupStep;
}

pub(crate) struct RngDecider<'r, R: rand::Rng>(pub &'r mut R);

impl<R: rand::Rng> Decider for RngDecider<'_, R> {
    fn measure_step(&mut self, n0: u64, n1: u64, den: u64) -> MeasureStep {
        let x = self.0.gen_range(0..den);
        if x < n0 {
            MeasureStep::Terminated { b: 0 }
        } else if x < n0 + n1 {
            MeasureStep::Terminated { b: 1 }
        } else {
            MeasureStep::Continue
        }
    }

    fn cleanup_batch(&mut self, present: u64, den: u64) -> CleanupStep {
        let x = self.0.gen_range(0..den);
        if x < present {
            CleanupStep::Zeroed { hit: x }
        } else {
            CleanupStep::Continue
        }
    }
}

/// Never terminates; used to replay the deterministic measurement schedule.
pub(crate) struct NeverDecider;

impl Decider for NeverDecider {
    fn measure_step(&mut self, _n0: u64, _n1: u64, _den: u64) -> MeasureStep {
        MeasureStep::Continue
    }

    fn cleanup_batch(&mut self, _present: u64, _den: u64) -> CleanupStep {
        CleanupStep::Continue
    }
}

/// One constituent basis state of a measurement vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Constituent {
    pub fam: Family,
    pub value: u64,
    pub copy: u64,
}

/// The two constituents of the projector pair `(family, i, j)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MeasureTarget {
    pub family: u8,
    pub i: u32,
    pub j: u32,
    pub head: Constituent,
    pub tail: Constituent,
}

/// Enumerates the `4 kappa^2` projector pairs in the fixed order family,
/// then `i`, then `j`. Copy assignment `r_{i,j} = (i-1)k + j`,
/// `s_{i,j} = k^2 + r_{i,j}` keeps all constituents distinct, hence the
/// projectors orthogonal.
pub(crate) fn measure_targets(pair: &PairWindows, kappa: u32) -> Vec<MeasureTarget> {
    let k = kappa as u64;
    let mut out = Vec::with_capacity((4 * k * k) as usize);
    for family in 1..=4u8 {
        for i in 1..=kappa {
            for j in 1..=kappa {
                let r = (i as u64 - 1) * k + j as u64;
                let s = k * k + r;
                let (head_fam, head_val) = match family {
                    1 | 3 => (Family::A, pair.d_lo_head + (i as u64 - 1) * pair.d_hi_head),
                    _ => (Family::B, i as u64 * pair.d_hi_head),
                };
                let (tail_fam, tail_val) = match family {
                    1 | 2 => (Family::C, pair.d_lo_tail + (j as u64 - 1) * pair.d_hi_tail),
                    _ => (Family::D, j as u64 * pair.d_hi_tail),
                };
                let (head_copy, tail_copy) = match family {
                    1 => (r, r),
                    2 => (r, s),
                    3 => (s, r),
                    _ => (s, s),
                };
                out.push(MeasureTarget {
                    family,
                    i,
                    j,
                    head: Constituent { fam: head_fam, value: head_val, copy: head_copy },
                    tail: Constituent { fam: tail_fam, value: tail_val, copy: tail_copy },
                });
            }
        }
    }
    out
}

/// Cleanup progressions per family, canonical order. Applied to both
/// endpoints of the processed edge, across all copies: the `A` sets lose
/// `d_lo + k d_hi` for all `k >= 0`, the `B` sets `k d_hi` for `k >= 1`
/// (head-side strides; `C`/`D` analogously on the tail side). Together with
/// the measurement's own removals this re-identifies all copies after every
/// edge.
pub(crate) fn cleanup_progressions(pair: &PairWindows) -> [(Family, u64, u64); 4] {
    [
        (Family::A, pair.d_lo_head, pair.d_hi_head),
        (Family::B, pair.d_hi_head, pair.d_hi_head),
        (Family::C, pair.d_lo_tail, pair.d_hi_tail),
        (Family::D, pair.d_hi_tail, pair.d_hi_tail),
    ]
}

/// Result of one single-copy run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub status: RunStatus,
    pub outcome: Option<MeasurementOutcome>,
    /// `(head class, tail class, signed M/2)` when an outcome was sampled.
    pub entry: Option<(usize, usize, f64)>,
    pub matrix: EstMatrix,
    pub trace: Vec<TraceRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_decimal;

    #[test]
    fn measure_targets_are_orthogonal() {
        let grid = DegreeGrid::new(8, &parse_decimal("1").unwrap()).unwrap();
        let pair = PairWindows::new(&grid, 1, 2, 10).unwrap();
        let kappa = 3u32;
        let targets = measure_targets(&pair, kappa);
        assert_eq!(targets.len(), 4 * 9);
        // all 8 kappa^2 constituents pairwise distinct (head side is vertex
        // u, tail side vertex v, so the two sides can never collide)
        let mut heads: Vec<_> = targets.iter().map(|t| (t.head.fam, t.head.value, t.head.copy)).collect();
        let mut tails: Vec<_> = targets.iter().map(|t| (t.tail.fam, t.tail.value, t.tail.copy)).collect();
        heads.sort_unstable_by_key(|&(f, v, c)| (f as u8, v, c));
        heads.dedup();
        tails.sort_unstable_by_key(|&(f, v, c)| (f as u8, v, c));
        tails.dedup();
        assert_eq!(heads.len(), 4 * 9);
        assert_eq!(tails.len(), 4 * 9);
        // copies stay within 1..=2 kappa^2
        for t in &targets {
            assert!((1..=2 * kappa as u64 * kappa as u64).contains(&t.head.copy));
            assert!((1..=2 * kappa as u64 * kappa as u64).contains(&t.tail.copy));
        }
    }

    #[test]
    fn top_window_stride_is_unreachable() {
        let grid = DegreeGrid::new(4, &parse_decimal("1").unwrap()).unwrap();
        let top = grid.levels().len() - 1;
        let pair = PairWindows::new(&grid, top, 0, 3).unwrap();
        assert!(pair.d_hi_head > 4);
        let pair = PairWindows::new(&grid, top, 0, 9).unwrap();
        assert_eq!(pair.d_hi_head, 10);
    }
}
