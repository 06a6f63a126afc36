//! The interval-set simulator: state, edge processing, and single-copy runs.

use num_rational::Ratio;
use rand::Rng;

use crate::classes::{BiasClassConfig, EstMatrix};
use crate::exact::ratio_u64;
use crate::graph::EdgeStream;
use crate::pseudo::{pseudobias_value, HashOracle};
use crate::{QdError, Result};

use super::intervals::IntSet;
use super::{
    cleanup_progressions, measure_targets, CleanupStep, Decider, Family, MeasureStep,
    MeasurementOutcome, PairWindows, RngDecider, RunOutput, RunStatus, SketchParams, TraceRecord,
    FAMILIES,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Phase {
    Running,
    Sampled(MeasurementOutcome),
    Zeroed,
    Exhausted,
}

/// The simulated superposition between edge-processing steps: scratch
/// cursor, live state count, and one interval set per (vertex, family)
/// shared by all copies.
#[derive(Debug, Clone)]
pub struct SimState {
    pair: PairWindows,
    kappa: u32,
    copies: u64,
    m_cap: u64,
    m_live: u64,
    /// Next unused scratch index (1-based); `t_cursor - 1` states are spent.
    t_cursor: u64,
    sets: Vec<[IntSet; 4]>,
    /// Within-edge removals performed by `measure`: `(vertex, family,
    /// value, copy)`. Cleanup consumes and clears this.
    transient: Vec<(u32, Family, u64, u64)>,
    phase: Phase,
    /// Exact survival probability `1 - p_k`, updated per measurement step;
    /// tracked only when accounting is on.
    survival: Option<Ratio<u128>>,
    trace: Vec<TraceRecord>,
    collect_trace: bool,
}

impl SimState {
    pub fn new(
        n: u32,
        m: u64,
        params: SketchParams,
        pair: PairWindows,
        accounting: bool,
        collect_trace: bool,
    ) -> Result<Self> {
        params.validate()?;
        if m == 0 {
            return Err(QdError::Param("simulator state needs a nonempty stream".into()));
        }
        let m_cap = params.capacity(m);
        Ok(Self {
            pair,
            kappa: params.kappa,
            copies: params.copies(),
            m_cap,
            m_live: m_cap,
            t_cursor: 1,
            sets: (0..n).map(|_| Default::default()).collect(),
            transient: Vec::new(),
            phase: Phase::Running,
            survival: accounting.then(|| Ratio::from_integer(1)),
            trace: Vec::new(),
            collect_trace,
        })
    }

    pub fn m_cap(&self) -> u64 {
        self.m_cap
    }

    pub fn m_live(&self) -> u64 {
        self.m_live
    }

    pub fn t_cursor(&self) -> u64 {
        self.t_cursor
    }

    pub fn is_running(&self) -> bool {
        self.phase == Phase::Running
    }

    pub fn outcome(&self) -> Option<&MeasurementOutcome> {
        match &self.phase {
            Phase::Sampled(o) => Some(o),
            _ => None,
        }
    }

    pub fn status(&self) -> RunStatus {
        match &self.phase {
            Phase::Running => RunStatus::Survived,
            Phase::Sampled(_) => RunStatus::Sampled,
            Phase::Zeroed => RunStatus::Zeroed,
            Phase::Exhausted => RunStatus::Exhausted,
        }
    }

    pub fn family_set(&self, v: u32, fam: Family) -> &IntSet {
        &self.sets[v as usize][fam as usize]
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn take_trace(&mut self) -> Vec<TraceRecord> {
        std::mem::take(&mut self.trace)
    }

    /// `1 - p_k` as an exact rational, when accounting is on.
    pub fn survival(&self) -> Option<Ratio<u128>> {
        self.survival
    }

    fn survival_mul(&mut self, num: u64, den: u64) {
        if let Some(s) = &mut self.survival {
            *s *= Ratio::new(num as u128, den as u128);
        }
    }

    /// Exact early-termination accounting: `M' = (1 - p_k) M` must hold
    /// after every measurement step. Zero tolerance.
    pub fn accounting_ok(&self) -> std::result::Result<(), String> {
        if let Some(s) = &self.survival {
            let expect = Ratio::new(self.m_live as u128, self.m_cap as u128);
            if *s != expect {
                return Err(format!(
                    "survival probability {s} disagrees with M'/M = {}/{}",
                    self.m_live, self.m_cap
                ));
            }
        }
        Ok(())
    }

    /// Debug recount of the incremental `M'` bookkeeping. Valid between
    /// edges (the transient list must be empty).
    pub fn recount_ok(&self) -> std::result::Result<(), String> {
        if !self.transient.is_empty() {
            return Err("recount requested mid-edge".into());
        }
        let scratch_left = self.m_cap - (self.t_cursor - 1);
        let graph: u64 = self
            .sets
            .iter()
            .flat_map(|fams| fams.iter())
            .map(|s| s.len())
            .sum();
        let total = scratch_left + self.copies * graph;
        if total != self.m_live {
            return Err(format!(
                "recount {total} (scratch {scratch_left} + {} copies x {graph}) != M' {}",
                self.copies, self.m_live
            ));
        }
        Ok(())
    }

    /// Shifts `E_v` by `r` and inserts `1..=r`, spending `2 kappa^2 r`
    /// scratch states. Returns false when the scratch reservoir cannot
    /// cover the swap (the caller must mark the run exhausted).
    pub fn op_inc(&mut self, fam: Family, v: u32, r: u64) -> bool {
        let need = self.copies * r;
        if self.t_cursor + need > self.m_cap + 1 {
            return false;
        }
        self.t_cursor += need;
        self.sets[v as usize][fam as usize].inc(r);
        true
    }

    /// The projective measurement for edge `u -> v`: `4 kappa^2` sequential
    /// steps in the fixed order (family, i, j). Returns the outcome that
    /// terminated the quantum stage, if any. On every continue branch the
    /// present constituents are removed from their specific copies and `M'`
    /// decremented.
    ///
    /// The step order is immaterial to the outcome distribution: the
    /// projectors touch pairwise disjoint basis states, so presence is
    /// order-independent and each unconditional outcome probability is
    /// `n_b / 2M` regardless of position (see `order_invariance` test).
    pub(crate) fn op_measure<D: Decider>(
        &mut self,
        edge: usize,
        u: u32,
        v: u32,
        decider: &mut D,
    ) -> Option<MeasurementOutcome> {
        self.op_measure_ordered(edge, u, v, &measure_targets(&self.pair, self.kappa), decider)
    }

    pub(crate) fn op_measure_ordered<D: Decider>(
        &mut self,
        edge: usize,
        u: u32,
        v: u32,
        targets: &[super::MeasureTarget],
        decider: &mut D,
    ) -> Option<MeasurementOutcome> {
        for &t in targets {
            let head_present = self.sets[u as usize][t.head.fam as usize].contains(t.head.value);
            let tail_present = self.sets[v as usize][t.tail.fam as usize].contains(t.tail.value);
            let (n0, n1) = match (head_present, tail_present) {
                (true, true) => (4, 0),
                (false, false) => continue,
                _ => (1, 1),
            };
            let den = 2 * self.m_live;
            let step = decider.measure_step(n0, n1, den);
            if self.collect_trace {
                self.trace.push(TraceRecord::Measure {
                    edge: edge as u32,
                    family: t.family,
                    i: t.i,
                    j: t.j,
                    num0: n0,
                    num1: n1,
                    den,
                    outcome: step,
                });
            }
            match step {
                MeasureStep::Terminated { b } => {
                    return Some(MeasurementOutcome {
                        edge,
                        u,
                        v,
                        family: t.family,
                        i: t.i,
                        j: t.j,
                        b,
                    });
                }
                MeasureStep::Continue => {
                    self.survival_mul(den - n0 - n1, den);
                    if head_present {
                        self.transient.push((u, t.head.fam, t.head.value, t.head.copy));
                        self.m_live -= 1;
                    }
                    if tail_present {
                        self.transient.push((v, t.tail.fam, t.tail.value, t.tail.copy));
                        self.m_live -= 1;
                    }
                }
            }
        }
        None
    }

    /// The cleanup measurement for edge `u -> v`: one sequential projection
    /// per present `(vertex, family, value, copy)` target. Sequential
    /// termination at `1/M'` per step telescopes to a single draw: survive
    /// with probability `(M' - k)/M'`, and each present target is the hit
    /// with probability `1/M'`. Returns false when the run was zeroed.
    pub(crate) fn op_cleanup<D: Decider>(
        &mut self,
        edge: usize,
        u: u32,
        v: u32,
        decider: &mut D,
    ) -> bool {
        let progressions = cleanup_progressions(&self.pair);
        let mut present = 0u64;
        for w in [u, v] {
            for &(fam, start, step) in &progressions {
                for value in self.sets[w as usize][fam as usize].progression_members(start, step) {
                    let gone = self
                        .transient
                        .iter()
                        .filter(|&&(tv, tf, tval, _)| tv == w && tf == fam && tval == value)
                        .count() as u64;
                    debug_assert!(gone < self.copies);
                    present += self.copies - gone;
                }
            }
        }
        if present == 0 {
            debug_assert!(self.transient.is_empty());
            return true;
        }
        let den = self.m_live;
        let step = decider.cleanup_batch(present, den);
        if self.collect_trace {
            self.trace.push(TraceRecord::Cleanup {
                edge: edge as u32,
                present,
                den,
                outcome: step,
            });
        }
        match step {
            CleanupStep::Zeroed { .. } => false,
            CleanupStep::Continue => {
                self.survival_mul(den - present, den);
                self.m_live -= present;
                for w in [u, v] {
                    for &(fam, start, step) in &progressions {
                        self.sets[w as usize][fam as usize].remove_progression(start, step);
                    }
                }
                self.transient.clear();
                true
            }
        }
    }

    /// Processes one edge of the quantum stage: unit increments for both
    /// endpoints, hash-triggered block increments on the head, then measure
    /// and cleanup. Both hash-triggered increments apply to the head `u`;
    /// its out-edges are what both head-role and tail-role pseudobiases
    /// sample.
    pub(crate) fn process_edge<D: Decider>(
        &mut self,
        edge: usize,
        u: u32,
        v: u32,
        f_alpha: bool,
        f_beta: bool,
        decider: &mut D,
    ) {
        debug_assert_eq!(self.phase, Phase::Running);
        let exhaust = |state: &mut Self| {
            if state.collect_trace {
                state.trace.push(TraceRecord::Exhausted { edge: edge as u32 });
            }
            state.phase = Phase::Exhausted;
        };
        for w in [u, v] {
            for fam in FAMILIES {
                if !self.op_inc(fam, w, 1) {
                    return exhaust(self);
                }
            }
        }
        if f_alpha {
            for fam in [Family::A, Family::B] {
                if !self.op_inc(fam, u, self.pair.d_hi_head) {
                    return exhaust(self);
                }
            }
        }
        if f_beta {
            for fam in [Family::C, Family::D] {
                if !self.op_inc(fam, u, self.pair.d_hi_tail) {
                    return exhaust(self);
                }
            }
        }
        if let Some(outcome) = self.op_measure(edge, u, v, decider) {
            self.phase = Phase::Sampled(outcome);
            return;
        }
        if !self.op_cleanup(edge, u, v, decider) {
            self.phase = Phase::Zeroed;
        }
    }
}

/// Everything a single-copy run needs.
#[derive(Clone, Copy)]
pub struct SingleCopyConfig<'a> {
    pub stream: &'a EdgeStream,
    pub oracle: &'a HashOracle,
    pub classes: &'a BiasClassConfig,
    pub pair: PairWindows,
    pub params: SketchParams,
    /// Collect one trace record per measurement step.
    pub trace: bool,
    /// Maintain and check the exact `M' = (1 - p_k) M` bookkeeping.
    pub accounting: bool,
}

pub type SingleCopyResult = RunOutput;

/// The classical stage: given the sampled outcome, track the exact after
/// counts for both endpoints over the rest of the stream, estimate the
/// pseudobiases, and place the signed `M/2` entry.
pub(crate) fn classical_stage(
    cfg: &SingleCopyConfig,
    outcome: &MeasurementOutcome,
    m_cap: u64,
) -> Result<(usize, usize, f64)> {
    let edges = cfg.stream.edges();
    let (u, v) = (outcome.u, outcome.v);
    let (mut da_u, mut douta_u, mut da_v, mut douta_v) = (0u64, 0u64, 0u64, 0u64);
    for &(x, y) in &edges[outcome.edge + 1..] {
        if x == u || y == u {
            da_u += 1;
        }
        if x == u {
            douta_u += 1;
        }
        if x == v || y == v {
            da_v += 1;
        }
        if x == v {
            douta_v += 1;
        }
    }
    let kappa = ratio_u64(cfg.params.kappa as u64);
    // Sampled out-count at the head is assumed to be i - 1, at the tail
    // j - 1; before-degrees are assumed to sit at the window bottoms.
    let dout_est_u =
        ratio_u64(2 * cfg.pair.d_lo_head) * ratio_u64(outcome.i as u64 - 1) / kappa.clone();
    let dout_est_v = ratio_u64(2 * cfg.pair.d_lo_tail) * ratio_u64(outcome.j as u64 - 1) / kappa;
    let bps_u = pseudobias_value(
        &dout_est_u,
        douta_u,
        &ratio_u64(cfg.pair.d_lo_head),
        da_u,
        &cfg.oracle.g(u),
    );
    let bps_v = pseudobias_value(
        &dout_est_v,
        douta_v,
        &ratio_u64(cfg.pair.d_lo_tail),
        da_v,
        &cfg.oracle.g(v),
    );
    let ci = cfg.classes.classify(&bps_u);
    let cj = cfg.classes.classify(&bps_v);
    let positive = match outcome.family {
        1 | 4 => outcome.b == 0,
        2 | 3 => outcome.b == 1,
        _ => unreachable!("families are 1..=4"),
    };
    let magnitude = m_cap as f64 / 2.0;
    Ok((ci, cj, if positive { magnitude } else { -magnitude }))
}

pub(crate) type ClassifiedEntry = (usize, usize, f64);

pub(crate) fn run_with_decider<D: Decider>(
    cfg: &SingleCopyConfig,
    decider: &mut D,
) -> Result<(SimState, Option<ClassifiedEntry>)> {
    cfg.params.validate()?;
    let m = cfg.stream.m() as u64;
    let mut state = SimState::new(cfg.stream.n(), m, cfg.params, cfg.pair, cfg.accounting, cfg.trace)?;
    for (idx, &(u, v)) in cfg.stream.edges().iter().enumerate() {
        if !state.is_running() {
            break;
        }
        let f_alpha = cfg.oracle.f(cfg.pair.alpha, idx)?;
        let f_beta = cfg.oracle.f(cfg.pair.beta, idx)?;
        state.process_edge(idx, u, v, f_alpha, f_beta, decider);
        if cfg.accounting {
            state.accounting_ok().map_err(QdError::Config)?;
            if state.is_running() {
                state.recount_ok().map_err(QdError::Config)?;
            }
        }
    }
    let entry = match state.outcome().copied() {
        Some(outcome) => Some(classical_stage(cfg, &outcome, state.m_cap())?),
        None => None,
    };
    Ok((state, entry))
}

/// One full single-copy run: init, process every edge, classical stage.
/// Deterministic given the inputs and the generator state. Runs that never
/// sample, are zeroed, or exhaust scratch return the zero matrix.
pub fn single_copy_run<R: Rng>(cfg: &SingleCopyConfig, rng: &mut R) -> Result<SingleCopyResult> {
    if cfg.stream.m() == 0 {
        return Ok(RunOutput {
            status: RunStatus::Survived,
            outcome: None,
            entry: None,
            matrix: EstMatrix::zero(cfg.classes.ell()),
            trace: Vec::new(),
        });
    }
    let mut decider = RngDecider(rng);
    let (mut state, entry) = run_with_decider(cfg, &mut decider)?;
    let mut matrix = EstMatrix::zero(cfg.classes.ell());
    if let Some((i, j, value)) = entry {
        matrix.add(i, j, value);
    }
    Ok(RunOutput {
        status: state.status(),
        outcome: state.outcome().copied(),
        entry,
        matrix,
        trace: state.take_trace(),
    })
}
