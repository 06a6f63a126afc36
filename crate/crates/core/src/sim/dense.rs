//! Dense reference simulator: the same dynamics with an explicitly
//! enumerated basis-state set instead of interval sets.
//!
//! Used to cross-validate the interval simulator: with the same seed and
//! the shared draw discipline (one draw per measurement step with positive
//! termination probability, one per nonempty cleanup batch) the two
//! produce identical traces. Capped to small instances.

use std::collections::HashSet;

use rand::Rng;

use crate::classes::EstMatrix;
use crate::{QdError, Result};

use super::state::classical_stage;
use super::{
    cleanup_progressions, measure_targets, CleanupStep, Decider, Family, MeasureStep,
    MeasurementOutcome, RngDecider, RunOutput, RunStatus, SingleCopyConfig, TraceRecord, FAMILIES,
};

/// Largest `M` the dense simulator will materialize.
pub const DENSE_STATE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Basis {
    Scratch(u64),
    Graph { v: u32, value: u64, fam: Family, copy: u64 },
}

struct DenseState {
    states: HashSet<Basis>,
    t_cursor: u64,
    m_cap: u64,
    copies: u64,
}

impl DenseState {
    fn m_live(&self) -> u64 {
        self.states.len() as u64
    }

    fn inc(&mut self, fam: Family, w: u32, r: u64) -> bool {
        let need = self.copies * r;
        if self.t_cursor + need > self.m_cap + 1 {
            return false;
        }
        // shift every (w, fam) state up by r, across all copies
        let shifted: Vec<Basis> = self
            .states
            .iter()
            .filter(|b| matches!(b, Basis::Graph { v, fam: f, .. } if *v == w && *f == fam))
            .copied()
            .collect();
        for b in &shifted {
            self.states.remove(b);
        }
        for b in shifted {
            if let Basis::Graph { v, value, fam, copy } = b {
                self.states.insert(Basis::Graph { v, value: value + r, fam, copy });
            }
        }
        // swap scratch states for the fresh low block
        for _ in 0..need {
            let was_there = self.states.remove(&Basis::Scratch(self.t_cursor));
            debug_assert!(was_there);
            self.t_cursor += 1;
        }
        for copy in 1..=self.copies {
            for value in 1..=r {
                let fresh = self.states.insert(Basis::Graph { v: w, value, fam, copy });
                debug_assert!(fresh);
            }
        }
        true
    }
}

/// Identical semantics to [`super::single_copy_run`], implemented on an
/// explicit basis-state set. Errors when `M` exceeds [`DENSE_STATE_CAP`].
pub fn dense_reference_run<R: Rng>(cfg: &SingleCopyConfig, rng: &mut R) -> Result<RunOutput> {
    cfg.params.validate()?;
    let m = cfg.stream.m() as u64;
    if cfg.stream.m() == 0 {
        return Ok(RunOutput {
            status: RunStatus::Survived,
            outcome: None,
            entry: None,
            matrix: EstMatrix::zero(cfg.classes.ell()),
            trace: Vec::new(),
        });
    }
    let m_cap = cfg.params.capacity(m);
    if m_cap > DENSE_STATE_CAP {
        return Err(QdError::TooLarge(format!(
            "dense reference caps M at {DENSE_STATE_CAP}, got {m_cap}"
        )));
    }

    let mut st = DenseState {
        states: (1..=m_cap).map(Basis::Scratch).collect(),
        t_cursor: 1,
        m_cap,
        copies: cfg.params.copies(),
    };
    let mut decider = RngDecider(rng);
    let mut trace = Vec::new();
    let mut status = RunStatus::Survived;
    let mut outcome = None;

    'stream: for (idx, &(u, v)) in cfg.stream.edges().iter().enumerate() {
        let f_alpha = cfg.oracle.f(cfg.pair.alpha, idx)?;
        let f_beta = cfg.oracle.f(cfg.pair.beta, idx)?;

        let mut incs: Vec<(Family, u32, u64)> = Vec::with_capacity(12);
        for w in [u, v] {
            for fam in FAMILIES {
                incs.push((fam, w, 1));
            }
        }
        if f_alpha {
            incs.push((Family::A, u, cfg.pair.d_hi_head));
            incs.push((Family::B, u, cfg.pair.d_hi_head));
        }
        if f_beta {
            incs.push((Family::C, u, cfg.pair.d_hi_tail));
            incs.push((Family::D, u, cfg.pair.d_hi_tail));
        }
        for (fam, w, r) in incs {
            if !st.inc(fam, w, r) {
                if cfg.trace {
                    trace.push(TraceRecord::Exhausted { edge: idx as u32 });
                }
                status = RunStatus::Exhausted;
                break 'stream;
            }
        }

        // measure: sequential steps over (family, i, j)
        for t in measure_targets(&cfg.pair, cfg.params.kappa) {
            let head = Basis::Graph { v: u, value: t.head.value, fam: t.head.fam, copy: t.head.copy };
            let tail = Basis::Graph { v, value: t.tail.value, fam: t.tail.fam, copy: t.tail.copy };
            let head_present = st.states.contains(&head);
            let tail_present = st.states.contains(&tail);
            let (n0, n1) = match (head_present, tail_present) {
                (true, true) => (4, 0),
                (false, false) => continue,
                _ => (1, 1),
            };
            let den = 2 * st.m_live();
            let step = decider.measure_step(n0, n1, den);
            if cfg.trace {
                trace.push(TraceRecord::Measure {
                    edge: idx as u32,
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
                    outcome = Some(MeasurementOutcome {
                        edge: idx,
                        u,
                        v,
                        family: t.family,
                        i: t.i,
                        j: t.j,
                        b,
                    });
                    status = RunStatus::Sampled;
                    break 'stream;
                }
                MeasureStep::Continue => {
                    if head_present {
                        st.states.remove(&head);
                    }
                    if tail_present {
                        st.states.remove(&tail);
                    }
                }
            }
        }

        // cleanup: canonical enumeration (endpoint, family, value, copy)
        let progressions = cleanup_progressions(&cfg.pair);
        let mut targets: Vec<Basis> = Vec::new();
        for w in [u, v] {
            for &(fam, start, step) in &progressions {
                let mut values: Vec<u64> = st
                    .states
                    .iter()
                    .filter_map(|b| match b {
                        Basis::Graph { v: bv, value, fam: bf, .. }
                            if *bv == w && *bf == fam && *value >= start && (*value - start) % step == 0 =>
                        {
                            Some(*value)
                        }
                        _ => None,
                    })
                    .collect();
                values.sort_unstable();
                values.dedup();
                for value in values {
                    for copy in 1..=st.copies {
                        let b = Basis::Graph { v: w, value, fam, copy };
                        if st.states.contains(&b) {
                            targets.push(b);
                        }
                    }
                }
            }
        }
        if !targets.is_empty() {
            let den = st.m_live();
            let present = targets.len() as u64;
            let step = decider.cleanup_batch(present, den);
            if cfg.trace {
                trace.push(TraceRecord::Cleanup { edge: idx as u32, present, den, outcome: step });
            }
            match step {
                CleanupStep::Zeroed { .. } => {
                    status = RunStatus::Zeroed;
                    break 'stream;
                }
                CleanupStep::Continue => {
                    for b in targets {
                        st.states.remove(&b);
                    }
                }
            }
        }
    }

    let mut matrix = EstMatrix::zero(cfg.classes.ell());
    let entry = match &outcome {
        Some(o) => {
            let e = classical_stage(cfg, o, m_cap)?;
            matrix.add(e.0, e.1, e.2);
            Some(e)
        }
        None => None,
    };
    Ok(RunOutput { status, outcome, entry, matrix, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::BiasClassConfig;
    use crate::exact::parse_decimal;
    use crate::graph::gen_random;
    use crate::pseudo::{DegreeGrid, HashOracle};
    use crate::seeds::rng_from;
    use crate::sim::{single_copy_run, PairWindows, SketchParams};

    #[test]
    fn traces_match_the_interval_simulator() {
        let classes = BiasClassConfig::from_toml_str(
            "ell = 2\nt = [\"-1\", \"0\"]\nr = [\"0.2\", \"0.9\"]\nalpha = 0.0\n",
        )
        .unwrap();
        let eps = parse_decimal("1").unwrap();
        let mut compared = 0;
        for seed in 0..4u64 {
            let stream = gen_random(5, 0.55, seed).unwrap();
            if stream.m() == 0 {
                continue;
            }
            let grid = DegreeGrid::new(5, &eps).unwrap();
            let oracle = HashOracle::new(seed ^ 0xabc, 2, &grid).unwrap();
            for &alpha in &grid.nonempty_levels() {
                for &beta in &grid.nonempty_levels() {
                    let pair = PairWindows::new(&grid, alpha, beta, stream.m() as u64).unwrap();
                    let cfg = SingleCopyConfig {
                        stream: &stream,
                        oracle: &oracle,
                        classes: &classes,
                        pair,
                        params: SketchParams { kappa: 2, capacity_const: 8 },
                        trace: true,
                        accounting: false,
                    };
                    for copy in 0..8u64 {
                        let mut r1 = rng_from(seed, "dense-cmp", copy);
                        let mut r2 = rng_from(seed, "dense-cmp", copy);
                        let fast = single_copy_run(&cfg, &mut r1).unwrap();
                        let dense = dense_reference_run(&cfg, &mut r2).unwrap();
                        assert_eq!(fast.trace, dense.trace);
                        assert_eq!(fast.status, dense.status);
                        assert_eq!(fast.outcome, dense.outcome);
                        assert_eq!(fast.entry, dense.entry);
                        compared += 1;
                    }
                }
            }
        }
        assert!(compared > 50);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let classes = BiasClassConfig::from_toml_str(
            "ell = 2\nt = [\"-1\", \"0\"]\nr = [\"0.2\", \"0.9\"]\nalpha = 0.0\n",
        )
        .unwrap();
        let eps = parse_decimal("1").unwrap();
        let stream = gen_random(8, 0.9, 9).unwrap();
        let grid = DegreeGrid::new(8, &eps).unwrap();
        let oracle = HashOracle::new(1, 2, &grid).unwrap();
        let pair = PairWindows::new(&grid, 0, 0, stream.m() as u64).unwrap();
        let cfg = SingleCopyConfig {
            stream: &stream,
            oracle: &oracle,
            classes: &classes,
            pair,
            // M = C k^3 m with a deliberately huge constant
            params: SketchParams { kappa: 8, capacity_const: 1_000_000 },
            trace: false,
            accounting: false,
        };
        let mut rng = rng_from(0, "cap", 0);
        assert!(matches!(dense_reference_run(&cfg, &mut rng), Err(QdError::TooLarge(_))));
    }
}
