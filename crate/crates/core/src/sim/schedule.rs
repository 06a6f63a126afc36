//! The exact outcome distribution of a single-copy run.
//!
//! For a fixed hash draw the sequence of measurement steps is
//! deterministic; only termination is random. Early termination exactly
//! cancels the shrinking of `M'`: a step whose conditional termination
//! numerators are `(n0, n1)` over `2 M'` is reached with probability
//! `M'/M`, so its unconditional outcome probabilities are `n0 / 2M` and
//! `n1 / 2M`, independent of when it happens. Replaying the schedule once
//! therefore yields the full categorical distribution over run outcomes,
//! from which copies can be sampled in O(log) time each.

use rand::Rng;

use crate::classes::EstMatrix;
use crate::Result;

use super::state::{classical_stage, run_with_decider};
use super::{MeasurementOutcome, NeverDecider, RunStatus, SingleCopyConfig, TraceRecord};

#[derive(Debug, Clone)]
struct OutcomeEvent {
    /// Cumulative weight in units of `1 / 2M`, inclusive of this event.
    cum: u64,
    entry_i: usize,
    entry_j: usize,
    value: f64,
}

/// Sampled category of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSummary {
    pub status: RunStatus,
    pub entry: Option<(usize, usize)>,
}

/// Exact single-copy outcome distribution for one (stream, oracle, pair).
#[derive(Debug, Clone)]
pub struct Schedule {
    ell: usize,
    m_cap: u64,
    /// Total weight `2M` (0 for an empty stream).
    total: u64,
    events: Vec<OutcomeEvent>,
    outcome_weight: u64,
    zeroed_weight: u64,
    exhausted_weight: u64,
    survived_weight: u64,
}

impl Schedule {
    /// Replays the never-terminate branch and converts its trace into the
    /// outcome categorical.
    pub fn build(cfg: &SingleCopyConfig) -> Result<Self> {
        let ell = cfg.classes.ell();
        if cfg.stream.m() == 0 {
            return Ok(Self {
                ell,
                m_cap: 0,
                total: 0,
                events: Vec::new(),
                outcome_weight: 0,
                zeroed_weight: 0,
                exhausted_weight: 0,
                survived_weight: 0,
            });
        }
        let replay_cfg = SingleCopyConfig { trace: true, accounting: false, ..*cfg };
        let (mut state, _) = run_with_decider(&replay_cfg, &mut NeverDecider)?;
        let m_cap = state.m_cap();
        let total = 2 * m_cap;

        let mut events = Vec::new();
        let mut cum = 0u64;
        let mut zeroed_weight = 0u64;
        let mut exhausted = false;
        for rec in state.take_trace() {
            match rec {
                TraceRecord::Measure { edge, family, i, j, num0, num1, .. } => {
                    let (u, v) = cfg.stream.edges()[edge as usize];
                    for (b, num) in [(0u8, num0), (1u8, num1)] {
                        if num == 0 {
                            continue;
                        }
                        let outcome =
                            MeasurementOutcome { edge: edge as usize, u, v, family, i, j, b };
                        let (ei, ej, value) = classical_stage(cfg, &outcome, m_cap)?;
                        cum += num;
                        events.push(OutcomeEvent { cum, entry_i: ei, entry_j: ej, value });
                    }
                }
                TraceRecord::Cleanup { present, .. } => {
                    zeroed_weight += 2 * present;
                }
                TraceRecord::Exhausted { .. } => {
                    exhausted = true;
                }
            }
        }
        let outcome_weight = cum;
        let leftover = 2 * state.m_live();
        debug_assert_eq!(outcome_weight + zeroed_weight + leftover, total);
        let (exhausted_weight, survived_weight) =
            if exhausted { (leftover, 0) } else { (0, leftover) };
        Ok(Self {
            ell,
            m_cap,
            total,
            events,
            outcome_weight,
            zeroed_weight,
            exhausted_weight,
            survived_weight,
        })
    }

    pub fn m_cap(&self) -> u64 {
        self.m_cap
    }

    /// Exact category probabilities `(sampled, zeroed, exhausted,
    /// survived)`, as fractions of `2M`.
    pub fn category_weights(&self) -> (u64, u64, u64, u64, u64) {
        (self.outcome_weight, self.zeroed_weight, self.exhausted_weight, self.survived_weight, self.total)
    }

    /// Expected estimate matrix of one copy, exact up to f64 rounding:
    /// each outcome event contributes `weight/2M * value` to its entry.
    pub fn mean_matrix(&self) -> EstMatrix {
        let mut m = EstMatrix::zero(self.ell);
        if self.total == 0 {
            return m;
        }
        let mut prev = 0u64;
        for ev in &self.events {
            let w = (ev.cum - prev) as f64 / self.total as f64;
            m.add(ev.entry_i, ev.entry_j, w * ev.value);
            prev = ev.cum;
        }
        m
    }

    /// Samples the outcome counts of `k` independent copies at once, by the
    /// multinomial chain rule (sequential binomials over the fixed event
    /// order). Identically distributed with `k` calls to
    /// [`Schedule::sample_into`] up to the f64 rounding of the conditional
    /// probabilities; cost is proportional to the number of events, not
    /// `k`. `acc` receives the summed (not averaged) contributions; the
    /// returned counts are (sampled, zeroed, exhausted, survived).
    pub fn sample_counts_into<R: Rng>(
        &self,
        k: u64,
        rng: &mut R,
        acc: &mut EstMatrix,
    ) -> (u64, u64, u64, u64) {
        if self.total == 0 {
            return (0, 0, 0, k);
        }
        let mut remaining = k;
        let mut weight_left = self.total;
        let mut draw = |count: &mut u64, weight: u64, rng: &mut R| -> u64 {
            if weight == 0 || *count == 0 {
                weight_left -= weight;
                return 0;
            }
            let p = (weight as f64 / weight_left as f64).min(1.0);
            let c = rand_distr::Distribution::sample(
                &rand_distr::Binomial::new(*count, p).expect("p in [0,1]"),
                rng,
            );
            *count -= c;
            weight_left -= weight;
            c
        };
        let mut sampled = 0;
        let mut prev = 0;
        for ev in &self.events {
            let w = ev.cum - prev;
            prev = ev.cum;
            let c = draw(&mut remaining, w, rng);
            sampled += c;
            acc.add(ev.entry_i, ev.entry_j, c as f64 * ev.value);
        }
        let zeroed = draw(&mut remaining, self.zeroed_weight, rng);
        let exhausted = draw(&mut remaining, self.exhausted_weight, rng);
        (sampled, zeroed, exhausted, remaining)
    }

    /// Draws one run outcome; adds its contribution to `acc` and returns
    /// the sampled category.
    pub fn sample_into<R: Rng>(&self, rng: &mut R, acc: &mut EstMatrix) -> SampleSummary {
        if self.total == 0 {
            return SampleSummary { status: RunStatus::Survived, entry: None };
        }
        let x = rng.gen_range(0..self.total);
        if x < self.outcome_weight {
            let idx = self.events.partition_point(|ev| ev.cum <= x);
            let ev = &self.events[idx];
            acc.add(ev.entry_i, ev.entry_j, ev.value);
            return SampleSummary { status: RunStatus::Sampled, entry: Some((ev.entry_i, ev.entry_j)) };
        }
        let x = x - self.outcome_weight;
        if x < self.zeroed_weight {
            return SampleSummary { status: RunStatus::Zeroed, entry: None };
        }
        let x = x - self.zeroed_weight;
        if x < self.exhausted_weight {
            return SampleSummary { status: RunStatus::Exhausted, entry: None };
        }
        SampleSummary { status: RunStatus::Survived, entry: None }
    }
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

    fn ell2() -> BiasClassConfig {
        BiasClassConfig::from_toml_str(
            "ell = 2\nt = [\"-1\", \"0\"]\nr = [\"0.2\", \"0.9\"]\nalpha = 0.0\n",
        )
        .unwrap()
    }

    #[test]
    fn weights_partition_2m() {
        let classes = ell2();
        let eps = parse_decimal("1").unwrap();
        for seed in 0..5u64 {
            let stream = gen_random(6, 0.5, seed).unwrap();
            if stream.m() == 0 {
                continue;
            }
            let grid = DegreeGrid::new(6, &eps).unwrap();
            let oracle = HashOracle::new(seed, 2, &grid).unwrap();
            for &alpha in &grid.nonempty_levels() {
                for &beta in &grid.nonempty_levels() {
                    let pair = PairWindows::new(&grid, alpha, beta, stream.m() as u64).unwrap();
                    let cfg = SingleCopyConfig {
                        stream: &stream,
                        oracle: &oracle,
                        classes: &classes,
                        pair,
                        params: SketchParams { kappa: 2, capacity_const: 32 },
                        trace: false,
                        accounting: false,
                    };
                    let sched = Schedule::build(&cfg).unwrap();
                    let (o, z, e, s, total) = sched.category_weights();
                    assert_eq!(o + z + e + s, total);
                    assert_eq!(total, 2 * sched.m_cap());
                }
            }
        }
    }

    #[test]
    fn literal_runs_follow_the_schedule_distribution() {
        // Monte Carlo cross-check: the per-category frequencies and the
        // mean estimate of literal single-copy runs match the exact
        // categorical within 5 standard errors.
        let classes = ell2();
        let eps = parse_decimal("1").unwrap();
        let stream = gen_random(5, 0.6, 3).unwrap();
        let grid = DegreeGrid::new(5, &eps).unwrap();
        let oracle = HashOracle::new(42, 2, &grid).unwrap();
        let pair = PairWindows::new(&grid, 1, 0, stream.m() as u64).unwrap();
        let cfg = SingleCopyConfig {
            stream: &stream,
            oracle: &oracle,
            classes: &classes,
            pair,
            params: SketchParams { kappa: 2, capacity_const: 32 },
            trace: false,
            accounting: false,
        };
        let sched = Schedule::build(&cfg).unwrap();
        let (o, z, _e, _s, total) = sched.category_weights();

        let trials = 40_000u64;
        let mut sampled = 0u64;
        let mut zeroed = 0u64;
        let mut mean = EstMatrix::zero(classes.ell());
        for t in 0..trials {
            let mut rng = rng_from(7, "mc", t);
            let out = single_copy_run(&cfg, &mut rng).unwrap();
            match out.status {
                RunStatus::Sampled => sampled += 1,
                RunStatus::Zeroed => zeroed += 1,
                _ => {}
            }
            mean.add_matrix(&out.matrix);
        }
        mean.scale(1.0 / trials as f64);

        let check = |count: u64, weight: u64, label: &str| {
            let p = weight as f64 / total as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt().max(1e-12);
            let freq = count as f64 / trials as f64;
            assert!(
                (freq - p).abs() <= 5.0 * se + 1e-9,
                "{label}: frequency {freq} vs probability {p}"
            );
        };
        check(sampled, o, "sampled");
        check(zeroed, z, "zeroed");

        let expect = sched.mean_matrix();
        // per-copy entries are +-M/2 or 0; bound the SE by M/2 / sqrt(N)
        let se = sched.m_cap() as f64 / 2.0 / (trials as f64).sqrt();
        for i in 0..classes.ell() {
            for j in 0..classes.ell() {
                assert!(
                    (mean.get(i, j) - expect.get(i, j)).abs() <= 5.0 * se,
                    "entry ({i},{j}): {} vs {}",
                    mean.get(i, j),
                    expect.get(i, j)
                );
            }
        }
    }

    #[test]
    fn count_sampling_matches_per_copy_sampling() {
        // The binomial-chain sampler and k independent draws agree in
        // distribution: compare category frequencies and the mean matrix
        // at 5 standard errors.
        let classes = ell2();
        let eps = parse_decimal("1").unwrap();
        let stream = gen_random(6, 0.5, 9).unwrap();
        let grid = DegreeGrid::new(6, &eps).unwrap();
        let oracle = HashOracle::new(5, 2, &grid).unwrap();
        let pair = PairWindows::new(&grid, 0, 1, stream.m() as u64).unwrap();
        let cfg = SingleCopyConfig {
            stream: &stream,
            oracle: &oracle,
            classes: &classes,
            pair,
            params: SketchParams { kappa: 2, capacity_const: 32 },
            trace: false,
            accounting: false,
        };
        let sched = Schedule::build(&cfg).unwrap();
        let k = 200_000u64;

        let mut acc_counts = EstMatrix::zero(classes.ell());
        let mut rng = rng_from(3, "counts", 0);
        let (sampled, zeroed, exhausted, survived) =
            sched.sample_counts_into(k, &mut rng, &mut acc_counts);
        assert_eq!(sampled + zeroed + exhausted + survived, k);

        let mut acc_single = EstMatrix::zero(classes.ell());
        let mut rng = rng_from(3, "single", 0);
        let mut sampled_single = 0u64;
        for _ in 0..k {
            if sched.sample_into(&mut rng, &mut acc_single).status == RunStatus::Sampled {
                sampled_single += 1;
            }
        }
        let (o, _, _, _, total) = sched.category_weights();
        let p = o as f64 / total as f64;
        let se = (p * (1.0 - p) * k as f64).sqrt();
        assert!(
            (sampled as f64 - sampled_single as f64).abs() <= 10.0 * se.max(1.0),
            "sampled {sampled} vs {sampled_single}"
        );
        let se_mean = sched.m_cap() as f64 / 2.0 * (k as f64).sqrt();
        for i in 0..classes.ell() {
            for j in 0..classes.ell() {
                assert!(
                    (acc_counts.get(i, j) - acc_single.get(i, j)).abs() <= 10.0 * se_mean.max(1.0),
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn schedule_sampling_is_deterministic() {
        let classes = ell2();
        let eps = parse_decimal("1").unwrap();
        let stream = gen_random(5, 0.6, 3).unwrap();
        let grid = DegreeGrid::new(5, &eps).unwrap();
        let oracle = HashOracle::new(42, 2, &grid).unwrap();
        let pair = PairWindows::new(&grid, 0, 0, stream.m() as u64).unwrap();
        let cfg = SingleCopyConfig {
            stream: &stream,
            oracle: &oracle,
            classes: &classes,
            pair,
            params: SketchParams { kappa: 2, capacity_const: 32 },
            trace: false,
            accounting: false,
        };
        let sched = Schedule::build(&cfg).unwrap();
        let run = || {
            let mut acc = EstMatrix::zero(classes.ell());
            let mut rng = rng_from(1, "det", 0);
            let cats: Vec<_> = (0..100).map(|_| sched.sample_into(&mut rng, &mut acc)).collect();
            (cats, acc)
        };
        assert_eq!(run(), run());
    }
}
