//! Verification suites shared by the CLI (`qdicut verify`) and the
//! acceptance test harness.
//!
//! Every suite returns a [`CheckOutcome`] with a one-line detail string;
//! sizes are parameterized so the CLI can run a quick pass while the
//! acceptance harness runs the full-depth gates.

use num_rational::BigRational;
use rayon::prelude::*;

use crate::classes::{oblivious_value_exact, snapshot, BiasClassConfig};
use crate::comm::{
    classical_baseline_estimate, message_cost_classical_bits, message_cost_quantum_qubits,
    protocol_truth, quantum_protocol_estimate, DirectedMatching, LabeledVertices,
};
use crate::estimator::{full_estimate, EstimateOptions, EstimatorParams, Sampling};
use crate::exact::{parse_decimal, ratio_u64, to_f64};
use crate::graph::{gen_random, max_dicut_bruteforce, EdgeStream};
use crate::pseudo::{bias_bound_count, pseudosnapshot_restricted, DegreeGrid, HashOracle};
use crate::seeds::{derive_seed, rng_from};
use crate::sim::dense::dense_reference_run;
use crate::sim::invariant::{check_state_invariant, ReplayTracker};
use crate::sim::schedule::Schedule;
use crate::sim::{
    run_with_decider, single_copy_run, NeverDecider, PairWindows, RngDecider, RunStatus, SimState,
    SingleCopyConfig, SketchParams,
};
use crate::Result;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        Self { name, passed: true, detail }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self { name, passed: false, detail }
    }
}

/// Suite sizes.
#[derive(Debug, Clone, Copy)]
pub struct SuiteDepth {
    pub invariant_streams: usize,
    pub dense_instances: usize,
    pub unbiased_draws: usize,
    pub unbiased_copies: u64,
    pub nullity_copies: u64,
    pub variance_copies: u64,
    pub e2e_graphs: usize,
    pub e2e_seeds_per_graph: usize,
    pub e2e_copies: u64,
    pub comm_trials: u64,
}

impl SuiteDepth {
    pub fn deep() -> Self {
        Self {
            invariant_streams: 200,
            dense_instances: 100,
            unbiased_draws: 10,
            unbiased_copies: 200_000,
            nullity_copies: 120_000,
            variance_copies: 4_000,
            e2e_graphs: 50,
            e2e_seeds_per_graph: 3,
            e2e_copies: 100_000_000,
            comm_trials: 10_000,
        }
    }

    pub fn quick() -> Self {
        Self {
            invariant_streams: 30,
            dense_instances: 25,
            unbiased_draws: 2,
            unbiased_copies: 30_000,
            nullity_copies: 20_000,
            variance_copies: 1_000,
            e2e_graphs: 6,
            e2e_seeds_per_graph: 1,
            e2e_copies: 10_000_000,
            comm_trials: 2_000,
        }
    }
}

fn random_test_stream(idx: usize, seed: u64, max_n: u32, max_m: usize) -> Option<EdgeStream> {
    let n = 4 + (idx as u32 % (max_n - 3));
    let p = [0.2, 0.3, 0.45][idx % 3];
    let g = gen_random(n, p, derive_seed(seed, "stream", idx as u64)).ok()?;
    (g.m() > 0 && g.m() <= max_m).then_some(g)
}

fn test_classes() -> BiasClassConfig {
    BiasClassConfig::from_toml_str(
        "ell = 3\nt = [\"-1\", \"-0.3\", \"0.3\"]\nr = [\"0.1\", \"0.5\", \"0.9\"]\nalpha = 0.0\n",
    )
    .expect("static test config")
}

/// Criteria 1 and 2: the closed-form state invariant after every processed
/// edge, and the exact `M' = (1 - p_k) M` accounting, over random streams,
/// both accuracy settings, and every degree pair. Zero tolerance.
pub fn state_invariant_suite(depth: &SuiteDepth, seed: u64) -> Result<CheckOutcome> {
    let name = "state-invariant-and-accounting";
    let classes = test_classes();
    let mut streams = 0usize;
    let mut checks = 0u64;
    let mut idx = 0usize;
    while streams < depth.invariant_streams {
        idx += 1;
        let Some(stream) = random_test_stream(idx, seed, 10, 30) else { continue };
        streams += 1;
        let eps = parse_decimal(["0.5", "1"][idx % 2])?;
        let kappa = [2u32, 4][(idx / 2) % 2];
        let grid = DegreeGrid::new(stream.n() as u64, &eps)?;
        let oracle = HashOracle::new(derive_seed(seed, "oracle", idx as u64), kappa as u64, &grid)?;
        let params = SketchParams { kappa, capacity_const: 32 };
        let m = stream.m() as u64;
        for &alpha in &grid.nonempty_levels() {
            for &beta in &grid.nonempty_levels() {
                let pair = PairWindows::new(&grid, alpha, beta, m)?;
                // the never-terminate branch visits every edge
                let mut state = SimState::new(stream.n(), m, params, pair, true, false)?;
                let mut tracker = ReplayTracker::new(stream.n());
                for (e, &(u, v)) in stream.edges().iter().enumerate() {
                    let fa = oracle.f(alpha, e)?;
                    let fb = oracle.f(beta, e)?;
                    state.process_edge(e, u, v, fa, fb, &mut NeverDecider);
                    if !state.is_running() {
                        break;
                    }
                    tracker.record_edge(u, v, fa, fb);
                    if let Err(d) = check_state_invariant(&state, &tracker, &pair) {
                        return Ok(CheckOutcome::fail(name, format!("stream {idx} pair ({alpha},{beta}) edge {e}: {d}")));
                    }
                    if let Err(d) = state.accounting_ok().and_then(|_| state.recount_ok()) {
                        return Ok(CheckOutcome::fail(name, format!("stream {idx} pair ({alpha},{beta}) edge {e}: {d}")));
                    }
                    checks += 1;
                }
                // one sampled run per pair: the live state must satisfy the
                // same invariant while it survives
                let cfg = SingleCopyConfig {
                    stream: &stream,
                    oracle: &oracle,
                    classes: &classes,
                    pair,
                    params,
                    trace: false,
                    accounting: true,
                };
                let mut rng = rng_from(seed, "live", idx as u64);
                if let Err(e) = run_with_decider(&cfg, &mut RngDecider(&mut rng)) {
                    return Ok(CheckOutcome::fail(name, format!("live run accounting: {e}")));
                }
            }
        }
    }
    Ok(CheckOutcome::pass(
        name,
        format!("{streams} streams, {checks} per-edge closed-form and accounting checks"),
    ))
}

/// Criterion 2 as its own gate: along every sampled trace the exact
/// rational survival probability satisfies `M' = (1 - p_k) M`, with the
/// incremental `M'` re-derived by recount between edges. The assertions run
/// inside the instrumented simulator; any violation surfaces as an error.
pub fn accounting_suite(depth: &SuiteDepth, seed: u64) -> Result<CheckOutcome> {
    let name = "early-termination-accounting";
    let classes = test_classes();
    let mut traces = 0u64;
    let mut idx = 0usize;
    let mut streams = 0usize;
    while streams < depth.invariant_streams {
        idx += 1;
        let Some(stream) = random_test_stream(idx, seed ^ 0xacc7, 10, 30) else { continue };
        streams += 1;
        let eps = parse_decimal(["0.5", "1"][idx % 2])?;
        let kappa = [2u32, 4][(idx / 2) % 2];
        let grid = DegreeGrid::new(stream.n() as u64, &eps)?;
        let oracle = HashOracle::new(derive_seed(seed, "acc-o", idx as u64), kappa as u64, &grid)?;
        let levels = grid.nonempty_levels();
        for (li, &alpha) in levels.iter().enumerate() {
            let beta = levels[(li + idx) % levels.len()];
            let pair = PairWindows::new(&grid, alpha, beta, stream.m() as u64)?;
            let cfg = SingleCopyConfig {
                stream: &stream,
                oracle: &oracle,
                classes: &classes,
                pair,
                params: SketchParams { kappa, capacity_const: [32, 4][idx % 2] },
                trace: false,
                accounting: true,
            };
            for copy in 0..4u64 {
                let mut rng = rng_from(seed, "acc-run", (idx as u64) << 8 | copy);
                if let Err(e) = run_with_decider(&cfg, &mut RngDecider(&mut rng)) {
                    return Ok(CheckOutcome::fail(
                        name,
                        format!("stream {idx} pair ({alpha},{beta}) copy {copy}: {e}"),
                    ));
                }
                traces += 1;
            }
            // the never-terminate branch exercises the longest trace
            let mut rng_free = NeverDecider;
            let replay = SingleCopyConfig { accounting: true, ..cfg };
            if let Err(e) = run_with_decider(&replay, &mut rng_free) {
                return Ok(CheckOutcome::fail(name, format!("replay accounting: {e}")));
            }
            traces += 1;
        }
    }
    Ok(CheckOutcome::pass(
        name,
        format!("{traces} instrumented traces with exact M' = (1 - p) M bookkeeping"),
    ))
}

/// Criterion 3: interval-set and dense simulators produce identical traces
/// under shared seeds. Zero tolerance.
pub fn dense_equivalence_suite(depth: &SuiteDepth, seed: u64) -> Result<CheckOutcome> {
    let name = "dense-reference-equivalence";
    let classes = test_classes();
    let mut instances = 0usize;
    let mut idx = 0usize;
    while instances < depth.dense_instances {
        idx += 1;
        let Some(stream) = random_test_stream(idx, seed ^ 0xd5, 6, 14) else { continue };
        let eps = parse_decimal(["0.5", "1"][idx % 2])?;
        let kappa = [2u32, 4][idx % 2];
        let grid = DegreeGrid::new(stream.n() as u64, &eps)?;
        let oracle = HashOracle::new(derive_seed(seed, "do", idx as u64), kappa as u64, &grid)?;
        let levels = grid.nonempty_levels();
        let alpha = levels[idx % levels.len()];
        let beta = levels[(idx / 2) % levels.len()];
        let pair = PairWindows::new(&grid, alpha, beta, stream.m() as u64)?;
        let cfg = SingleCopyConfig {
            stream: &stream,
            oracle: &oracle,
            classes: &classes,
            pair,
            params: SketchParams { kappa, capacity_const: [32, 2][idx % 2] },
            trace: true,
            accounting: false,
        };
        for copy in 0..3u64 {
            let mut r1 = rng_from(seed, "dense-seed", (idx as u64) << 8 | copy);
            let mut r2 = r1.clone();
            let a = single_copy_run(&cfg, &mut r1)?;
            let b = dense_reference_run(&cfg, &mut r2)?;
            if a.trace != b.trace || a.status != b.status || a.entry != b.entry {
                return Ok(CheckOutcome::fail(
                    name,
                    format!("instance {idx} copy {copy}: traces diverge ({:?} vs {:?})", a.status, b.status),
                ));
            }
            instances += 1;
        }
    }
    Ok(CheckOutcome::pass(name, format!("{instances} shared-seed trace comparisons identical")))
}

struct EntryStats {
    ell: usize,
    pos: Vec<u64>,
    neg: Vec<u64>,
    runs: u64,
    exhausted: u64,
}

impl EntryStats {
    fn new(ell: usize) -> Self {
        Self { ell, pos: vec![0; ell * ell], neg: vec![0; ell * ell], runs: 0, exhausted: 0 }
    }

    fn absorb(mut self, other: EntryStats) -> EntryStats {
        for (a, b) in self.pos.iter_mut().zip(&other.pos) {
            *a += b;
        }
        for (a, b) in self.neg.iter_mut().zip(&other.neg) {
            *a += b;
        }
        self.runs += other.runs;
        self.exhausted += other.exhausted;
        self
    }

    fn mean_and_se(&self, i: usize, j: usize, magnitude: f64) -> (f64, f64) {
        let k = self.runs as f64;
        let p = self.pos[i * self.ell + j] as f64;
        let n = self.neg[i * self.ell + j] as f64;
        let mean = (p - n) * magnitude / k;
        let second = (p + n) * magnitude * magnitude / k;
        let var = (second - mean * mean).max(0.0);
        (mean, (var / k).sqrt())
    }
}

fn literal_entry_stats(cfg: &SingleCopyConfig, copies: u64, seed: u64) -> EntryStats {
    let ell = cfg.classes.ell();
    (0..copies)
        .into_par_iter()
        .fold(
            || EntryStats::new(ell),
            |mut stats, copy| {
                let mut rng = rng_from(seed, "mc-copy", copy);
                let out = single_copy_run(cfg, &mut rng).expect("validated config");
                stats.runs += 1;
                if out.status == RunStatus::Exhausted {
                    stats.exhausted += 1;
                }
                if let Some((i, j, value)) = out.entry {
                    if value > 0.0 {
                        stats.pos[i * ell + j] += 1;
                    } else {
                        stats.neg[i * ell + j] += 1;
                    }
                }
                stats
            },
        )
        .reduce(|| EntryStats::new(ell), EntryStats::absorb)
}

/// Criterion 4: Monte-Carlo means of literal single-copy runs match the
/// exact restricted pseudosnapshot entry-wise within the bias bound plus
/// five standard errors, for several fixed hash draws.
pub fn unbiasedness_suite(depth: &SuiteDepth, seed: u64) -> Result<CheckOutcome> {
    let name = "single-copy-unbiasedness";
    let classes = test_classes();
    // fixed n = 6 graphs with m <= 12
    let mut graphs = Vec::new();
    let mut gidx = 0u64;
    while graphs.len() < 2 {
        gidx += 1;
        let g = gen_random(6, 0.35, derive_seed(seed, "ug", gidx))?;
        if (4..=12).contains(&g.m()) {
            graphs.push(g);
        }
    }
    let mut draws_done = 0usize;
    let mut worst: f64 = 0.0;
    for draw in 0..depth.unbiased_draws {
        let stream = &graphs[draw % graphs.len()];
        let kappa = [2u64, 4][draw % 2];
        let eps = parse_decimal("1")?;
        let grid = DegreeGrid::new(stream.n() as u64, &eps)?;
        let oracle =
            HashOracle::new(derive_seed(seed, "udraw", draw as u64), kappa, &grid)?;
        // the degree pair with the most in-window edges carries the signal
        let mut best_pair = None;
        for &a in &grid.nonempty_levels() {
            for &b in &grid.nonempty_levels() {
                let total =
                    pseudosnapshot_restricted(stream, &classes, &oracle, &grid, a, b)?.total();
                if best_pair.is_none_or(|(_, _, t)| total > t) {
                    best_pair = Some((a, b, total));
                }
            }
        }
        let (alpha, beta, _) = best_pair.expect("grid has windows");
        let restricted = pseudosnapshot_restricted(stream, &classes, &oracle, &grid, alpha, beta)?;
        let bound = bias_bound_count(stream, &oracle, &grid, alpha, beta)? as f64;

        // capacity large enough that this fixed draw never exhausts
        let mut capacity_const = 32u64;
        let pair = PairWindows::new(&grid, alpha, beta, stream.m() as u64)?;
        let (cfg, m_cap) = loop {
            let params = SketchParams { kappa: kappa as u32, capacity_const };
            let cfg = SingleCopyConfig {
                stream,
                oracle: &oracle,
                classes: &classes,
                pair,
                params,
                trace: false,
                accounting: false,
            };
            let (_, _, exhausted, _, _) = Schedule::build(&cfg)?.category_weights();
            if exhausted == 0 {
                break (cfg, params.capacity(stream.m() as u64));
            }
            capacity_const *= 4;
        };
        let stats = literal_entry_stats(&cfg, depth.unbiased_copies, derive_seed(seed, "umc", draw as u64));
        if stats.exhausted > 0 {
            return Ok(CheckOutcome::fail(name, format!("draw {draw}: unexpected exhausted copies")));
        }
        let magnitude = m_cap as f64 / 2.0;
        for i in 0..classes.ell() {
            for j in 0..classes.ell() {
                let (mean, se) = stats.mean_and_se(i, j, magnitude);
                let target = restricted.get(i, j) as f64;
                let tolerance = bound + 5.0 * se;
                let excess = (mean - target).abs() - tolerance;
                worst = worst.max((mean - target).abs() / (tolerance + 1e-12));
                if excess > 1e-9 {
                    return Ok(CheckOutcome::fail(
                        name,
                        format!(
                            "draw {draw} pair ({alpha},{beta}) entry ({i},{j}): mean {mean:.4} vs exact {target} with bias bound {bound} and 5se {:.4}",
                            5.0 * se
                        ),
                    ));
                }
            }
        }
        draws_done += 1;
    }
    Ok(CheckOutcome::pass(
        name,
        format!(
            "{draws_done} fixed draws x {} copies; worst |mean - exact| at {:.2} of tolerance",
            depth.unbiased_copies, worst
        ),
    ))
}

/// Criterion 5: streams whose every edge violates the degree windows give
/// per-entry means within five standard errors of zero.
pub fn offclass_nullity_suite(depth: &SuiteDepth, seed: u64) -> Result<CheckOutcome> {
    let name = "off-class-nullity";
    let classes = test_classes();
    // (a) a perfect matching measured at the top degree windows: every
    // before-degree is 1 < n
    let matching = EdgeStream::new(8, vec![(0, 1), (2, 3), (4, 5), (6, 7)]).expect("static");
    // (b) one repeated edge measured at split windows: both endpoints
    // always share the same before-degree, so they can never sit in
    // different windows
    let repeated = EdgeStream::new(3, vec![(0, 1); 6]).expect("static");

    let eps = parse_decimal("1")?;
    let mut cases = Vec::new();
    {
        let grid = DegreeGrid::new(8, &eps)?;
        let top = *grid.nonempty_levels().last().unwrap();
        cases.push((matching.clone(), grid, top, top, "matching@top"));
    }
    {
        let grid = DegreeGrid::new(3, &eps)?;
        let lv = grid.nonempty_levels();
        cases.push((repeated.clone(), grid, lv[0], lv[1], "repeated@split"));
    }

    let mut detail = Vec::new();
    for (case_idx, (stream, grid, alpha, beta, label)) in cases.into_iter().enumerate() {
        let oracle = HashOracle::new(derive_seed(seed, "null", case_idx as u64), 2, &grid)?;
        let restricted = pseudosnapshot_restricted(&stream, &classes, &oracle, &grid, alpha, beta)?;
        if restricted.total() != 0 {
            return Ok(CheckOutcome::fail(name, format!("{label}: construction has in-window edges")));
        }
        let pair = PairWindows::new(&grid, alpha, beta, stream.m() as u64)?;
        let params = SketchParams { kappa: 2, capacity_const: 32 };
        let cfg = SingleCopyConfig {
            stream: &stream,
            oracle: &oracle,
            classes: &classes,
            pair,
            params,
            trace: false,
            accounting: false,
        };
        let stats =
            literal_entry_stats(&cfg, depth.nullity_copies, derive_seed(seed, "nmc", case_idx as u64));
        let magnitude = params.capacity(stream.m() as u64) as f64 / 2.0;
        let mut max_sigma: f64 = 0.0;
        for i in 0..classes.ell() {
            for j in 0..classes.ell() {
                let (mean, se) = stats.mean_and_se(i, j, magnitude);
                if mean.abs() > 5.0 * se + 1e-12 {
                    return Ok(CheckOutcome::fail(
                        name,
                        format!("{label} entry ({i},{j}): mean {mean:.4} exceeds 5se {:.4}", 5.0 * se),
                    ));
                }
                if se > 0.0 {
                    max_sigma = max_sigma.max(mean.abs() / se);
                }
            }
        }
        detail.push(format!("{label} max |mean|/se {max_sigma:.2}"));
    }
    Ok(CheckOutcome::pass(name, detail.join("; ")))
}

/// Criterion 6: the structural per-entry variance bound `(M/2)^2` holds
/// exactly, reported against the `kappa^6 m^2` scaling.
pub fn variance_suite(depth: &SuiteDepth, seed: u64) -> Result<CheckOutcome> {
    let name = "variance-bound";
    let classes = test_classes();
    let mut stream = None;
    for g in 0..50u64 {
        let s = gen_random(6, 0.4, derive_seed(seed, "vg", g))?;
        if (8..=12).contains(&s.m()) {
            stream = Some(s);
            break;
        }
    }
    let stream = stream.expect("found a medium stream");
    let eps = parse_decimal("1")?;
    let grid = DegreeGrid::new(stream.n() as u64, &eps)?;
    let m = stream.m() as u64;
    let mut ratios = Vec::new();
    for kappa in [2u32, 4, 8] {
        let oracle = HashOracle::new(derive_seed(seed, "vo", kappa as u64), kappa as u64, &grid)?;
        let params = SketchParams { kappa, capacity_const: 32 };
        let m_cap = params.capacity(m);
        let levels = grid.nonempty_levels();
        let mut worst_var: f64 = 0.0;
        for &alpha in &levels {
            let beta = levels[0];
            let pair = PairWindows::new(&grid, alpha, beta, m)?;
            let cfg = SingleCopyConfig {
                stream: &stream,
                oracle: &oracle,
                classes: &classes,
                pair,
                params,
                trace: false,
                accounting: false,
            };
            let stats = literal_entry_stats(&cfg, depth.variance_copies, derive_seed(seed, "vmc", kappa as u64 ^ alpha as u64));
            let magnitude = m_cap as f64 / 2.0;
            for i in 0..classes.ell() {
                for j in 0..classes.ell() {
                    let (_mean, se) = stats.mean_and_se(i, j, magnitude);
                    let var = se * se * stats.runs as f64;
                    if var > magnitude * magnitude + 1e-6 {
                        return Ok(CheckOutcome::fail(
                            name,
                            format!("kappa {kappa} entry ({i},{j}): variance {var} above (M/2)^2"),
                        ));
                    }
                    worst_var = worst_var.max(var);
                }
            }
        }
        let scale = (kappa as f64).powi(6) * (m as f64).powi(2);
        ratios.push(format!("kappa {kappa}: max var {worst_var:.1} = {:.5} of kappa^6 m^2", worst_var / scale));
    }
    Ok(CheckOutcome::pass(name, ratios.join("; ")))
}

/// Criterion 7: oblivious soundness. Exact `r† S (1-r) <= OPT` on every
/// suite graph for every tested config, and the production thresholds
/// clear `alpha_req * OPT`.
pub fn oblivious_soundness_suite(
    production: &BiasClassConfig,
    alpha_req: &str,
) -> Result<CheckOutcome> {
    let name = "oblivious-soundness";
    let alpha = parse_decimal(alpha_req)?;
    let configs = [("test", test_classes()), ("production", production.clone())];
    let mut min_ratio: Option<BigRational> = None;
    for (label, cfg) in &configs {
        for (gname, g) in crate::corpus::suite_graphs() {
            let opt = max_dicut_bruteforce(&g)?;
            let value = oblivious_value_exact(&snapshot(&g, cfg), cfg)?;
            if value > ratio_u64(opt) {
                return Ok(CheckOutcome::fail(
                    name,
                    format!("{label}/{gname}: oblivious value {value} exceeds OPT {opt}"),
                ));
            }
            if *label == "production" && opt > 0 {
                let floor = &alpha * ratio_u64(opt);
                if value < floor {
                    return Ok(CheckOutcome::fail(
                        name,
                        format!(
                            "production/{gname}: value {} below {alpha_req} * OPT = {}",
                            to_f64(&value),
                            to_f64(&floor)
                        ),
                    ));
                }
                let ratio = value / ratio_u64(opt);
                if min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                    min_ratio = Some(ratio);
                }
            }
        }
    }
    let detail = match min_ratio {
        Some(r) => format!(
            "suite of {} graphs; production min ratio {:.4} >= {alpha_req}",
            crate::corpus::suite_graphs().len(),
            to_f64(&r)
        ),
        None => "suite empty".into(),
    };
    Ok(CheckOutcome::pass(name, detail))
}

/// End-to-end estimator parameters used by criterion 8.
pub fn e2e_params(copies: u64, seed: u64) -> EstimatorParams {
    EstimatorParams {
        eps: parse_decimal("0.25").expect("static"),
        kappa: 2,
        capacity_const: 32,
        copies_per_pair: copies,
        med_reps: 5,
        correction: 0.0,
        seed,
    }
}

/// Criterion 8: the median estimate lands in
/// `[0.4844 OPT - 0.05 m, OPT + 0.05 m]` for at least 90% of master seeds
/// over random graphs with `n <= 8`.
pub fn end_to_end_suite(
    depth: &SuiteDepth,
    production: &BiasClassConfig,
    seed: u64,
) -> Result<CheckOutcome> {
    let name = "end-to-end-approximation";
    let mut graphs = Vec::new();
    let mut idx = 0u64;
    while graphs.len() < depth.e2e_graphs {
        idx += 1;
        let n = 6 + (idx % 3) as u32;
        let p = [0.25, 0.4, 0.6][(idx / 3) as usize % 3];
        let g = gen_random(n, p, derive_seed(seed, "e2e-g", idx))?;
        if g.m() >= 3 {
            graphs.push(g);
        }
    }
    let jobs: Vec<(usize, u64)> = (0..graphs.len())
        .flat_map(|g| (0..depth.e2e_seeds_per_graph as u64).map(move |s| (g, s)))
        .collect();
    let results: Vec<(bool, f64)> = jobs
        .par_iter()
        .map(|&(g, s)| {
            let stream = &graphs[g];
            let opt = max_dicut_bruteforce(stream).expect("small instance") as f64;
            let m = stream.m() as f64;
            let params = e2e_params(depth.e2e_copies, derive_seed(seed, "e2e-s", (g as u64) << 16 | s));
            let opts = EstimateOptions { sampling: Sampling::Counts, ..Default::default() };
            let report = full_estimate(stream, production, &params, opts).expect("validated params");
            let lo = 0.4844 * opt - 0.05 * m;
            let hi = opt + 0.05 * m;
            let ok = report.estimate >= lo && report.estimate <= hi;
            (ok, report.estimate / opt.max(1.0))
        })
        .collect();
    let hits = results.iter().filter(|(ok, _)| *ok).count();
    let rate = hits as f64 / results.len() as f64;
    let detail = format!(
        "{}/{} runs in window ({:.1}%), {} graphs x {} seeds, K = {}",
        hits,
        results.len(),
        rate * 100.0,
        graphs.len(),
        depth.e2e_seeds_per_graph,
        depth.e2e_copies
    );
    if rate >= 0.9 {
        Ok(CheckOutcome::pass(name, detail))
    } else {
        Ok(CheckOutcome::fail(name, detail))
    }
}

/// Criterion 9: communication demo. Unbiased quantum estimator, variance
/// within `2 n^2 / k`, classical baseline accuracy at the birthday-paradox
/// sample size, and the qubit-vs-bit cost gap.
pub fn comm_suite(depth: &SuiteDepth, seed: u64) -> Result<CheckOutcome> {
    let name = "communication-demo";
    // unbiasedness + variance on a mid-size labeled matching
    let n = 60u32;
    let label_bits = 2u64;
    let mut rng = rng_from(seed, "comm-inst", 0);
    let labels =
        LabeledVertices::new((0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..4u32)).collect());
    let mut perm: Vec<u32> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
    let matching =
        DirectedMatching::new(perm.chunks_exact(2).map(|c| (c[0], c[1])).collect(), n)?;
    let (i, j) = (1u32, 2u32);
    let truth = protocol_truth(&matching, &labels, i, j) as f64;
    let k = 40u64;
    let trials = depth.comm_trials;
    let (mut mean, mut sq) = (0.0, 0.0);
    for t in 0..trials {
        let e = quantum_protocol_estimate(&matching, &labels, i, j, k, derive_seed(seed, "cq", t))?;
        mean += e;
        sq += e * e;
    }
    mean /= trials as f64;
    sq /= trials as f64;
    let var = sq - mean * mean;
    let se = (var / trials as f64).sqrt();
    if (mean - truth).abs() > 5.0 * se {
        return Ok(CheckOutcome::fail(
            name,
            format!("quantum mean {mean:.3} vs truth {truth} (5se {:.3})", 5.0 * se),
        ));
    }
    let var_limit = 2.0 * (n as f64) * (n as f64) / k as f64;
    if var > var_limit {
        return Ok(CheckOutcome::fail(name, format!("variance {var:.1} above 2 n^2/k = {var_limit:.1}")));
    }

    // classical baseline: n = 400, eps = 0.2, s = ceil(0.5 sqrt(n)/eps^2)
    let bn = 400u32;
    let eps = 0.2;
    let s = ((0.5 * (bn as f64).sqrt() / (eps * eps)).ceil() as u32).min(bn);
    let mut brng = rng_from(seed, "comm-base", 0);
    let blabels =
        LabeledVertices::new((0..bn).map(|_| rand::Rng::gen_range(&mut brng, 0..4u32)).collect());
    let mut bperm: Vec<u32> = (0..bn).collect();
    rand::seq::SliceRandom::shuffle(bperm.as_mut_slice(), &mut brng);
    let bmatching =
        DirectedMatching::new(bperm.chunks_exact(2).map(|c| (c[0], c[1])).collect(), bn)?;
    let btruth = protocol_truth(&bmatching, &blabels, i, j) as f64;
    let btrials = (depth.comm_trials / 10).max(100);
    let mut within = 0u64;
    for t in 0..btrials {
        let e = classical_baseline_estimate(&bmatching, &blabels, i, j, s, derive_seed(seed, "cb", t))?;
        if (e - btruth).abs() <= eps * bn as f64 {
            within += 1;
        }
    }
    let frac = within as f64 / btrials as f64;
    if frac < 2.0 / 3.0 {
        return Ok(CheckOutcome::fail(
            name,
            format!("baseline within eps*n only {:.0}% of trials at s = {s}", frac * 100.0),
        ));
    }

    let qubits = message_cost_quantum_qubits(bn as u64, k, label_bits);
    let bits = message_cost_classical_bits(bn as u64, s as u64, label_bits);
    if qubits >= bits {
        return Ok(CheckOutcome::fail(name, format!("no cost gap: {qubits} qubits vs {bits} bits")));
    }
    Ok(CheckOutcome::pass(
        name,
        format!(
            "mean {mean:.2} vs truth {truth}; var {var:.1} <= {var_limit:.1}; baseline {:.0}% within eps*n; {qubits} qubits vs {bits} bits",
            frac * 100.0
        ),
    ))
}

/// Criterion 10: the simulated register width grows by at most one bit per
/// doubling of `m`, and totals scale linearly in the copy count.
pub fn space_suite() -> Result<CheckOutcome> {
    let name = "space-accounting";
    let params = e2e_params(1, 0);
    let mut widths = Vec::new();
    let mut prev: Option<u64> = None;
    for exp in 6..=14u32 {
        let w = crate::estimator::register_width_bits(&params, 1u64 << exp, 1 << 10);
        if let Some(p) = prev {
            if w < p || w - p > 1 {
                return Ok(CheckOutcome::fail(
                    name,
                    format!("width jumped from {p} to {w} at m = 2^{exp}"),
                ));
            }
        }
        widths.push(w);
        prev = Some(w);
    }
    let q1 = crate::estimator::qubit_accounting(&e2e_params(100, 0), 256, 64, 9);
    let q2 = crate::estimator::qubit_accounting(&e2e_params(200, 0), 256, 64, 9);
    if q2.total_qubits != 2 * q1.total_qubits {
        return Ok(CheckOutcome::fail(name, "totals not linear in copies".into()));
    }
    Ok(CheckOutcome::pass(name, format!("widths over m = 2^6..2^14: {widths:?}")))
}

/// Runs every suite at quick or deep size.
pub fn run_all(production: &BiasClassConfig, deep: bool, seed: u64) -> Result<Vec<CheckOutcome>> {
    let depth = if deep { SuiteDepth::deep() } else { SuiteDepth::quick() };
    Ok(vec![
        state_invariant_suite(&depth, seed)?,
        accounting_suite(&depth, seed)?,
        dense_equivalence_suite(&depth, seed)?,
        unbiasedness_suite(&depth, seed)?,
        offclass_nullity_suite(&depth, seed)?,
        variance_suite(&depth, seed)?,
        oblivious_soundness_suite(production, "0.4844")?,
        end_to_end_suite(&depth, production, seed)?,
        comm_suite(&depth, seed)?,
        space_suite()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_structural_suites_pass() {
        let depth = SuiteDepth::quick();
        let seed = 4242;
        let a = state_invariant_suite(&depth, seed).unwrap();
        assert!(a.passed, "{}", a.detail);
        let b = dense_equivalence_suite(&depth, seed).unwrap();
        assert!(b.passed, "{}", b.detail);
        let c = space_suite().unwrap();
        assert!(c.passed, "{}", c.detail);
    }
}
