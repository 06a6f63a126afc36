//! The full estimation pipeline: per-pair copies, pointwise averaging,
//! summation over degree-class pairs, the additive correction, and the
//! median over repetitions with fresh hash functions.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::classes::{oblivious_value, snapshot, BiasClassConfig, EstMatrix};
use crate::exact::{ceil_log2, to_f64};
use crate::graph::{max_dicut_bruteforce, EdgeStream};
use crate::pseudo::{pseudosnapshot_exact, DegreeGrid, HashOracle};
use crate::seeds::{derive_seed, rng_from};
use crate::sim::schedule::Schedule;
use crate::sim::{single_copy_run, PairWindows, RunStatus, SingleCopyConfig, SketchParams};
use crate::{QdError, Result};

/// Parameters of one full estimation run. `copies_per_pair` and `med_reps`
/// are direct desk-scale knobs; the asymptotically prescribed values are
/// echoed in the qubit report for context.
#[derive(Debug, Clone)]
pub struct EstimatorParams {
    pub eps: BigRational,
    pub kappa: u32,
    pub capacity_const: u64,
    pub copies_per_pair: u64,
    pub med_reps: u32,
    /// Constant of the `- correction * eps * m` shift applied to the
    /// oblivious value. Zero keeps the raw estimate for diagnostics.
    pub correction: f64,
    pub seed: u64,
}

impl EstimatorParams {
    pub fn validate(&self) -> Result<()> {
        if self.eps <= BigRational::zero() || self.eps > BigRational::one() {
            return Err(QdError::Param("eps must lie in (0, 1]".into()));
        }
        if self.copies_per_pair < 1 || self.med_reps < 1 {
            return Err(QdError::Param("need at least one copy and one repetition".into()));
        }
        if self.correction < 0.0 {
            return Err(QdError::Param("correction constant must be nonnegative".into()));
        }
        self.sketch().validate()
    }

    pub fn sketch(&self) -> SketchParams {
        SketchParams { kappa: self.kappa, capacity_const: self.capacity_const }
    }
}

/// Termination statistics over a batch of single-copy runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RunTally {
    pub sampled: u64,
    pub zeroed: u64,
    pub exhausted: u64,
    pub survived: u64,
}

impl RunTally {
    fn record(&mut self, status: RunStatus) {
        match status {
            RunStatus::Sampled => self.sampled += 1,
            RunStatus::Zeroed => self.zeroed += 1,
            RunStatus::Exhausted => self.exhausted += 1,
            RunStatus::Survived => self.survived += 1,
        }
    }

    fn absorb(&mut self, other: &RunTally) {
        self.sampled += other.sampled;
        self.zeroed += other.zeroed;
        self.exhausted += other.exhausted;
        self.survived += other.survived;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub alpha: usize,
    pub beta: usize,
    pub mean: EstMatrix,
    pub tally: RunTally,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepReport {
    pub value: f64,
    pub matrix: EstMatrix,
    pub pairs: Vec<PairReport>,
}

/// Simulated space bookkeeping. One run's register holds a scratch-or-graph
/// tag, a value register sized for `M`, a vertex register, the family tag,
/// and a copy index; only the value register grows with `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QubitReport {
    pub register_width_bits: u64,
    pub copies_per_pair: u64,
    pub degree_pairs: u64,
    pub repetitions: u64,
    pub total_qubits: u64,
    /// Copies per pair the asymptotic analysis would prescribe
    /// (`kappa^6 eps^-3 log^2 n`, constant 1).
    pub prescribed_copies_per_pair: u64,
    /// Median repetitions prescribed for failure probability 0.1
    /// (`log2(1/delta)`, constant 1).
    pub prescribed_repetitions: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    pub eps: String,
    pub kappa: u32,
    pub capacity_const: u64,
    pub copies_per_pair: u64,
    pub med_reps: u32,
    pub correction: f64,
    pub seed: u64,
    pub sampling: String,
}

/// The fully resolved class configuration, echoed for reproducibility.
#[derive(Debug, Clone, Serialize)]
pub struct ClassesEcho {
    pub ell: usize,
    pub t: Vec<String>,
    pub r: Vec<String>,
    pub alpha: f64,
}

impl ClassesEcho {
    fn of(classes: &BiasClassConfig) -> Self {
        Self {
            ell: classes.ell(),
            t: classes.thresholds().iter().map(crate::exact::ratio_string).collect(),
            r: classes.probs().iter().map(crate::exact::ratio_string).collect(),
            alpha: classes.alpha,
        }
    }
}

/// Full output of one estimation run; serializes to a stable JSON layout.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n: u32,
    pub m: u64,
    pub estimate: f64,
    pub rep_values: Vec<f64>,
    pub opt: Option<u64>,
    pub ratio: Option<f64>,
    pub exact_snapshot_value: Option<f64>,
    pub exact_pseudosnapshot_values: Option<Vec<f64>>,
    pub reps: Vec<RepReport>,
    pub tally: RunTally,
    pub qubits: QubitReport,
    pub params: ParamsEcho,
    pub classes: ClassesEcho,
}

/// How single copies are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Step-by-step simulation of every copy.
    Literal,
    /// One schedule replay per pair, then one draw per copy from the exact
    /// outcome distribution (see [`Schedule`]). Distributionally identical.
    Schedule,
    /// Schedule replay, then multinomial count sampling over the outcome
    /// events; cost independent of the copy count.
    Counts,
}

#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    pub sampling: Sampling,
    /// Compare against the brute-force optimum (small instances only).
    pub with_opt: bool,
    /// Report exact snapshot / pseudosnapshot oblivious values.
    pub with_exact: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { sampling: Sampling::Schedule, with_opt: false, with_exact: false }
    }
}

/// Pointwise average of `k` independent single-copy runs sharing the hash
/// oracle (fresh measurement randomness per copy).
#[allow(clippy::too_many_arguments)]
pub fn run_pair(
    stream: &EdgeStream,
    classes: &BiasClassConfig,
    oracle: &HashOracle,
    grid: &DegreeGrid,
    alpha: usize,
    beta: usize,
    params: SketchParams,
    k: u64,
    seed: u64,
) -> Result<(EstMatrix, RunTally)> {
    let pair = PairWindows::new(grid, alpha, beta, stream.m() as u64)?;
    let cfg = SingleCopyConfig {
        stream,
        oracle,
        classes,
        pair,
        params,
        trace: false,
        accounting: false,
    };
    let ell = classes.ell();
    // integer tallies keep the reduction exact and order-independent
    let (counts, tally) = (0..k)
        .into_par_iter()
        .map(|copy| {
            let mut rng = rng_from(seed, "copy", copy);
            let out = single_copy_run(&cfg, &mut rng).expect("validated params");
            let mut counts = vec![0i64; ell * ell];
            if let Some((i, j, value)) = out.entry {
                counts[i * ell + j] = if value > 0.0 { 1 } else { -1 };
            }
            let mut tally = RunTally::default();
            tally.record(out.status);
            (counts, tally)
        })
        .reduce(
            || (vec![0i64; ell * ell], RunTally::default()),
            |(mut ca, mut ta), (cb, tb)| {
                for (a, b) in ca.iter_mut().zip(&cb) {
                    *a += b;
                }
                ta.absorb(&tb);
                (ca, ta)
            },
        );
    let magnitude = params.capacity(stream.m() as u64) as f64 / 2.0;
    let mut mean = EstMatrix::zero(ell);
    for i in 0..ell {
        for j in 0..ell {
            mean.add(i, j, counts[i * ell + j] as f64 * magnitude / k as f64);
        }
    }
    Ok((mean, tally))
}

/// Same distribution as [`run_pair`], via the exact per-pair outcome
/// categorical.
#[allow(clippy::too_many_arguments)]
pub fn run_pair_schedule(
    stream: &EdgeStream,
    classes: &BiasClassConfig,
    oracle: &HashOracle,
    grid: &DegreeGrid,
    alpha: usize,
    beta: usize,
    params: SketchParams,
    k: u64,
    seed: u64,
) -> Result<(EstMatrix, RunTally)> {
    let pair = PairWindows::new(grid, alpha, beta, stream.m() as u64)?;
    let cfg = SingleCopyConfig {
        stream,
        oracle,
        classes,
        pair,
        params,
        trace: false,
        accounting: false,
    };
    let sched = Schedule::build(&cfg)?;
    let mut acc = EstMatrix::zero(classes.ell());
    let mut tally = RunTally::default();
    let mut rng = rng_from(seed, "copies", 0);
    for _ in 0..k {
        let s = sched.sample_into(&mut rng, &mut acc);
        tally.record(s.status);
    }
    acc.scale(1.0 / k as f64);
    Ok((acc, tally))
}

/// Same distribution again, with the copy count sampled in aggregate.
#[allow(clippy::too_many_arguments)]
pub fn run_pair_counts(
    stream: &EdgeStream,
    classes: &BiasClassConfig,
    oracle: &HashOracle,
    grid: &DegreeGrid,
    alpha: usize,
    beta: usize,
    params: SketchParams,
    k: u64,
    seed: u64,
) -> Result<(EstMatrix, RunTally)> {
    let pair = PairWindows::new(grid, alpha, beta, stream.m() as u64)?;
    let cfg = SingleCopyConfig {
        stream,
        oracle,
        classes,
        pair,
        params,
        trace: false,
        accounting: false,
    };
    let sched = Schedule::build(&cfg)?;
    let mut acc = EstMatrix::zero(classes.ell());
    let mut rng = rng_from(seed, "copies", 0);
    let (sampled, zeroed, exhausted, survived) = sched.sample_counts_into(k, &mut rng, &mut acc);
    acc.scale(1.0 / k as f64);
    Ok((acc, RunTally { sampled, zeroed, exhausted, survived }))
}

/// All (head level, tail level) pairs over nonempty degree windows.
pub fn degree_pairs(grid: &DegreeGrid) -> Vec<(usize, usize)> {
    let lv = grid.nonempty_levels();
    lv.iter().flat_map(|&a| lv.iter().map(move |&b| (a, b))).collect()
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Width of the simulated register for one copy, in qubits.
pub fn register_width_bits(params: &EstimatorParams, m: u64, n: u32) -> u64 {
    let m_cap = params.sketch().capacity(m.max(1));
    let copies = params.sketch().copies();
    ceil_log2(m_cap + 1) + ceil_log2(n.max(2) as u64) + 2 + ceil_log2(copies) + 1
}

pub fn qubit_accounting(params: &EstimatorParams, m: u64, n: u32, pairs: u64) -> QubitReport {
    let width = register_width_bits(params, m, n);
    let log_n = ceil_log2(n.max(2) as u64).max(1);
    let kappa = params.kappa as u64;
    let eps = to_f64(&params.eps);
    let prescribed = ((kappa.pow(6) as f64) * eps.powi(-3) * (log_n * log_n) as f64).ceil() as u64;
    QubitReport {
        register_width_bits: width,
        copies_per_pair: params.copies_per_pair,
        degree_pairs: pairs,
        repetitions: params.med_reps as u64,
        total_qubits: width * params.copies_per_pair * pairs * params.med_reps as u64,
        prescribed_copies_per_pair: prescribed,
        prescribed_repetitions: ceil_log2(10),
    }
}

/// The top-level pipeline: for each repetition draw fresh hash
/// functions, estimate every degree-pair restriction with `K` averaged
/// copies, sum into a pseudosnapshot estimate, apply the oblivious value
/// and the `- correction * eps * m` shift, then take the median across
/// repetitions.
pub fn full_estimate(
    stream: &EdgeStream,
    classes: &BiasClassConfig,
    params: &EstimatorParams,
    opts: EstimateOptions,
) -> Result<RunReport> {
    params.validate()?;
    let n = stream.n();
    let m = stream.m() as u64;
    let grid = DegreeGrid::new(n.max(1) as u64, &params.eps)?;
    let pairs = degree_pairs(&grid);
    let correction_shift = params.correction * to_f64(&params.eps) * m as f64;

    let mut reps = Vec::with_capacity(params.med_reps as usize);
    let mut values = Vec::with_capacity(params.med_reps as usize);
    let mut total_tally = RunTally::default();
    let mut pseudo_values = Vec::new();

    for rep in 0..params.med_reps {
        let oracle = HashOracle::new(derive_seed(params.seed, "hash", rep as u64), params.kappa as u64, &grid)?;
        let mut matrix = EstMatrix::zero(classes.ell());
        let mut pair_reports = Vec::with_capacity(pairs.len());
        for (pi, &(alpha, beta)) in pairs.iter().enumerate() {
            let pair_seed = derive_seed(params.seed, "rep-pair", ((rep as u64) << 32) | pi as u64);
            let (mean, tally) = match opts.sampling {
                Sampling::Literal => run_pair(
                    stream,
                    classes,
                    &oracle,
                    &grid,
                    alpha,
                    beta,
                    params.sketch(),
                    params.copies_per_pair,
                    pair_seed,
                )?,
                Sampling::Schedule => run_pair_schedule(
                    stream,
                    classes,
                    &oracle,
                    &grid,
                    alpha,
                    beta,
                    params.sketch(),
                    params.copies_per_pair,
                    pair_seed,
                )?,
                Sampling::Counts => run_pair_counts(
                    stream,
                    classes,
                    &oracle,
                    &grid,
                    alpha,
                    beta,
                    params.sketch(),
                    params.copies_per_pair,
                    pair_seed,
                )?,
            };
            matrix.add_matrix(&mean);
            total_tally.absorb(&tally);
            pair_reports.push(PairReport { alpha, beta, mean, tally });
        }
        let value = oblivious_value(&matrix, classes)? - correction_shift;
        values.push(value);
        if opts.with_exact {
            let pseudo = pseudosnapshot_exact(stream, classes, &oracle, &grid)?;
            pseudo_values.push(oblivious_value(&EstMatrix::from_counts(&pseudo), classes)?);
        }
        reps.push(RepReport { value, matrix, pairs: pair_reports });
    }

    let estimate = median(values.clone());
    let opt = if opts.with_opt { Some(max_dicut_bruteforce(stream)?) } else { None };
    let ratio = opt.and_then(|o| (o > 0).then(|| estimate / o as f64));
    let exact_snapshot_value = opts.with_exact.then(|| {
        oblivious_value(&EstMatrix::from_counts(&snapshot(stream, classes)), classes)
            .expect("dimensions match")
    });

    Ok(RunReport {
        n,
        m,
        estimate,
        rep_values: values,
        opt,
        ratio,
        exact_snapshot_value,
        exact_pseudosnapshot_values: opts.with_exact.then_some(pseudo_values),
        reps,
        tally: total_tally,
        qubits: qubit_accounting(params, m, n, pairs.len() as u64),
        params: ParamsEcho {
            eps: crate::exact::ratio_string(&params.eps),
            kappa: params.kappa,
            capacity_const: params.capacity_const,
            copies_per_pair: params.copies_per_pair,
            med_reps: params.med_reps,
            correction: params.correction,
            seed: params.seed,
            sampling: match opts.sampling {
                Sampling::Literal => "literal".into(),
                Sampling::Schedule => "schedule".into(),
                Sampling::Counts => "counts".into(),
            },
        },
        classes: ClassesEcho::of(classes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_decimal;
    use crate::graph::{gen_random, parse_stream};

    fn ell2() -> BiasClassConfig {
        BiasClassConfig::from_toml_str(
            "ell = 2\nt = [\"-1\", \"0\"]\nr = [\"0.2\", \"0.9\"]\nalpha = 0.0\n",
        )
        .unwrap()
    }

    fn params(seed: u64) -> EstimatorParams {
        EstimatorParams {
            eps: parse_decimal("1").unwrap(),
            kappa: 2,
            capacity_const: 32,
            copies_per_pair: 200,
            med_reps: 3,
            correction: 0.0,
            seed,
        }
    }

    #[test]
    fn median_is_the_middle_value() {
        assert_eq!(median(vec![9.0, 3.0, 5.0]), 5.0);
        assert_eq!(median(vec![4.0, 1.0]), 2.5);
        assert_eq!(median(vec![7.0]), 7.0);
    }

    #[test]
    fn single_copy_pair_mean_equals_one_run() {
        let stream = gen_random(5, 0.5, 2).unwrap();
        let classes = ell2();
        let eps = parse_decimal("1").unwrap();
        let grid = DegreeGrid::new(5, &eps).unwrap();
        let oracle = HashOracle::new(4, 2, &grid).unwrap();
        let sketch = SketchParams { kappa: 2, capacity_const: 32 };
        let (mean, tally) =
            run_pair(&stream, &classes, &oracle, &grid, 0, 0, sketch, 1, 99).unwrap();
        let pair = PairWindows::new(&grid, 0, 0, stream.m() as u64).unwrap();
        let cfg = SingleCopyConfig {
            stream: &stream,
            oracle: &oracle,
            classes: &classes,
            pair,
            params: sketch,
            trace: false,
            accounting: false,
        };
        let mut rng = rng_from(99, "copy", 0);
        let solo = single_copy_run(&cfg, &mut rng).unwrap();
        assert_eq!(mean, solo.matrix);
        assert_eq!(
            tally.sampled + tally.zeroed + tally.exhausted + tally.survived,
            1
        );
    }

    #[test]
    fn empty_stream_estimates_zero() {
        let stream = parse_stream("4 0").unwrap();
        let classes = ell2();
        let report =
            full_estimate(&stream, &classes, &params(5), EstimateOptions::default()).unwrap();
        assert_eq!(report.estimate, 0.0);
        assert_eq!(report.m, 0);
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let stream = gen_random(6, 0.4, 8).unwrap();
        let classes = ell2();
        let opts = EstimateOptions { with_opt: true, with_exact: true, ..Default::default() };
        let a = full_estimate(&stream, &classes, &params(7), opts).unwrap();
        let b = full_estimate(&stream, &classes, &params(7), opts).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = full_estimate(&stream, &classes, &params(8), opts).unwrap();
        assert_ne!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
    }

    #[test]
    fn literal_and_schedule_sampling_agree_statistically() {
        // Same distribution, different drivers: means over many copies
        // must agree within Monte Carlo tolerance.
        let stream = gen_random(5, 0.6, 3).unwrap();
        let classes = ell2();
        let eps = parse_decimal("1").unwrap();
        let grid = DegreeGrid::new(5, &eps).unwrap();
        let oracle = HashOracle::new(10, 2, &grid).unwrap();
        let sketch = SketchParams { kappa: 2, capacity_const: 32 };
        let k = 30_000u64;
        let (lit, _) = run_pair(&stream, &classes, &oracle, &grid, 1, 0, sketch, k, 1).unwrap();
        let (sch, _) =
            run_pair_schedule(&stream, &classes, &oracle, &grid, 1, 0, sketch, k, 2).unwrap();
        let m_cap = sketch.capacity(stream.m() as u64);
        let se = m_cap as f64 / 2.0 / (k as f64).sqrt() * std::f64::consts::SQRT_2;
        for i in 0..classes.ell() {
            for j in 0..classes.ell() {
                assert!(
                    (lit.get(i, j) - sch.get(i, j)).abs() <= 5.0 * se,
                    "entry ({i},{j}): literal {} vs schedule {}",
                    lit.get(i, j),
                    sch.get(i, j)
                );
            }
        }
    }

    #[test]
    fn qubit_widths_grow_one_bit_per_doubling() {
        let p = params(0);
        let mut prev = register_width_bits(&p, 64, 1024);
        for exp in 7..=14u32 {
            let w = register_width_bits(&p, 1u64 << exp, 1024);
            assert!(w >= prev && w - prev <= 1, "m = 2^{exp}: width {w} after {prev}");
            prev = w;
        }
        let q = qubit_accounting(&p, 256, 16, 9);
        assert_eq!(
            q.total_qubits,
            q.register_width_bits * p.copies_per_pair * 9 * p.med_reps as u64
        );
        assert_eq!(q, qubit_accounting(&p, 256, 16, 9));
    }
}
