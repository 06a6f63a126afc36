//! Command-line harness: generation, exact oracles, simulation, the
//! communication demo, and the verification suites.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classes::{oblivious_value_exact, snapshot, BiasClassConfig, CountMatrix};
use crate::comm::{
    classical_baseline_estimate, message_cost_classical_bits, message_cost_quantum_qubits,
    protocol_truth, quantum_protocol_estimate, DirectedMatching, LabeledVertices,
};
use crate::estimator::{full_estimate, EstimateOptions, EstimatorParams, Sampling};
use crate::exact::{parse_decimal, to_f64};
use crate::graph::{gen_bipartite_forward, gen_random, max_dicut_bruteforce, parse_stream, EdgeStream};
use crate::pseudo::{bias_bound_count, pseudosnapshot_exact, DegreeGrid, HashOracle};
use crate::seeds::{derive_seed, rng_from};
use crate::sim::{single_copy_run, PairWindows, SingleCopyConfig, SketchParams};
use crate::{checks, QdError, Result};

#[derive(Parser)]
#[command(
    name = "qdicut",
    version,
    about = "Simulator and verification harness for a quantum streaming Max-DiCut sketch"
)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Literal,
    Schedule,
    Counts,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::Literal => Sampling::Literal,
            SamplingArg::Schedule => Sampling::Schedule,
            SamplingArg::Counts => Sampling::Counts,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; "-" or omitted writes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded random edge stream.
    Generate {
        /// Vertex count.
        #[arg(long)]
        n: u32,
        /// Per-pair edge probability.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generate an all-forward bipartite stream "a,b" instead.
        #[arg(long)]
        bipartite: Option<String>,
        /// Output file; "-" or omitted writes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact oracles: brute-force optimum, snapshot, oblivious value, and
    /// optionally the pseudosnapshot.
    Exact {
        /// Edge stream file.
        #[arg(long)]
        input: PathBuf,
        /// Bias class configuration (TOML).
        #[arg(long)]
        classes: PathBuf,
        /// Also evaluate the hash-based pseudosnapshot oracle.
        #[arg(long)]
        pseudo: bool,
        /// Accuracy parameter for the degree grid / noise (exact decimal).
        #[arg(long, default_value = "0.5")]
        eps: String,
        #[arg(long, default_value_t = 4)]
        kappa: u32,
        /// Hash oracle seed.
        #[arg(long, default_value_t = 0)]
        oracle_seed: u64,
        /// Skip the brute-force optimum (for larger instances).
        #[arg(long)]
        no_opt: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full estimation pipeline and write a run report.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        classes: PathBuf,
        #[arg(long, default_value = "0.5")]
        eps: String,
        #[arg(long, default_value_t = 2)]
        kappa: u32,
        #[arg(long, default_value_t = 32)]
        capacity_const: u64,
        /// Copies averaged per degree pair.
        #[arg(long, default_value_t = 10_000)]
        copies: u64,
        /// Median repetitions with fresh hash functions.
        #[arg(long, default_value_t = 3)]
        med_reps: u32,
        /// Constant of the additive `- c * eps * m` correction.
        #[arg(long, default_value_t = 0.0)]
        c_corr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// How copies are driven: step-by-step simulation, per-copy draws
        /// from the exact outcome distribution, or aggregate count
        /// sampling.
        #[arg(long, value_enum, default_value = "schedule")]
        sampling: SamplingArg,
        /// Compare against the brute-force optimum.
        #[arg(long)]
        with_opt: bool,
        /// Include exact snapshot / pseudosnapshot oblivious values.
        #[arg(long)]
        with_exact: bool,
        /// Write the measurement trace of one instrumented copy (JSON
        /// lines) for the given "alpha,beta" degree pair.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long, default_value = "0,0")]
        trace_pair: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the quantum protocol against the classical sampling
    /// baseline on the labeled-matching problem.
    Comm {
        /// Vertex count.
        #[arg(long, default_value_t = 400)]
        n: u32,
        /// Quantum copies per trial.
        #[arg(long, default_value_t = 25)]
        k: u64,
        /// Classical sample size; defaults to ceil(sqrt(n)) / eps^2 / 2.
        #[arg(long)]
        sample_size: Option<u32>,
        /// Accuracy target (for the default sample size).
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, default_value_t = 400)]
        trials: u64,
        #[arg(long, default_value_t = 2)]
        label_bits: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the verification suites and report pass/fail per property.
    Verify {
        /// Run the full-size suites (slower).
        #[arg(long)]
        deep: bool,
        #[arg(long, default_value_t = 20260809)]
        seed: u64,
        /// Bias class configuration used by the soundness and end-to-end
        /// suites; defaults to the bundled production config.
        #[arg(long)]
        classes: Option<PathBuf>,
    },
}

fn load_stream(path: &Path) -> Result<EdgeStream> {
    parse_stream(&std::fs::read_to_string(path)?)
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, content)?;
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn render<T: Serialize>(value: &T, format: Format, csv_rows: Vec<(String, String)>) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable report"),
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in csv_rows {
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
    }
}

fn count_rows(m: &CountMatrix) -> Vec<Vec<u64>> {
    (0..m.ell()).map(|i| (0..m.ell()).map(|j| m.get(i, j)).collect()).collect()
}

#[derive(Serialize)]
struct ExactReport {
    n: u32,
    m: u64,
    opt: Option<u64>,
    snapshot: Vec<Vec<u64>>,
    oblivious_value: f64,
    oblivious_ratio: Option<f64>,
    classes_alpha: f64,
    pseudo: Option<PseudoReport>,
}

#[derive(Serialize)]
struct PseudoReport {
    eps: String,
    kappa: u32,
    oracle_seed: u64,
    pseudosnapshot: Vec<Vec<u64>>,
    oblivious_value: f64,
    bias_bound_total: u64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_exact(
    input: &Path,
    classes_path: &Path,
    pseudo: bool,
    eps: &str,
    kappa: u32,
    oracle_seed: u64,
    no_opt: bool,
    output: &OutputArgs,
) -> Result<()> {
    let stream = load_stream(input)?;
    let classes = BiasClassConfig::load(classes_path)?;
    let snap = snapshot(&stream, &classes);
    let value = to_f64(&oblivious_value_exact(&snap, &classes)?);
    let opt = if no_opt { None } else { Some(max_dicut_bruteforce(&stream)?) };
    let pseudo_rep = if pseudo {
        let eps = parse_decimal(eps)?;
        let grid = DegreeGrid::new(stream.n().max(1) as u64, &eps)?;
        let oracle = HashOracle::new(oracle_seed, kappa as u64, &grid)?;
        let ps = pseudosnapshot_exact(&stream, &classes, &oracle, &grid)?;
        let ps_value = to_f64(&oblivious_value_exact(&ps, &classes)?);
        let mut bound = 0;
        for &a in &grid.nonempty_levels() {
            for &b in &grid.nonempty_levels() {
                bound += bias_bound_count(&stream, &oracle, &grid, a, b)?;
            }
        }
        Some(PseudoReport {
            eps: crate::exact::ratio_string(&eps),
            kappa,
            oracle_seed,
            pseudosnapshot: count_rows(&ps),
            oblivious_value: ps_value,
            bias_bound_total: bound,
        })
    } else {
        None
    };
    let report = ExactReport {
        n: stream.n(),
        m: stream.m() as u64,
        opt,
        snapshot: count_rows(&snap),
        oblivious_value: value,
        oblivious_ratio: opt.and_then(|o| (o > 0).then(|| value / o as f64)),
        classes_alpha: classes.alpha,
        pseudo: pseudo_rep,
    };
    let mut rows = vec![
        ("n".into(), report.n.to_string()),
        ("m".into(), report.m.to_string()),
        ("oblivious_value".into(), report.oblivious_value.to_string()),
    ];
    if let Some(o) = report.opt {
        rows.push(("opt".into(), o.to_string()));
    }
    if let Some(r) = report.oblivious_ratio {
        rows.push(("oblivious_ratio".into(), r.to_string()));
    }
    if let Some(p) = &report.pseudo {
        rows.push(("pseudo_oblivious_value".into(), p.oblivious_value.to_string()));
        rows.push(("bias_bound_total".into(), p.bias_bound_total.to_string()));
    }
    write_out(&output.out, &render(&report, output.format, rows))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    input: &Path,
    classes_path: &Path,
    eps: &str,
    kappa: u32,
    capacity_const: u64,
    copies: u64,
    med_reps: u32,
    c_corr: f64,
    seed: u64,
    sampling: SamplingArg,
    with_opt: bool,
    with_exact: bool,
    trace_out: &Option<PathBuf>,
    trace_pair: &str,
    output: &OutputArgs,
) -> Result<()> {
    let stream = load_stream(input)?;
    let classes = BiasClassConfig::load(classes_path)?;
    let params = EstimatorParams {
        eps: parse_decimal(eps)?,
        kappa,
        capacity_const,
        copies_per_pair: copies,
        med_reps,
        correction: c_corr,
        seed,
    };
    let opts = EstimateOptions { sampling: sampling.into(), with_opt, with_exact };
    if let Some(trace_path) = trace_out {
        write_trace(&stream, &classes, &params, trace_pair, trace_path)?;
    }
    let report = full_estimate(&stream, &classes, &params, opts)?;
    let mut rows = vec![
        ("n".into(), report.n.to_string()),
        ("m".into(), report.m.to_string()),
        ("estimate".into(), report.estimate.to_string()),
    ];
    if let Some(o) = report.opt {
        rows.push(("opt".into(), o.to_string()));
    }
    if let Some(r) = report.ratio {
        rows.push(("ratio".into(), r.to_string()));
    }
    rows.push(("register_width_bits".into(), report.qubits.register_width_bits.to_string()));
    rows.push(("total_qubits".into(), report.qubits.total_qubits.to_string()));
    write_out(&output.out, &render(&report, output.format, rows))
}

fn write_trace(
    stream: &EdgeStream,
    classes: &BiasClassConfig,
    params: &EstimatorParams,
    pair_spec: &str,
    path: &Path,
) -> Result<()> {
    let (a, b) = pair_spec
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| QdError::Param(format!("bad --trace-pair {pair_spec:?}, want \"a,b\"")))?;
    let grid = DegreeGrid::new(stream.n().max(1) as u64, &params.eps)?;
    let oracle = HashOracle::new(derive_seed(params.seed, "hash", 0), params.kappa as u64, &grid)?;
    let pair = PairWindows::new(&grid, a, b, stream.m() as u64)?;
    let cfg = SingleCopyConfig {
        stream,
        oracle: &oracle,
        classes,
        pair,
        params: SketchParams { kappa: params.kappa, capacity_const: params.capacity_const },
        trace: true,
        accounting: true,
    };
    let mut rng = rng_from(params.seed, "trace-copy", 0);
    let out = single_copy_run(&cfg, &mut rng)?;
    let mut text = String::new();
    for rec in &out.trace {
        text.push_str(&serde_json::to_string(rec).expect("serializable trace"));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct CommReport {
    n: u32,
    matching_edges: usize,
    truth: u64,
    quantum_copies_per_trial: u64,
    quantum_mean: f64,
    quantum_variance: f64,
    quantum_qubits: u64,
    classical_sample_size: u32,
    classical_mean: f64,
    classical_within_eps_n: f64,
    classical_bits: u64,
    eps: f64,
    trials: u64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_comm(
    n: u32,
    k: u64,
    sample_size: Option<u32>,
    eps: f64,
    trials: u64,
    label_bits: u64,
    seed: u64,
    output: &OutputArgs,
) -> Result<()> {
    if n < 4 {
        return Err(QdError::Param("comm demo needs n >= 4".into()));
    }
    // random labels over 2^label_bits values, random perfect-ish matching
    let mut rng = rng_from(seed, "comm-setup", 0);
    let labels = LabeledVertices::new(
        (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..(1u32 << label_bits))).collect(),
    );
    let mut perm: Vec<u32> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
    let edges: Vec<(u32, u32)> = perm.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let matching = DirectedMatching::new(edges, n)?;
    let (i, j) = (0u32, 1u32.min((1 << label_bits) - 1));
    let truth = protocol_truth(&matching, &labels, i, j);

    let s = sample_size.unwrap_or_else(|| {
        (((n as f64).sqrt() / (eps * eps) * 0.5).ceil() as u32).min(n)
    });
    let mut q_mean = 0.0;
    let mut q_sq = 0.0;
    let mut c_mean = 0.0;
    let mut c_hits = 0u64;
    for t in 0..trials {
        let q = quantum_protocol_estimate(&matching, &labels, i, j, k, derive_seed(seed, "q", t))?;
        q_mean += q;
        q_sq += q * q;
        let c =
            classical_baseline_estimate(&matching, &labels, i, j, s, derive_seed(seed, "c", t))?;
        c_mean += c;
        if (c - truth as f64).abs() <= eps * n as f64 {
            c_hits += 1;
        }
    }
    q_mean /= trials as f64;
    q_sq /= trials as f64;
    c_mean /= trials as f64;
    let report = CommReport {
        n,
        matching_edges: matching.edges().len(),
        truth,
        quantum_copies_per_trial: k,
        quantum_mean: q_mean,
        quantum_variance: q_sq - q_mean * q_mean,
        quantum_qubits: message_cost_quantum_qubits(n as u64, k, label_bits),
        classical_sample_size: s,
        classical_mean: c_mean,
        classical_within_eps_n: c_hits as f64 / trials as f64,
        classical_bits: message_cost_classical_bits(n as u64, s as u64, label_bits),
        eps,
        trials,
    };
    let rows = vec![
        ("truth".into(), report.truth.to_string()),
        ("quantum_mean".into(), report.quantum_mean.to_string()),
        ("quantum_variance".into(), report.quantum_variance.to_string()),
        ("quantum_qubits".into(), report.quantum_qubits.to_string()),
        ("classical_mean".into(), report.classical_mean.to_string()),
        ("classical_within_eps_n".into(), report.classical_within_eps_n.to_string()),
        ("classical_bits".into(), report.classical_bits.to_string()),
    ];
    write_out(&output.out, &render(&report, output.format, rows))
}

fn cmd_verify(deep: bool, seed: u64, classes: Option<&Path>) -> Result<i32> {
    let config = match classes {
        Some(p) => BiasClassConfig::load(p)?,
        None => BiasClassConfig::from_toml_str(include_str!("../../../configs/production.toml"))?,
    };
    let outcomes = checks::run_all(&config, deep, seed)?;
    let mut failures = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        if !o.passed {
            failures += 1;
        }
    }
    println!(
        "{} of {} verification suites passed",
        outcomes.len() - failures,
        outcomes.len()
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result: Result<i32> = match &cli.cmd {
        Cmd::Generate { n, p, seed, bipartite, out } => (|| {
            let stream = match bipartite {
                Some(spec) => {
                    let (a, b) = spec
                        .split_once(',')
                        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                        .ok_or_else(|| {
                            QdError::Param(format!("bad --bipartite {spec:?}, want \"a,b\""))
                        })?;
                    gen_bipartite_forward(a, b, *p, *seed)?
                }
                None => gen_random(*n, *p, *seed)?,
            };
            write_out(out, &stream.to_text())?;
            Ok(0)
        })(),
        Cmd::Exact { input, classes, pseudo, eps, kappa, oracle_seed, no_opt, output } => {
            cmd_exact(input, classes, *pseudo, eps, *kappa, *oracle_seed, *no_opt, output)
                .map(|_| 0)
        }
        Cmd::Simulate {
            input,
            classes,
            eps,
            kappa,
            capacity_const,
            copies,
            med_reps,
            c_corr,
            seed,
            sampling,
            with_opt,
            with_exact,
            trace_out,
            trace_pair,
            output,
        } => cmd_simulate(
            input,
            classes,
            eps,
            *kappa,
            *capacity_const,
            *copies,
            *med_reps,
            *c_corr,
            *seed,
            *sampling,
            *with_opt,
            *with_exact,
            trace_out,
            trace_pair,
            output,
        )
        .map(|_| 0),
        Cmd::Comm { n, k, sample_size, eps, trials, label_bits, seed, output } => {
            cmd_comm(*n, *k, *sample_size, *eps, *trials, *label_bits, *seed, output).map(|_| 0)
        }
        Cmd::Verify { deep, seed, classes } => cmd_verify(*deep, *seed, classes.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let record = serde_json::json!({ "error": e.to_string() });
            eprintln!("{record}");
            2
        }
    }
}
