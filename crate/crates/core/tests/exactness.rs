//! Exact identities connecting the simulator's outcome distribution to the
//! combinatorial oracles.
//!
//! For a fixed hash draw, the expected single-copy estimate of a degree
//! pair equals the restricted pseudosnapshot minus exactly the edges whose
//! sampled out-edge count overflowed the measurement grid. All quantities
//! here are dyadic rationals that f64 arithmetic represents exactly, so
//! the comparisons are equalities, not tolerances.

use qdicut::classes::BiasClassConfig;
use qdicut::estimator::degree_pairs;
use qdicut::exact::parse_decimal;
use qdicut::graph::gen_random;
use qdicut::pseudo::{bias_bound_count, pseudosnapshot_restricted, DegreeGrid, HashOracle};
use qdicut::sim::schedule::Schedule;
use qdicut::sim::{PairWindows, SingleCopyConfig, SketchParams};

fn classes() -> BiasClassConfig {
    BiasClassConfig::from_toml_str(
        "ell = 3\nt = [\"-1\", \"-0.3\", \"0.3\"]\nr = [\"0.1\", \"0.5\", \"0.9\"]\nalpha = 0.0\n",
    )
    .unwrap()
}

#[test]
fn expected_estimate_equals_restricted_minus_overflow() {
    let classes = classes();
    let mut pairs_checked = 0u32;
    let mut instances: Vec<qdicut::graph::EdgeStream> = (0..12u64)
        .map(|seed| gen_random(7, [0.3, 0.5, 0.7][seed as usize % 3], seed).unwrap())
        .collect();
    // multigraphs, stars and tournaments from the bundled corpus
    instances.extend(
        qdicut::corpus::suite_graphs()
            .into_iter()
            .filter(|(_, g)| g.n() <= 8)
            .map(|(_, g)| g),
    );
    for (seed, stream) in instances.into_iter().enumerate() {
        let seed = seed as u64;
        if stream.m() == 0 {
            continue;
        }
        for (kappa, eps_s) in [(2u64, "1"), (4, "0.5"), (2, "0.25")] {
            let eps = parse_decimal(eps_s).unwrap();
            let grid = DegreeGrid::new(stream.n() as u64, &eps).unwrap();
            let oracle = HashOracle::new(seed ^ 0xbeef, kappa, &grid).unwrap();
            let params = SketchParams { kappa: kappa as u32, capacity_const: 32 };
            for (alpha, beta) in degree_pairs(&grid) {
                let pair = PairWindows::new(&grid, alpha, beta, stream.m() as u64).unwrap();
                let cfg = SingleCopyConfig {
                    stream: &stream,
                    oracle: &oracle,
                    classes: &classes,
                    pair,
                    params,
                    trace: false,
                    accounting: false,
                };
                let sched = Schedule::build(&cfg).unwrap();
                let (_, _, exhausted, _, _) = sched.category_weights();
                if exhausted > 0 {
                    // overdrawn scratch truncates the schedule; the
                    // identity is only claimed for complete runs
                    continue;
                }
                let mean = sched.mean_matrix();
                let restricted =
                    pseudosnapshot_restricted(&stream, &classes, &oracle, &grid, alpha, beta)
                        .unwrap();
                let bound = bias_bound_count(&stream, &oracle, &grid, alpha, beta).unwrap();

                // scalar identity: total expectation = in-window edges
                // minus the overflowed ones
                let mean_total: f64 =
                    (0..classes.ell()).flat_map(|i| (0..classes.ell()).map(move |j| (i, j)))
                        .map(|(i, j)| mean.get(i, j))
                        .sum();
                assert!(
                    (mean_total - (restricted.total() as f64 - bound as f64)).abs() < 1e-9,
                    "seed {seed} kappa {kappa} eps {eps_s} pair ({alpha},{beta}): mean {mean_total} vs {} - {bound}",
                    restricted.total()
                );

                // entrywise: never above the oracle entry, never more than
                // the overflow count below it
                for i in 0..classes.ell() {
                    for j in 0..classes.ell() {
                        let e = mean.get(i, j);
                        let r = restricted.get(i, j) as f64;
                        assert!(e <= r + 1e-9, "entry ({i},{j}): {e} > {r}");
                        assert!(e >= r - bound as f64 - 1e-9, "entry ({i},{j}): {e} < {r} - {bound}");
                    }
                }
                pairs_checked += 1;
            }
        }
    }
    assert!(pairs_checked > 200, "only {pairs_checked} pairs checked");
}
