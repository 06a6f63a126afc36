//! The bundled small-instance suite used by the verification harness.
//!
//! Every instance stays within the brute-force cap so exact optima are
//! available. The mix covers extreme biases (stars), balanced biases
//! (cycles), multigraph repetition, fully cuttable bipartite streams, and
//! seeded random graphs.

use crate::graph::{gen_bipartite_forward, gen_random, parse_stream, EdgeStream};

fn path(n: u32) -> EdgeStream {
    let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
    EdgeStream::new(n, edges).unwrap()
}

fn out_star(n: u32) -> EdgeStream {
    EdgeStream::new(n, (1..n).map(|i| (0, i)).collect()).unwrap()
}

fn in_star(n: u32) -> EdgeStream {
    EdgeStream::new(n, (1..n).map(|i| (i, 0)).collect()).unwrap()
}

fn cycle(n: u32) -> EdgeStream {
    EdgeStream::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
}

fn tournament(n: u32) -> EdgeStream {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    EdgeStream::new(n, edges).unwrap()
}

fn complete_bidirected(n: u32) -> EdgeStream {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v {
                edges.push((u, v));
            }
        }
    }
    EdgeStream::new(n, edges).unwrap()
}

/// Named instances, all with `n <= 12` and at least one edge.
pub fn suite_graphs() -> Vec<(String, EdgeStream)> {
    let mut suite: Vec<(String, EdgeStream)> = vec![
        ("single-edge".into(), parse_stream("2 1\n0 1").unwrap()),
        ("two-cycle".into(), cycle(2)),
        ("triangle".into(), cycle(3)),
        ("square-cycle".into(), cycle(4)),
        ("five-cycle".into(), cycle(5)),
        ("path-4".into(), path(4)),
        ("path-7".into(), path(7)),
        ("out-star-6".into(), out_star(6)),
        ("in-star-6".into(), in_star(6)),
        ("out-star-11".into(), out_star(11)),
        (
            "mixed-star".into(),
            parse_stream("7 6\n0 1\n0 2\n0 3\n4 0\n5 0\n6 0").unwrap(),
        ),
        (
            "parallel-multi".into(),
            parse_stream("3 6\n0 1\n0 1\n0 1\n1 2\n1 2\n2 0").unwrap(),
        ),
        ("tournament-5".into(), tournament(5)),
        ("tournament-7".into(), tournament(7)),
        ("complete-k4".into(), complete_bidirected(4)),
        ("bipartite-3x3".into(), gen_bipartite_forward(3, 3, 0.8, 11).unwrap()),
        ("bipartite-4x4".into(), gen_bipartite_forward(4, 4, 0.6, 12).unwrap()),
        ("bipartite-5x5".into(), gen_bipartite_forward(5, 5, 0.4, 13).unwrap()),
    ];
    let random_specs: [(u32, f64, u64); 12] = [
        (5, 0.9, 101),
        (6, 0.3, 102),
        (6, 0.6, 103),
        (7, 0.4, 104),
        (8, 0.25, 105),
        (8, 0.5, 106),
        (9, 0.35, 107),
        (10, 0.3, 108),
        (10, 0.5, 109),
        (11, 0.3, 110),
        (12, 0.25, 111),
        (12, 0.4, 112),
    ];
    for (n, p, seed) in random_specs {
        let g = gen_random(n, p, seed).unwrap();
        if g.m() > 0 {
            suite.push((format!("random-n{n}-p{p}-s{seed}"), g));
        }
    }
    suite
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::max_dicut_bruteforce;

    #[test]
    fn suite_is_small_nonempty_and_solvable() {
        let suite = suite_graphs();
        assert!(suite.len() >= 25);
        for (name, g) in suite {
            assert!(g.n() <= 12, "{name} too large");
            assert!(g.m() > 0, "{name} empty");
            let opt = max_dicut_bruteforce(&g).unwrap();
            assert!(opt >= 1, "{name} has opt 0");
        }
    }
}
