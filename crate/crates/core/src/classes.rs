//! Bias classes, first-order snapshots, and the oblivious rounding value.
//!
//! A class configuration is a vector of ascending thresholds `t_1 = -1 < t_2 <
//! ... < t_ell` together with per-class probabilities `r_i` of rounding a
//! vertex to side 0. Class `i` covers `[t_i, t_{i+1})`, with the last class
//! closed at 1. The snapshot counts edges by (head class, tail class), and
//! `r† Σ (1 - r)` is the expected cut value of rounding every class-`i`
//! vertex to side 0 independently with probability `r_i`.

use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::exact::{parse_decimal, ratio_i64, to_f64};
use crate::graph::{bias, degrees, EdgeStream};
use crate::{QdError, Result};

/// Validated bias-class configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasClassConfig {
    thresholds: Vec<BigRational>,
    probs: Vec<BigRational>,
    /// Approximation ratio this configuration claims; used only to label
    /// reports.
    pub alpha: f64,
}

#[derive(Deserialize)]
struct RawConfig {
    ell: usize,
    t: Vec<String>,
    r: Vec<String>,
    alpha: f64,
}

impl BiasClassConfig {
    /// Validates `(ell, t, r, alpha)`: strict threshold ascent, `t_1 = -1`,
    /// probabilities in `[0, 1]`.
    pub fn new(ell: usize, t: Vec<BigRational>, r: Vec<BigRational>, alpha: f64) -> Result<Self> {
        if ell == 0 {
            return Err(QdError::Config("need at least one bias class".into()));
        }
        if t.len() != ell || r.len() != ell {
            return Err(QdError::Config(format!(
                "expected {ell} thresholds and probabilities, got {} and {}",
                t.len(),
                r.len()
            )));
        }
        if t[0] != -ratio_i64(1) {
            return Err(QdError::Config("first threshold must be -1".into()));
        }
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QdError::Config("thresholds must be strictly ascending".into()));
        }
        if *t.last().unwrap() > ratio_i64(1) {
            return Err(QdError::Config("thresholds must lie in [-1, 1]".into()));
        }
        if r.iter().any(|x| x < &BigRational::zero() || x > &BigRational::one()) {
            return Err(QdError::Config("probabilities must lie in [0, 1]".into()));
        }
        Ok(Self { thresholds: t, probs: r, alpha })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| QdError::Config(format!("bad class config: {e}")))?;
        let t = raw.t.iter().map(|s| parse_decimal(s)).collect::<Result<Vec<_>>>()?;
        let r = raw.r.iter().map(|s| parse_decimal(s)).collect::<Result<Vec<_>>>()?;
        Self::new(raw.ell, t, r, raw.alpha)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn ell(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self) -> &[BigRational] {
        &self.thresholds
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    /// Class index (0-based) of a bias-like value. Values outside `[-1, 1]`
    /// are clamped first, so classification is total; pseudobiases can dip
    /// below -1 by the noise amplitude.
    pub fn classify(&self, b: &BigRational) -> usize {
        let one = ratio_i64(1);
        let clamped = if *b < -one.clone() {
            -one
        } else if *b > one {
            one
        } else {
            b.clone()
        };
        // Largest i with t_i <= clamped; t_1 = -1 guarantees a match.
        self.thresholds.iter().rposition(|t| *t <= clamped).expect("t_1 = -1 covers [-1, 1]")
    }
}

/// An `ell x ell` matrix of exact edge counts between classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    ell: usize,
    data: Vec<u64>,
}

impl CountMatrix {
    pub fn zero(ell: usize) -> Self {
        Self { ell, data: vec![0; ell * ell] }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.ell + j]
    }

    pub fn add(&mut self, i: usize, j: usize, w: u64) {
        self.data[i * self.ell + j] += w;
    }

    pub fn total(&self) -> u64 {
        self.data.iter().sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let ell = self.ell;
        self.data.iter().enumerate().map(move |(k, &v)| (k / ell, k % ell, v))
    }
}

/// An `ell x ell` real-valued matrix for estimates. Serializes as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EstMatrix {
    ell: usize,
    data: Vec<f64>,
}

impl serde::Serialize for EstMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.data.chunks(self.ell))
    }
}

impl EstMatrix {
    pub fn zero(ell: usize) -> Self {
        Self { ell, data: vec![0.0; ell * ell] }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ell + j]
    }

    pub fn add(&mut self, i: usize, j: usize, w: f64) {
        self.data[i * self.ell + j] += w;
    }

    pub fn add_matrix(&mut self, other: &EstMatrix) {
        assert_eq!(self.ell, other.ell);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn abs_max(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn from_counts(c: &CountMatrix) -> Self {
        Self { ell: c.ell, data: c.data.iter().map(|&x| x as f64).collect() }
    }
}

/// Exact first-order snapshot: edge counts by (head class, tail class) under
/// final whole-stream biases. Entries sum to `m`.
pub fn snapshot(stream: &EdgeStream, config: &BiasClassConfig) -> CountMatrix {
    let profile = degrees(stream);
    let mut class_of = vec![usize::MAX; stream.n() as usize];
    let mut s = CountMatrix::zero(config.ell());
    for &(u, v) in stream.edges() {
        for w in [u, v] {
            if class_of[w as usize] == usize::MAX {
                let b = bias(&profile, w).expect("stream endpoints are never isolated");
                class_of[w as usize] = config.classify(&b);
            }
        }
        s.add(class_of[u as usize], class_of[v as usize], 1);
    }
    s
}

/// Exact oblivious value `sum_ij r_i S_ij (1 - r_j)`.
pub fn oblivious_value_exact(s: &CountMatrix, config: &BiasClassConfig) -> Result<BigRational> {
    if s.ell() != config.ell() {
        return Err(QdError::Param(format!(
            "matrix is {}x{0} but config has {} classes",
            s.ell(),
            config.ell()
        )));
    }
    let r = config.probs();
    let mut acc = BigRational::zero();
    for (i, j, count) in s.entries() {
        if count > 0 {
            acc += &r[i] * (ratio_i64(1) - &r[j]) * ratio_i64(count as i64);
        }
    }
    Ok(acc)
}

/// Oblivious value of a real-valued estimate matrix.
pub fn oblivious_value(s: &EstMatrix, config: &BiasClassConfig) -> Result<f64> {
    if s.ell() != config.ell() {
        return Err(QdError::Param(format!(
            "matrix is {}x{0} but config has {} classes",
            s.ell(),
            config.ell()
        )));
    }
    let r: Vec<f64> = config.probs().iter().map(to_f64).collect();
    let mut acc = 0.0;
    for i in 0..s.ell() {
        for j in 0..s.ell() {
            acc += r[i] * s.get(i, j) * (1.0 - r[j]);
        }
    }
    Ok(acc)
}
