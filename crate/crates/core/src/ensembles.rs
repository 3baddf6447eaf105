//! Samplers for the random ingredients of an ensemble: digraphs
//! (Erdős–Rényi, Barabási–Albert, scale-free trees), arrow signs, arrow
//! thresholds and initial conditions.
//!
//! Everything is driven by explicitly derived ChaCha8 substreams, so a
//! `(root seed, derivation path)` pair reproduces the same sample
//! bit-for-bit on any platform and under any scheduling, which is what
//! makes the parallel harness deterministic.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::digraph::{Arrow, Digraph};
use crate::dynamics::ActivityVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which random digraph family an ensemble draws from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphModel {
    ErdosRenyi {
        p: f64,
        #[serde(default)]
        self_loops: bool,
    },
    BarabasiAlbert {
        m0: usize,
        m: usize,
    },
    Tree,
}

impl GraphModel {
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Result<Digraph> {
        match *self {
            GraphModel::ErdosRenyi { p, self_loops } => sample_erdos_renyi(n, p, self_loops, rng),
            GraphModel::BarabasiAlbert { m0, m } => sample_barabasi_albert(n, m0, m, rng),
            GraphModel::Tree => sample_scale_free_tree(n, rng),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphModel::ErdosRenyi { .. } => "erdos_renyi",
            GraphModel::BarabasiAlbert { .. } => "barabasi_albert",
            GraphModel::Tree => "tree",
        }
    }

    /// Value of the `p_or_m` output column: connection probability for
    /// Erdős–Rényi, edges per growth step otherwise (1 for trees).
    pub fn p_or_m(&self) -> f64 {
        match *self {
            GraphModel::ErdosRenyi { p, .. } => p,
            GraphModel::BarabasiAlbert { m, .. } => m as f64,
            GraphModel::Tree => 1.0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            GraphModel::ErdosRenyi { p, .. } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::domain(format!("connection probability {p} outside [0,1]")));
                }
            }
            GraphModel::BarabasiAlbert { m0, m } => {
                if m0 < 2 || m0 > n || m < 1 || m > m0 {
                    return Err(Error::domain(format!(
                        "invalid growth parameters m0={m0}, m={m} for n={n}"
                    )));
                }
            }
            GraphModel::Tree => {
                if n < 2 {
                    return Err(Error::domain("tree model needs n >= 2"));
                }
            }
        }
        Ok(())
    }
}

/// Root seed plus substream derivation. Substreams are ChaCha8 generators
/// keyed by SHA-256 of `(root, label, indices...)`, so reordering or
/// parallelising work items cannot change what any single item samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSeed {
    root: u64,
}

impl EnsembleSeed {
    pub fn new(root: u64) -> Self {
        EnsembleSeed { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Generic substream: hash of the root, a domain label and an index path.
    pub fn stream(&self, label: &str, indices: &[u64]) -> ChaCha8Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.root.to_le_bytes());
        hasher.update(label.as_bytes());
        for i in indices {
            hasher.update(i.to_le_bytes());
        }
        ChaCha8Rng::from_seed(hasher.finalize().into())
    }

    /// Substream for the `i`-th sampled graph (topology, then signs, then
    /// thresholds are drawn from it in that order).
    pub fn graph_stream(&self, i: u64) -> ChaCha8Rng {
        self.stream("graph", &[i])
    }

    /// Substream for orbit `j` of graph `i` (initial condition).
    pub fn orbit_stream(&self, i: u64, j: u64) -> ChaCha8Rng {
        self.stream("orbit", &[i, j])
    }
}

/// Per-arrow sign, +1 activation or -1 inhibition, aligned with the
/// graph's canonical arrow order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAssignment {
    values: Vec<i8>,
}

impl SignAssignment {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("signs must be +1 or -1"));
        }
        Ok(SignAssignment { values })
    }

    pub fn all_positive(len: usize) -> Self {
        SignAssignment {
            values: vec![1; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, arrow_idx: usize) -> i8 {
        self.values[arrow_idx]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// The sign configuration with every arrow flipped.
    pub fn negated(&self) -> Self {
        SignAssignment {
            values: self.values.iter().map(|s| -s).collect(),
        }
    }
}

/// Per-arrow threshold in [0,1], aligned with the canonical arrow order.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAssignment<S> {
    values: Vec<S>,
}

impl<S: Scalar> ThresholdAssignment<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values
            .iter()
            .any(|&t| !(t >= S::zero() && t <= S::one()))
        {
            return Err(Error::domain("thresholds must lie in [0,1]"));
        }
        Ok(ThresholdAssignment { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, arrow_idx: usize) -> S {
        self.values[arrow_idx]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

/// Directed Erdős–Rényi digraph: each ordered pair is an arrow
/// independently with probability `p`. Self-loop pairs are considered
/// only when `allow_self_loops` is set.
pub fn sample_erdos_renyi(
    n: usize,
    p: f64,
    allow_self_loops: bool,
    rng: &mut impl Rng,
) -> Result<Digraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("connection probability {p} outside [0,1]")));
    }
    if n == 0 {
        return Err(Error::domain("graph needs at least one vertex"));
    }
    let mut arrows = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v && !allow_self_loops {
                continue;
            }
            if rng.random::<f64>() < p {
                arrows.push((u, v));
            }
        }
    }
    Digraph::new(n, arrows)
}

/// Undirected preferential-attachment growth from the complete graph on
/// `m0` vertices: each new vertex attaches `m` edges to distinct existing
/// vertices, chosen with probability proportional to their degree at the
/// start of the step. Each undirected edge is then oriented one way with
/// probability 1/4 each, or kept in both directions with probability 1/2.
pub fn sample_barabasi_albert(
    n: usize,
    m0: usize,
    m_edges_per_step: usize,
    rng: &mut impl Rng,
) -> Result<Digraph> {
    if m0 < 2 || m0 > n {
        return Err(Error::domain(format!("need 2 <= m0 <= n, got m0={m0}, n={n}")));
    }
    if m_edges_per_step < 1 || m_edges_per_step > m0 {
        return Err(Error::domain(format!(
            "need 1 <= m <= m0, got m={m_edges_per_step}, m0={m0}"
        )));
    }

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut degree = vec![0u64; n];
    for u in 0..m0 {
        for v in (u + 1)..m0 {
            edges.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }

    for new in m0..n {
        // weights frozen at step start; chosen vertices excluded from later draws
        let weights: Vec<u64> = degree[..new].to_vec();
        let mut chosen = vec![false; new];
        for _ in 0..m_edges_per_step {
            let total: u64 = weights
                .iter()
                .enumerate()
                .filter(|&(v, _)| !chosen[v])
                .map(|(_, &w)| w)
                .sum();
            let mut r = rng.random_range(0..total);
            let mut target = usize::MAX;
            for (v, &w) in weights.iter().enumerate() {
                if chosen[v] {
                    continue;
                }
                if r < w {
                    target = v;
                    break;
                }
                r -= w;
            }
            chosen[target] = true;
            edges.push((new, target));
            degree[new] += 1;
            degree[target] += 1;
        }
    }

    let mut arrows = Vec::new();
    for &(u, v) in &edges {
        let r = rng.random::<f64>();
        if r < 0.25 {
            arrows.push((u, v));
        } else if r < 0.5 {
            arrows.push((v, u));
        } else {
            arrows.push((u, v));
            arrows.push((v, u));
        }
    }
    Digraph::new(n, arrows)
}

/// Scale-free tree: preferential attachment from two vertices joined by an
/// edge, one new edge per step (the first attachment is uniform 1/2), then
/// the 1/4 - 1/4 - 1/2 orientation rule. The underlying undirected graph is
/// a tree on `n` vertices.
pub fn sample_scale_free_tree(n: usize, rng: &mut impl Rng) -> Result<Digraph> {
    if n < 2 {
        return Err(Error::domain("scale-free tree needs n >= 2"));
    }
    sample_barabasi_albert(n, 2, 1, rng)
}

/// I.i.d. signs: -1 with probability `eta`, +1 otherwise, one draw per
/// arrow in the given order.
pub fn sample_signs(arrows: &[Arrow], eta: f64, rng: &mut impl Rng) -> Result<SignAssignment> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("inhibition probability {eta} outside [0,1]")));
    }
    let values = arrows
        .iter()
        .map(|_| if rng.random::<f64>() < eta { -1 } else { 1 })
        .collect();
    SignAssignment::new(values)
}

/// I.i.d. uniform [0,1) threshold per arrow.
pub fn sample_thresholds<S: Scalar>(
    arrows: &[Arrow],
    rng: &mut impl Rng,
) -> ThresholdAssignment<S> {
    let values = arrows
        .iter()
        .map(|_| S::from_f64_lossy(rng.random::<f64>()))
        .collect();
    ThresholdAssignment::new(values).expect("uniform draws lie in [0,1)")
}

/// I.i.d. uniform [0,1) initial activity per vertex.
pub fn sample_initial<S: Scalar>(n_vertices: usize, rng: &mut impl Rng) -> ActivityVector<S> {
    let values = (0..n_vertices)
        .map(|_| S::from_f64_lossy(rng.random::<f64>()))
        .collect();
    ActivityVector::new(values).expect("uniform draws lie in [0,1)")
}
