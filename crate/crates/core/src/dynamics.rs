//! The dynamical kernel: a network of units with activities in [0,1],
//! each updated by the affine contraction
//!
//! ```text
//! x'_v = a * x_v + (1 - a) * k_v / Id(v)
//! ```
//!
//! where `k_v` counts the active incoming arrows, an arrow `(u,v)` being
//! active when `H(sigma * (x_u - T)) = 1` with `H` the Heaviside function.
//! Vertices with no inputs decay geometrically (`x'_v = a * x_v`).
//!
//! The map is a piecewise affine contraction; its discontinuity set is the
//! union of the hyperplanes `x_u = T_(u,v)`, and `distance_to_discontinuity`
//! measures the max-metric distance to it.

use crate::digraph::Digraph;
use crate::ensembles::{SignAssignment, ThresholdAssignment};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Heaviside step, with `H(0) = 1` as the fixed tie-breaking convention.
pub fn heaviside<S: Scalar>(z: S) -> u8 {
    if z >= S::zero() {
        1
    } else {
        0
    }
}

/// Per-vertex activity in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityVector<S> {
    values: Vec<S>,
}

impl<S: Scalar> ActivityVector<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values
            .iter()
            .any(|&x| !(x >= S::zero() && x <= S::one()))
        {
            return Err(Error::domain("activities must lie in [0,1]"));
        }
        Ok(ActivityVector { values })
    }

    pub fn zeros(n: usize) -> Self {
        ActivityVector {
            values: vec![S::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> S {
        self.values[v]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn d_max(&self, other: &ActivityVector<S>) -> S {
        d_max(&self.values, &other.values)
    }
}

pub fn d_max<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(S::zero(), S::max)
}

/// Activation bits per arrow and active-input counts per vertex. Symbols
/// are exact integer data: two states on the same side of every threshold
/// have equal symbol states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolState {
    pub theta: Vec<u8>,
    pub counts: Vec<u32>,
}

/// One sampled dynamical system: graph, signs, thresholds and the
/// contraction rate `a` in [0,1). Immutable after construction; `step` is
/// a pure function, so instances can be shared across worker threads.
#[derive(Debug, Clone)]
pub struct RegulatoryNetwork<S> {
    graph: Digraph,
    signs: SignAssignment,
    thresholds: ThresholdAssignment<S>,
    contraction: S,
    in_degree_recip: Vec<S>,
}

impl<S: Scalar> RegulatoryNetwork<S> {
    pub fn new(
        graph: Digraph,
        signs: SignAssignment,
        thresholds: ThresholdAssignment<S>,
        contraction: S,
    ) -> Result<Self> {
        if signs.len() != graph.arrow_count() || thresholds.len() != graph.arrow_count() {
            return Err(Error::domain(format!(
                "sign/threshold domains ({}, {}) must equal the arrow set ({})",
                signs.len(),
                thresholds.len(),
                graph.arrow_count()
            )));
        }
        if !(contraction >= S::zero() && contraction < S::one()) {
            return Err(Error::domain("contraction rate must lie in [0,1)"));
        }
        let in_degree_recip = graph
            .in_degrees()
            .iter()
            .map(|&d| {
                if d == 0 {
                    S::zero()
                } else {
                    S::one() / S::from_count(d as usize)
                }
            })
            .collect();
        Ok(RegulatoryNetwork {
            graph,
            signs,
            thresholds,
            contraction,
            in_degree_recip,
        })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn signs(&self) -> &SignAssignment {
        &self.signs
    }

    pub fn thresholds(&self) -> &ThresholdAssignment<S> {
        &self.thresholds
    }

    pub fn contraction(&self) -> S {
        self.contraction
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn check_state(&self, x: &ActivityVector<S>) -> Result<()> {
        if x.len() != self.graph.vertex_count() {
            return Err(Error::domain(format!(
                "state length {} does not match vertex count {}",
                x.len(),
                self.graph.vertex_count()
            )));
        }
        Ok(())
    }

    /// Activation bit of a single arrow at the given source activity.
    pub fn arrow_active(&self, arrow_idx: usize, x_source: S) -> u8 {
        let t = self.thresholds.get(arrow_idx);
        if self.signs.get(arrow_idx) > 0 {
            heaviside(x_source - t)
        } else {
            heaviside(t - x_source)
        }
    }

    /// Fill per-vertex active-input counts (and per-arrow bits if a buffer
    /// is supplied). This is the O(|A|) inner kernel.
    pub(crate) fn fill_symbols(&self, x: &[S], mut theta: Option<&mut [u8]>, counts: &mut [u32]) {
        counts.fill(0);
        for (idx, &(u, v)) in self.graph.arrows().iter().enumerate() {
            let bit = self.arrow_active(idx, x[u]);
            counts[v] += bit as u32;
            if let Some(th) = theta.as_deref_mut() {
                th[idx] = bit;
            }
        }
    }

    /// One synchronous update given precomputed counts.
    pub(crate) fn step_from_counts(&self, x: &[S], counts: &[u32], out: &mut [S]) {
        let a = self.contraction;
        let one_minus_a = S::one() - a;
        for v in 0..x.len() {
            let d = S::from_count(counts[v] as usize) * self.in_degree_recip[v];
            let next = a * x[v] + one_minus_a * d;
            debug_assert!(next >= S::zero() && next <= S::one());
            out[v] = next;
        }
    }

    /// Symbol state (activation bits and input counts) at `x`.
    pub fn symbol_state(&self, x: &ActivityVector<S>) -> Result<SymbolState> {
        self.check_state(x)?;
        let mut theta = vec![0u8; self.graph.arrow_count()];
        let mut counts = vec![0u32; self.graph.vertex_count()];
        self.fill_symbols(x.values(), Some(&mut theta), &mut counts);
        Ok(SymbolState { theta, counts })
    }

    /// One synchronous step of the network map.
    pub fn step(&self, x: &ActivityVector<S>) -> Result<ActivityVector<S>> {
        self.check_state(x)?;
        let mut counts = vec![0u32; self.graph.vertex_count()];
        self.fill_symbols(x.values(), None, &mut counts);
        let mut out = vec![S::zero(); x.len()];
        self.step_from_counts(x.values(), &counts, &mut out);
        Ok(ActivityVector { values: out })
    }

    /// Max-metric distance from `x` to the discontinuity set: the minimum
    /// over arrows of `|x_source - T|`. Infinite for arrowless graphs.
    pub fn distance_to_discontinuity(&self, x: &ActivityVector<S>) -> Result<S> {
        self.check_state(x)?;
        Ok(self.distance_to_discontinuity_raw(x.values()))
    }

    pub(crate) fn distance_to_discontinuity_raw(&self, x: &[S]) -> S {
        let mut best = S::infinity();
        for (idx, &(u, _)) in self.graph.arrows().iter().enumerate() {
            let d = (x[u] - self.thresholds.get(idx)).abs();
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Iterate `steps` times, returning the final state and the minimum
    /// distance to the discontinuity set seen along the way (including the
    /// initial state, excluding the final one).
    pub fn run_orbit(
        &self,
        x0: &ActivityVector<S>,
        steps: usize,
    ) -> Result<(ActivityVector<S>, S)> {
        self.check_state(x0)?;
        let mut x = x0.values().to_vec();
        let mut next = vec![S::zero(); x.len()];
        let mut counts = vec![0u32; self.graph.vertex_count()];
        let mut min_margin = S::infinity();
        for _ in 0..steps {
            let d = self.distance_to_discontinuity_raw(&x);
            if d < min_margin {
                min_margin = d;
            }
            self.fill_symbols(&x, None, &mut counts);
            self.step_from_counts(&x, &counts, &mut next);
            std::mem::swap(&mut x, &mut next);
        }
        Ok((ActivityVector { values: x }, min_margin))
    }
}
