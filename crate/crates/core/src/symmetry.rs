//! The inhibition/activation symmetry on odd-cycle-free digraphs.
//!
//! On a digraph whose underlying undirected graph is bipartite, flipping
//! every sign is conjugate to the original system through the parity
//! transforms
//!
//! ```text
//! psi_V(x)_v = 1 - x_v          on even-class vertices,
//! psi_A(T)_(u,v) = 1 - T_(u,v)  on arrows with even-class source,
//! ```
//!
//! identity elsewhere: F_{-sigma, psi_A(T)} o psi_V = psi_V o F_{sigma, T}
//! away from the discontinuity set. Coupling an ensemble at inhibition
//! probability eta with its image at 1 - eta therefore reproduces periods
//! and oscillatory arrow sets exactly, instance by instance.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attractor::{
    detect_attractor, oscillatory_subnetwork, AttractorReport, DetectOptions,
};
use crate::digraph::{Arrow, Bipartition, Digraph, Vertex};
use crate::dynamics::{d_max, ActivityVector, RegulatoryNetwork};
use crate::ensembles::{
    sample_initial, sample_signs, sample_thresholds, EnsembleSeed, GraphModel, ThresholdAssignment,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Vertex parity classes from a bipartition. The even class is the one
/// the transform flips; per weak component it is chosen as the class free
/// of input-free vertices (the pivot's class when both are), because a
/// flipped input-free vertex decays to 0 in both systems and breaks the
/// conjugacy. With that choice the conjugacy is exact on the largest
/// possible domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityTransform {
    even: Vec<bool>,
    /// per arrow: threshold flips iff the source is even-class
    arrow_flip: Vec<bool>,
}

/// Builds the parity transform. Fails naming an odd cycle when the
/// underlying undirected graph is not bipartite, and naming a clashing
/// pair of input-free vertices when they occupy both bipartition classes
/// of one component (no exact conjugacy exists there).
pub fn build_parity_transform(g: &Digraph) -> Result<ParityTransform> {
    let coloring = match g.bipartition() {
        Bipartition::TwoColoring(c) => c,
        Bipartition::OddCycle(cycle) => {
            return Err(Error::domain(format!(
                "graph admits an odd cycle through vertices {cycle:?}"
            )));
        }
    };
    // BFS roots are the lowest-indexed vertex (the pivot) of each component
    // and carry color 0.
    let component_ids = g.weak_component_ids();
    let n_components = component_ids.iter().copied().max().map_or(0, |m| m + 1);
    // which colors contain input-free vertices, per component
    let mut source_color: Vec<[Option<Vertex>; 2]> = vec![[None, None]; n_components];
    for v in 0..g.vertex_count() {
        if g.in_degrees()[v] == 0 {
            source_color[component_ids[v]][coloring[v] as usize].get_or_insert(v);
        }
    }
    let mut flip_color = vec![0u8; n_components];
    for (comp, sources) in source_color.iter().enumerate() {
        match sources {
            [Some(a), Some(b)] => {
                return Err(Error::domain(format!(
                    "no valid parity transform: input-free vertices {a} and {b} \
                     lie in opposite bipartition classes"
                )));
            }
            [Some(_), None] => flip_color[comp] = 1,
            _ => flip_color[comp] = 0,
        }
    }
    let even: Vec<bool> = (0..g.vertex_count())
        .map(|v| coloring[v] == flip_color[component_ids[v]])
        .collect();
    let arrow_flip = g.arrows().iter().map(|&(u, _)| even[u]).collect();
    Ok(ParityTransform { even, arrow_flip })
}

impl ParityTransform {
    pub fn is_even(&self, v: usize) -> bool {
        self.even[v]
    }

    /// x_v -> 1 - x_v on even-class vertices.
    pub fn psi_v<S: Scalar>(&self, x: &ActivityVector<S>) -> ActivityVector<S> {
        let values = x
            .values()
            .iter()
            .zip(&self.even)
            .map(|(&x, &e)| if e { S::one() - x } else { x })
            .collect();
        ActivityVector::new(values).expect("1-x stays in [0,1]")
    }

    /// T_(u,v) -> 1 - T_(u,v) on arrows whose source is even-class.
    pub fn psi_a<S: Scalar>(&self, t: &ThresholdAssignment<S>) -> ThresholdAssignment<S> {
        let values = t
            .values()
            .iter()
            .zip(&self.arrow_flip)
            .map(|(&t, &f)| if f { S::one() - t } else { t })
            .collect();
        ThresholdAssignment::new(values).expect("1-T stays in [0,1]")
    }
}

/// The sign-flipped conjugate system (-sigma, psi_A(T)).
pub fn sign_flipped_network<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    pt: &ParityTransform,
) -> RegulatoryNetwork<S> {
    RegulatoryNetwork::new(
        net.graph().clone(),
        net.signs().negated(),
        pt.psi_a(net.thresholds()),
        net.contraction(),
    )
    .expect("transformed instance is valid")
}

/// Result of iterating both sides of the conjugacy.
#[derive(Debug, Clone, Copy)]
pub struct ConjugacyRun<S> {
    /// max over steps of d_max(psi_V(F^t(x)), F_flipped^t(psi_V(x)))
    pub defect: S,
    /// minimum distance of the base orbit to the discontinuity set
    pub min_margin: S,
    pub steps: usize,
}

/// Iterates the base system and its sign-flipped conjugate for `steps`
/// steps and measures the worst coordinate disagreement. Exact up to float
/// roundoff whenever the orbit stays off the discontinuity set.
pub fn sign_flip_conjugacy_defect<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    x0: &ActivityVector<S>,
    steps: usize,
) -> Result<ConjugacyRun<S>> {
    let pt = build_parity_transform(net.graph())?;
    let flipped = sign_flipped_network(net, &pt);
    let mut x = x0.clone();
    let mut y = pt.psi_v(x0);
    let mut defect = S::zero();
    let mut min_margin = S::infinity();
    for t in 0..=steps {
        let gap = d_max(pt.psi_v(&x).values(), y.values());
        if gap > defect {
            defect = gap;
        }
        let margin = net.distance_to_discontinuity(&x)?;
        if margin < min_margin {
            min_margin = margin;
        }
        if t < steps {
            x = net.step(&x)?;
            y = flipped.step(&y)?;
        }
    }
    Ok(ConjugacyRun {
        defect,
        min_margin,
        steps,
    })
}

/// Paired-ensemble experiment specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetrySpec {
    pub graph_model: GraphModel,
    pub n_vertices: usize,
    pub a: f64,
    pub eta: f64,
    pub instances: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    pub root_seed: u64,
}

fn default_max_steps() -> usize {
    100_000
}

/// Comparison report of the ensemble at eta against the coupled ensemble
/// at 1 - eta.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub eta: f64,
    pub n_instances: usize,
    /// instances left out of the exact-match flags: no exact coupling
    /// (below), non-converged, or some orbit point within 1e-9 of a
    /// threshold
    pub n_excluded: usize,
    /// graphs with an odd cycle: partnered by plain sign negation, which
    /// is distribution-correct but not orbit-conjugate
    pub n_nonbipartite: usize,
    /// bipartite graphs whose input-free vertices occupy both parity
    /// classes: same plain-negation pairing
    pub n_untransformable: usize,
    pub period_hist_match: bool,
    pub osc_hist_match: bool,
    pub max_defect: f64,
    /// all converged base instances
    pub period_histogram: BTreeMap<usize, usize>,
    /// all converged partner instances
    pub coupled_period_histogram: BTreeMap<usize, usize>,
}

const EXCLUSION_MARGIN: f64 = 1e-9;

enum Pairing {
    Conjugate,
    NonBipartite,
    Untransformable,
}

struct InstanceComparison {
    pairing: Pairing,
    excluded: bool,
    base_period: Option<usize>,
    coupled_period: Option<usize>,
    base_osc: Option<Vec<Arrow>>,
    coupled_osc: Option<Vec<Arrow>>,
    defect: f64,
}

fn run_pair(spec: &SymmetrySpec, index: u64) -> Result<InstanceComparison> {
    let seed = EnsembleSeed::new(spec.root_seed);
    let mut graph_rng = seed.graph_stream(index);
    let graph = spec.graph_model.sample(spec.n_vertices, &mut graph_rng)?;
    let signs = sample_signs(graph.arrows(), spec.eta, &mut graph_rng)?;
    let thresholds: ThresholdAssignment<f64> = sample_thresholds(graph.arrows(), &mut graph_rng);
    let x0: ActivityVector<f64> =
        sample_initial(spec.n_vertices, &mut seed.orbit_stream(index, 0));

    let base = RegulatoryNetwork::new(graph.clone(), signs.clone(), thresholds.clone(), spec.a)?;
    let opts = DetectOptions::with_max_steps(spec.max_steps);
    let base_report = detect_attractor(&base, &x0, &opts)?;

    let (coupled, coupled_x0, defect, pairing) = match build_parity_transform(&graph) {
        Ok(pt) => {
            let flipped = sign_flipped_network(&base, &pt);
            let run = sign_flip_conjugacy_defect(&base, &x0, spec.max_steps.min(1000))?;
            (flipped, pt.psi_v(&x0), run, Pairing::Conjugate)
        }
        Err(_) => {
            // no exact coupling: plain sign negation still maps the eta
            // ensemble onto the 1 - eta ensemble, instance periods just
            // need not match
            let pairing = match graph.bipartition() {
                Bipartition::OddCycle(_) => Pairing::NonBipartite,
                Bipartition::TwoColoring(_) => Pairing::Untransformable,
            };
            let net = RegulatoryNetwork::new(
                graph.clone(),
                signs.negated(),
                thresholds.clone(),
                spec.a,
            )?;
            let run = ConjugacyRun {
                defect: 0.0,
                min_margin: f64::INFINITY,
                steps: 0,
            };
            (net, x0.clone(), run, pairing)
        }
    };
    let coupled_report = detect_attractor(&coupled, &coupled_x0, &opts)?;

    let osc_arrows = |net: &RegulatoryNetwork<f64>, report: &AttractorReport<f64>| {
        report
            .converged()
            .then(|| oscillatory_subnetwork(net, report).map(|o| o.subnetwork.arrows().to_vec()))
            .transpose()
    };

    let attractor_margin =
        |report: &AttractorReport<f64>| report.attractor().map_or(0.0, |a| a.margin);
    let excluded = !matches!(pairing, Pairing::Conjugate)
        || !base_report.converged()
        || !coupled_report.converged()
        || attractor_margin(&base_report) < EXCLUSION_MARGIN
        || attractor_margin(&coupled_report) < EXCLUSION_MARGIN
        || defect.min_margin < EXCLUSION_MARGIN;

    Ok(InstanceComparison {
        pairing,
        excluded,
        base_period: base_report.attractor().map(|a| a.period),
        coupled_period: coupled_report.attractor().map(|a| a.period),
        base_osc: osc_arrows(&base, &base_report)?,
        coupled_osc: osc_arrows(&coupled, &coupled_report)?,
        defect: defect.defect,
    })
}

/// Runs the ensemble at eta and the coupled ensemble at 1 - eta (signs
/// flipped, thresholds and initial conditions pushed through the parity
/// transforms) and compares periods and oscillatory arrow sets.
pub fn paired_ensemble_symmetry(spec: &SymmetrySpec) -> Result<SymmetryReport> {
    if !(0.0..=1.0).contains(&spec.eta) {
        return Err(Error::domain(format!("eta {} outside [0,1]", spec.eta)));
    }
    if !(0.0..1.0).contains(&spec.a) {
        return Err(Error::domain(format!("contraction {} outside [0,1)", spec.a)));
    }
    spec.graph_model.validate(spec.n_vertices)?;

    let comparisons: Vec<InstanceComparison> = (0..spec.instances as u64)
        .into_par_iter()
        .map(|i| run_pair(spec, i))
        .collect::<Result<_>>()?;

    let mut full_base_hist = BTreeMap::new();
    let mut full_coupled_hist = BTreeMap::new();
    let mut base_hist = BTreeMap::new();
    let mut coupled_hist = BTreeMap::new();
    let mut base_osc: Vec<Vec<Arrow>> = Vec::new();
    let mut coupled_osc: Vec<Vec<Arrow>> = Vec::new();
    let mut n_excluded = 0;
    let mut n_nonbipartite = 0;
    let mut n_untransformable = 0;
    let mut max_defect = 0.0f64;

    for c in &comparisons {
        match c.pairing {
            Pairing::NonBipartite => n_nonbipartite += 1,
            Pairing::Untransformable => n_untransformable += 1,
            Pairing::Conjugate => {}
        }
        if let Some(tau) = c.base_period {
            *full_base_hist.entry(tau).or_insert(0usize) += 1;
        }
        if let Some(tau) = c.coupled_period {
            *full_coupled_hist.entry(tau).or_insert(0usize) += 1;
        }
        if c.excluded {
            n_excluded += 1;
            continue;
        }
        *base_hist.entry(c.base_period.unwrap()).or_insert(0usize) += 1;
        *coupled_hist
            .entry(c.coupled_period.unwrap())
            .or_insert(0usize) += 1;
        base_osc.push(c.base_osc.clone().unwrap());
        coupled_osc.push(c.coupled_osc.clone().unwrap());
        max_defect = max_defect.max(c.defect);
    }
    base_osc.sort();
    coupled_osc.sort();

    Ok(SymmetryReport {
        eta: spec.eta,
        n_instances: spec.instances,
        n_excluded,
        n_nonbipartite,
        n_untransformable,
        period_hist_match: base_hist == coupled_hist,
        osc_hist_match: base_osc == coupled_osc,
        max_defect,
        period_histogram: full_base_hist,
        coupled_period_histogram: full_coupled_hist,
    })
}
