//! Module embeddings: given a converged witness orbit whose oscillation is
//! contained in a subnetwork, build an extension of the system in which
//! that subnetwork runs as an independent module.
//!
//! The construction:
//!
//! 1. every module vertex must keep a spare non-module input
//!    (`Id_osc(v) < Id(v)`); where the witness violates this, a fresh
//!    source vertex is added with frozen-off arrows into the violating
//!    vertices;
//! 2. non-module arrows leaving module vertices get their sign/threshold
//!    remapped so they stay frozen at their witness activation over the
//!    module's whole activity range;
//! 3. thresholds and initial conditions are confined to a rectangle
//!    product: epsilon-boxes around witness values off the module, and the
//!    full usable intervals `[D/Id, (D+Id_osc)/Id]` on it;
//! 4. the affine maps `phi_A`, `phi_V` (diagonal slope `Id/Id_osc`,
//!    constant `-D/Id_osc`) conjugate the embedded dynamics to the module
//!    run in isolation.
//!
//! Inside the rectangles every non-module arrow keeps a constant
//! activation bit, the oscillatory subnetwork stays inside the module, and
//! `phi_V o F_ext = F_module o phi_V` holds exactly in real arithmetic.

use std::collections::BTreeMap;

use rand::Rng;

use crate::attractor::{detect_attractor, Attractor, AttractorReport, DetectOptions};
use crate::digraph::{Digraph, Subnetwork, Vertex};
use crate::dynamics::{d_max, ActivityVector, RegulatoryNetwork};
use crate::ensembles::{EnsembleSeed, SignAssignment, ThresholdAssignment};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sign/threshold remap for a non-module arrow with module source `u`,
/// freezing it at its witness activation `theta` over the whole module
/// interval of `x_u`. Returns the new sign, the new threshold and the gap
/// between the new threshold and the module interval (the freeze margin
/// budget for threshold boxes).
fn remap_outgoing<S: Scalar>(
    theta: u8,
    sigma: i8,
    t: S,
    d_u: u32,
    id_u: u32,
    id_osc_u: u32,
) -> (i8, S, S) {
    let frac = |n: u32, d: u32| S::from_count(n as usize) / S::from_count(d as usize);
    let aligned = theta as i8 + sigma == 2 || theta as i8 + sigma == -1;
    if d_u > 0 {
        // threshold drops below the module interval [D/Id, ...]
        let scale = frac(d_u, id_u);
        let new_t = t * scale;
        let gap = scale * (S::one() - t);
        (if aligned { sigma } else { -sigma }, new_t, gap)
    } else {
        // threshold rises above the module interval [0, Id_osc/Id]
        let scale = frac(id_u - id_osc_u, id_u);
        let new_t = t * scale + frac(id_osc_u, id_u);
        let gap = t * scale;
        (if aligned { -sigma } else { sigma }, new_t, gap)
    }
}

/// Interval products for thresholds and initial conditions.
#[derive(Debug, Clone)]
pub struct Rectangles<S> {
    /// per-arrow threshold interval, aligned with the graph's arrow order
    pub thresholds: Vec<(S, S)>,
    /// per-vertex initial-condition interval
    pub initial: Vec<(S, S)>,
}

impl<S: Scalar> Rectangles<S> {
    pub fn sample(
        &self,
        rng: &mut impl Rng,
    ) -> (ThresholdAssignment<S>, ActivityVector<S>) {
        let mut draw =
            |(lo, hi): (S, S)| lo + S::from_f64_lossy(rng.random::<f64>()) * (hi - lo);
        let t: Vec<S> = self.thresholds.iter().map(|&iv| draw(iv)).collect();
        let x: Vec<S> = self.initial.iter().map(|&iv| draw(iv)).collect();
        (
            ThresholdAssignment::new(t).expect("rectangle lies in [0,1]"),
            ActivityVector::new(x).expect("rectangle lies in [0,1]"),
        )
    }

    pub fn contains(&self, t: &ThresholdAssignment<S>, x: &ActivityVector<S>) -> bool {
        t.values().len() == self.thresholds.len()
            && x.values().len() == self.initial.len()
            && t.values()
                .iter()
                .zip(&self.thresholds)
                .all(|(&v, &(lo, hi))| v >= lo && v <= hi)
            && x.values()
                .iter()
                .zip(&self.initial)
                .all(|(&v, &(lo, hi))| v >= lo && v <= hi)
    }
}

/// The perturbation box guaranteed to preserve an attractor's symbol
/// cycle: witness thresholds and a periodic point, with radius a third of
/// the attractor margin.
pub fn stability_rect<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    attractor: &Attractor<S>,
) -> Rectangles<S> {
    let radius = attractor.margin * S::from_f64_lossy(1.0 / 3.0);
    let clip = |v: S| v.max(S::zero()).min(S::one());
    let boxed = |v: S| (clip(v - radius), clip(v + radius));
    Rectangles {
        thresholds: net.thresholds().values().iter().map(|&t| boxed(t)).collect(),
        initial: attractor.points[0].values().iter().map(|&x| boxed(x)).collect(),
    }
}

/// A witnessed module embedding.
#[derive(Debug, Clone)]
pub struct ModuleEmbedding<S> {
    module: Subnetwork,
    module_dense: Digraph,
    /// dense module vertex -> parent vertex
    parent_of_dense: Vec<Vertex>,
    extension: Digraph,
    /// signs per extension arrow; module positions are placeholders
    /// overwritten by the per-call module signs
    base_signs: Vec<i8>,
    /// witness signs restricted to the module, in dense arrow order
    witness_module_signs: SignAssignment,
    /// extension arrow index per dense module arrow
    module_arrow_pos: Vec<usize>,
    is_module_arrow: Vec<bool>,
    /// witness activation bit per extension arrow (meaningful off-module)
    frozen_theta: Vec<u8>,
    rect: Rectangles<S>,
    /// in-degree in the extension
    id_ext: Vec<u32>,
    /// module in-degree per extension vertex
    id_osc: Vec<u32>,
    /// frozen-on input count D(v) per extension vertex
    frozen_on: Vec<u32>,
    contraction: S,
    epsilon: S,
}

/// Builds the embedding of `module` from a converged witness run.
pub fn build_embedding<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    report: &AttractorReport<S>,
    module: &Subnetwork,
) -> Result<ModuleEmbedding<S>> {
    let attractor = report
        .attractor()
        .ok_or_else(|| Error::construction("embedding needs a converged witness"))?;
    let graph = net.graph();
    let n = graph.vertex_count();
    if module.arrows().is_empty() {
        return Err(Error::construction("module must contain at least one arrow"));
    }
    for &(u, v) in module.arrows() {
        if !graph.has_arrow(u, v) {
            return Err(Error::construction(format!(
                "module arrow ({u},{v}) is not an arrow of the witness graph"
            )));
        }
    }

    // the witness oscillation must live inside the module
    let cycle = &attractor.symbol_cycle;
    for (i, &(u, v)) in graph.arrows().iter().enumerate() {
        let oscillates = cycle.iter().any(|s| s.theta[i] != cycle[0].theta[i]);
        if oscillates && !module.contains_arrow(u, v) {
            return Err(Error::construction(format!(
                "witness oscillation uses arrow ({u},{v}) outside the module"
            )));
        }
    }

    let in_module = |v: Vertex| module.contains_vertex(v);
    let mut id_osc = vec![0u32; n + 1];
    for &(_, v) in module.arrows() {
        id_osc[v] += 1;
    }
    for &v in module.vertices() {
        if id_osc[v] == 0 {
            return Err(Error::construction(format!(
                "module vertex {v} has no incoming module arrow"
            )));
        }
    }

    // frozen-on counts from the witness cycle (constant off-module bits)
    let mut frozen_on = vec![0u32; n + 1];
    for (i, &(u, v)) in graph.arrows().iter().enumerate() {
        if !module.contains_arrow(u, v) && cycle[0].theta[i] == 1 {
            frozen_on[v] += 1;
        }
    }

    // repair pass: module vertices with no spare input get a frozen-off
    // arrow from one fresh source vertex
    let repair: Vec<Vertex> = module
        .vertices()
        .iter()
        .copied()
        .filter(|&v| id_osc[v] as usize == graph.in_degree(v).expect("module vertex"))
        .collect();
    let fresh = (!repair.is_empty()).then_some(n);
    let n_ext = n + usize::from(fresh.is_some());

    let mut ext_arrows = graph.arrows().to_vec();
    if let Some(w) = fresh {
        for &v in &repair {
            ext_arrows.push((w, v));
        }
    }
    let extension = Digraph::new(n_ext, ext_arrows)?;
    let id_ext: Vec<u32> = extension.in_degrees().to_vec();
    let n_orig_arrows = graph.arrow_count();

    // first pass: remapped signs/thresholds and the freeze-gap budget
    let mut base_signs = vec![0i8; extension.arrow_count()];
    let mut frozen_theta = vec![0u8; extension.arrow_count()];
    let mut t_eff = vec![S::zero(); extension.arrow_count()];
    let mut min_gap = S::infinity();
    for (i, &(u, v)) in extension.arrows().iter().enumerate() {
        if i >= n_orig_arrows {
            break; // repair arrows are set after epsilon is fixed
        }
        if module.contains_arrow(u, v) {
            base_signs[i] = 1; // placeholder, overwritten per call
            continue;
        }
        let theta = cycle[0].theta[i];
        frozen_theta[i] = theta;
        let sigma = net.signs().get(i);
        let t = net.thresholds().get(i);
        if in_module(u) {
            let (s2, t2, gap) =
                remap_outgoing(theta, sigma, t, frozen_on[u], id_ext[u], id_osc[u]);
            base_signs[i] = s2;
            t_eff[i] = t2;
            if gap < min_gap {
                min_gap = gap;
            }
        } else {
            base_signs[i] = sigma;
            t_eff[i] = t;
        }
    }

    let third = S::from_f64_lossy(1.0 / 3.0);
    let epsilon = (attractor.margin * third)
        .min(S::from_f64_lossy(0.3))
        .min(min_gap * S::from_f64_lossy(0.5));
    let epsilon_ok = epsilon > S::zero();
    if !epsilon_ok {
        return Err(Error::construction(format!(
            "degenerate freeze gap leaves no rectangle interior (epsilon {:e})",
            epsilon.as_f64()
        )));
    }

    for i in n_orig_arrows..extension.arrow_count() {
        base_signs[i] = 1;
        frozen_theta[i] = 0;
        t_eff[i] = S::one() - epsilon;
    }

    // rectangle products
    let clip = |v: S| v.max(S::zero()).min(S::one());
    let frac = |a: u32, b: u32| S::from_count(a as usize) / S::from_count(b as usize);
    let mut rect_t = Vec::with_capacity(extension.arrow_count());
    for (i, &(u, v)) in extension.arrows().iter().enumerate() {
        if i < n_orig_arrows && module.contains_arrow(u, v) {
            rect_t.push((
                frac(frozen_on[u], id_ext[u]),
                frac(frozen_on[u] + id_osc[u], id_ext[u]),
            ));
        } else {
            rect_t.push((clip(t_eff[i] - epsilon), clip(t_eff[i] + epsilon)));
        }
    }
    let mut rect_x = Vec::with_capacity(n_ext);
    for v in 0..n_ext {
        if in_module(v) {
            rect_x.push((
                frac(frozen_on[v], id_ext[v]),
                frac(frozen_on[v] + id_osc[v], id_ext[v]),
            ));
        } else {
            let level = if id_ext[v] == 0 {
                S::zero()
            } else {
                frac(frozen_on[v], id_ext[v])
            };
            rect_x.push((clip(level - epsilon), clip(level + epsilon)));
        }
    }

    let (module_dense, parent_of_dense) = module.to_dense();
    let module_arrow_pos: Vec<usize> = module
        .arrows()
        .iter()
        .map(|&(u, v)| extension.arrow_index(u, v).expect("module arrow in extension"))
        .collect();
    let mut is_module_arrow = vec![false; extension.arrow_count()];
    for &i in &module_arrow_pos {
        is_module_arrow[i] = true;
    }
    let witness_module_signs = SignAssignment::new(
        module
            .arrows()
            .iter()
            .map(|&(u, v)| {
                net.signs()
                    .get(graph.arrow_index(u, v).expect("module arrow in witness"))
            })
            .collect(),
    )?;

    Ok(ModuleEmbedding {
        module: module.clone(),
        module_dense,
        parent_of_dense,
        extension,
        base_signs,
        witness_module_signs,
        module_arrow_pos,
        is_module_arrow,
        frozen_theta,
        rect: Rectangles {
            thresholds: rect_t,
            initial: rect_x,
        },
        id_ext,
        id_osc: id_osc[..n_ext].to_vec(),
        frozen_on: frozen_on[..n_ext].to_vec(),
        contraction: net.contraction(),
        epsilon,
    })
}

impl<S: Scalar> ModuleEmbedding<S> {
    pub fn module(&self) -> &Subnetwork {
        &self.module
    }

    pub fn module_dense(&self) -> &Digraph {
        &self.module_dense
    }

    pub fn parent_of_dense(&self) -> &[Vertex] {
        &self.parent_of_dense
    }

    pub fn extension(&self) -> &Digraph {
        &self.extension
    }

    pub fn rectangles(&self) -> &Rectangles<S> {
        &self.rect
    }

    pub fn epsilon(&self) -> S {
        self.epsilon
    }

    pub fn contraction(&self) -> S {
        self.contraction
    }

    pub fn witness_module_signs(&self) -> &SignAssignment {
        &self.witness_module_signs
    }

    /// Frozen external input count `D(v)` per extension vertex.
    pub fn external_levels(&self) -> &[u32] {
        &self.frozen_on
    }

    /// Diagonal slope and constant of `phi_A` for a dense module arrow.
    pub fn phi_a_coeffs(&self, dense_arrow: usize) -> (S, S) {
        let (u, _) = self.module_dense.arrows()[dense_arrow];
        self.phi_v_coeffs(u)
    }

    /// Diagonal slope and constant of `phi_V` for a dense module vertex.
    pub fn phi_v_coeffs(&self, dense_vertex: usize) -> (S, S) {
        let v = self.parent_of_dense[dense_vertex];
        let slope = S::from_count(self.id_ext[v] as usize) / S::from_count(self.id_osc[v] as usize);
        let constant = -(S::from_count(self.frozen_on[v] as usize)
            / S::from_count(self.id_osc[v] as usize));
        (slope, constant)
    }

    /// `phi_A`: module-relative thresholds of an extension threshold vector.
    pub fn phi_a(&self, t_ext: &ThresholdAssignment<S>) -> ThresholdAssignment<S> {
        let values = (0..self.module_dense.arrow_count())
            .map(|j| {
                let (slope, c) = self.phi_a_coeffs(j);
                let t = t_ext.get(self.module_arrow_pos[j]);
                (slope * t + c).max(S::zero()).min(S::one())
            })
            .collect();
        ThresholdAssignment::new(values).expect("phi_A maps the rectangle into [0,1]")
    }

    /// `phi_V` without clamping, for defect measurements.
    pub fn phi_v_raw(&self, x_ext: &[S]) -> Vec<S> {
        (0..self.parent_of_dense.len())
            .map(|k| {
                let (slope, c) = self.phi_v_coeffs(k);
                slope * x_ext[self.parent_of_dense[k]] + c
            })
            .collect()
    }

    /// `phi_V` as a valid module state.
    pub fn phi_v(&self, x_ext: &ActivityVector<S>) -> ActivityVector<S> {
        let values = self
            .phi_v_raw(x_ext.values())
            .into_iter()
            .map(|v| v.max(S::zero()).min(S::one()))
            .collect();
        ActivityVector::new(values).expect("clamped")
    }

    /// Inverse of `phi_A` on one module arrow coordinate.
    pub fn pull_back_threshold(&self, dense_arrow: usize, t_module: S) -> S {
        let (slope, c) = self.phi_a_coeffs(dense_arrow);
        let (lo, hi) = self.rect.thresholds[self.module_arrow_pos[dense_arrow]];
        ((t_module - c) / slope).max(lo).min(hi)
    }

    /// Inverse of `phi_V` on one module vertex coordinate.
    pub fn pull_back_activity(&self, dense_vertex: usize, x_module: S) -> S {
        let (slope, c) = self.phi_v_coeffs(dense_vertex);
        let v = self.parent_of_dense[dense_vertex];
        let (lo, hi) = self.rect.initial[v];
        ((x_module - c) / slope).max(lo).min(hi)
    }

    /// Extension sign assignment for a given choice of module signs
    /// (dense arrow order).
    pub fn extended_signs(&self, module_signs: &SignAssignment) -> Result<SignAssignment> {
        if module_signs.len() != self.module_arrow_pos.len() {
            return Err(Error::domain("module sign count mismatch"));
        }
        let mut values = self.base_signs.clone();
        for (j, &pos) in self.module_arrow_pos.iter().enumerate() {
            values[pos] = module_signs.get(j);
        }
        SignAssignment::new(values)
    }

    /// The embedded full system for given module signs and thresholds.
    pub fn extended_network(
        &self,
        module_signs: &SignAssignment,
        t_ext: &ThresholdAssignment<S>,
    ) -> Result<RegulatoryNetwork<S>> {
        RegulatoryNetwork::new(
            self.extension.clone(),
            self.extended_signs(module_signs)?,
            t_ext.clone(),
            self.contraction,
        )
    }

    /// The isolated module system conjugate to the embedded one.
    pub fn module_network(
        &self,
        module_signs: &SignAssignment,
        t_ext: &ThresholdAssignment<S>,
    ) -> Result<RegulatoryNetwork<S>> {
        RegulatoryNetwork::new(
            self.module_dense.clone(),
            module_signs.clone(),
            self.phi_a(t_ext),
            self.contraction,
        )
    }

    /// Exact surjectivity of the affine maps onto [0,1] per coordinate,
    /// verified in integer arithmetic on the stored interval data.
    pub fn surjectivity_check(&self) -> Result<()> {
        let check = |v: Vertex, what: &str| -> Result<()> {
            let (id, osc, d) = (
                self.id_ext[v] as i128,
                self.id_osc[v] as i128,
                self.frozen_on[v] as i128,
            );
            // slope * e + c = (id * e_num - d * e_den) / (osc * e_den)
            // for an endpoint e = e_num / e_den
            let eval = |e_num: i128, e_den: i128| (id * e_num - d * e_den, osc * e_den);
            let (lo_num, _) = eval(d, id);
            let (hi_num, hi_den) = eval(d + osc, id);
            if lo_num != 0 || hi_num != hi_den {
                return Err(Error::construction(format!(
                    "{what} {v}: affine image is not exactly [0,1]"
                )));
            }
            Ok(())
        };
        for j in 0..self.module_dense.arrow_count() {
            let (u, _) = self.module.arrows()[j];
            check(u, "phi_A source")?;
        }
        for &v in self.module.vertices() {
            check(v, "phi_V vertex")?;
        }
        Ok(())
    }
}

/// Result of iterating the conjugacy over a sampled rectangle point.
#[derive(Debug, Clone, Copy)]
pub struct ConjugacyReport<S> {
    /// max over steps of d_max(phi_V(F_ext^t(x)), F_module^t(phi_V(x)))
    pub defect: S,
    /// steps at which some non-module arrow left its frozen activation
    pub frozen_violations: usize,
    pub steps: usize,
}

/// Iterates both sides of the conjugacy for `steps` steps.
pub fn conjugacy_defect<S: Scalar>(
    emb: &ModuleEmbedding<S>,
    module_signs: &SignAssignment,
    t_ext: &ThresholdAssignment<S>,
    x_ext: &ActivityVector<S>,
    steps: usize,
) -> Result<ConjugacyReport<S>> {
    conjugacy_defect_impl(emb, module_signs, t_ext, x_ext, steps, S::zero())
}

/// Negative-control variant: shifts the constant of `phi_V` by `shift` on
/// every module coordinate, which must break the conjugacy.
pub fn conjugacy_defect_shifted<S: Scalar>(
    emb: &ModuleEmbedding<S>,
    module_signs: &SignAssignment,
    t_ext: &ThresholdAssignment<S>,
    x_ext: &ActivityVector<S>,
    steps: usize,
    shift: S,
) -> Result<ConjugacyReport<S>> {
    conjugacy_defect_impl(emb, module_signs, t_ext, x_ext, steps, shift)
}

fn conjugacy_defect_impl<S: Scalar>(
    emb: &ModuleEmbedding<S>,
    module_signs: &SignAssignment,
    t_ext: &ThresholdAssignment<S>,
    x_ext: &ActivityVector<S>,
    steps: usize,
    shift: S,
) -> Result<ConjugacyReport<S>> {
    if !emb.rect.contains(t_ext, x_ext) {
        return Err(Error::domain(
            "thresholds/initial condition outside the embedding rectangles",
        ));
    }
    let ext_net = emb.extended_network(module_signs, t_ext)?;
    let mod_net = emb.module_network(module_signs, t_ext)?;

    let phi_shifted = |x: &[S]| -> Vec<S> {
        emb.phi_v_raw(x).into_iter().map(|v| v + shift).collect()
    };
    let clamp = |values: Vec<S>| -> ActivityVector<S> {
        ActivityVector::new(
            values
                .into_iter()
                .map(|v| v.max(S::zero()).min(S::one()))
                .collect(),
        )
        .expect("clamped")
    };

    let mut x = x_ext.clone();
    let mut y = clamp(phi_shifted(x_ext.values()));
    let mut defect = S::zero();
    let mut frozen_violations = 0usize;
    let mut theta = vec![0u8; emb.extension.arrow_count()];
    let mut counts = vec![0u32; emb.extension.vertex_count()];

    for t in 0..=steps {
        let gap = d_max(&phi_shifted(x.values()), y.values());
        if gap > defect {
            defect = gap;
        }
        ext_net.fill_symbols(x.values(), Some(&mut theta), &mut counts);
        let frozen_ok = theta
            .iter()
            .zip(&emb.is_module_arrow)
            .zip(&emb.frozen_theta)
            .all(|((&th, &is_mod), &frozen)| is_mod || th == frozen);
        if !frozen_ok {
            frozen_violations += 1;
        }
        if t < steps {
            x = ext_net.step(&x)?;
            y = mod_net.step(&y)?;
        }
    }
    Ok(ConjugacyReport {
        defect,
        frozen_violations,
        steps,
    })
}

/// One sampled comparison in the lcm experiment.
#[derive(Debug, Clone, Copy)]
pub struct LcmSample {
    pub tau_full: Option<usize>,
    pub tau_1: Option<usize>,
    pub tau_2: Option<usize>,
    pub matched: bool,
}

#[derive(Debug, Clone)]
pub struct LcmReport {
    pub samples: Vec<LcmSample>,
    pub full_period_histogram: BTreeMap<usize, usize>,
}

impl LcmReport {
    pub fn n_converged(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.tau_full.is_some() && s.tau_1.is_some() && s.tau_2.is_some())
            .count()
    }

    pub fn n_matched(&self) -> usize {
        self.samples.iter().filter(|s| s.matched).count()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

/// Samples the embedding rectangles of the disjoint union of two modules,
/// pinning the module-space coordinates inside the given per-module
/// rectangles, and compares the full-system asymptotic period against the
/// least common multiple of the isolated module periods.
#[allow(clippy::too_many_arguments)]
pub fn lcm_period_check<S: Scalar>(
    witness_net: &RegulatoryNetwork<S>,
    witness_x0: &ActivityVector<S>,
    module_1: &Subnetwork,
    rect_1: &Rectangles<S>,
    module_2: &Subnetwork,
    rect_2: &Rectangles<S>,
    samples: usize,
    seed: EnsembleSeed,
    opts: &DetectOptions<S>,
) -> Result<LcmReport> {
    if module_1
        .vertices()
        .iter()
        .any(|&v| module_2.contains_vertex(v))
    {
        return Err(Error::domain("modules must be vertex-disjoint"));
    }
    let union = Subnetwork::new(
        [module_1.vertices(), module_2.vertices()].concat(),
        [module_1.arrows(), module_2.arrows()].concat(),
    )?;
    let witness_report = detect_attractor(witness_net, witness_x0, opts)?;
    let emb = build_embedding(witness_net, &witness_report, &union)?;

    // map each dense union arrow/vertex to its module-local rectangle
    let arrow_rect: Vec<(S, S)> = union
        .arrows()
        .iter()
        .map(|&(u, v)| {
            if module_1.contains_arrow(u, v) {
                let j = module_1.arrows().binary_search(&(u, v)).unwrap();
                rect_1.thresholds[j]
            } else {
                let j = module_2.arrows().binary_search(&(u, v)).unwrap();
                rect_2.thresholds[j]
            }
        })
        .collect();
    let vertex_rect: Vec<(S, S)> = union
        .vertices()
        .iter()
        .map(|&v| {
            if module_1.contains_vertex(v) {
                let k = module_1.vertices().binary_search(&v).unwrap();
                rect_1.initial[k]
            } else {
                let k = module_2.vertices().binary_search(&v).unwrap();
                rect_2.initial[k]
            }
        })
        .collect();

    let split_net = |sub: &Subnetwork,
                     t_mod: &ThresholdAssignment<S>,
                     x_mod: &ActivityVector<S>|
     -> Result<(RegulatoryNetwork<S>, ActivityVector<S>)> {
        let (dense, dense_vertices) = sub.to_dense();
        let signs = SignAssignment::new(
            sub.arrows()
                .iter()
                .map(|&(u, v)| {
                    emb.witness_module_signs
                        .get(union.arrows().binary_search(&(u, v)).unwrap())
                })
                .collect(),
        )?;
        let thresholds = ThresholdAssignment::new(
            sub.arrows()
                .iter()
                .map(|&(u, v)| t_mod.get(union.arrows().binary_search(&(u, v)).unwrap()))
                .collect(),
        )?;
        let x0 = ActivityVector::new(
            dense_vertices
                .iter()
                .map(|&v| x_mod.get(union.vertices().binary_search(&v).unwrap()))
                .collect(),
        )?;
        Ok((
            RegulatoryNetwork::new(dense, signs, thresholds, emb.contraction())?,
            x0,
        ))
    };

    let mut out = Vec::with_capacity(samples);
    let mut full_hist = BTreeMap::new();
    for s in 0..samples {
        let mut rng = seed.stream("lcm", &[s as u64]);
        // module-space draws inside the prescribed rectangles
        let t_mod_vals: Vec<S> = arrow_rect
            .iter()
            .map(|&(lo, hi)| lo + S::from_f64_lossy(rng.random::<f64>()) * (hi - lo))
            .collect();
        let x_mod_vals: Vec<S> = vertex_rect
            .iter()
            .map(|&(lo, hi)| lo + S::from_f64_lossy(rng.random::<f64>()) * (hi - lo))
            .collect();

        // pull back into the extension, sampling the free coordinates
        let mut t_ext = Vec::with_capacity(emb.extension().arrow_count());
        for (i, &(lo, hi)) in emb.rect.thresholds.iter().enumerate() {
            if emb.is_module_arrow[i] {
                t_ext.push(S::zero()); // filled below
            } else {
                t_ext.push(lo + S::from_f64_lossy(rng.random::<f64>()) * (hi - lo));
            }
        }
        for (j, &pos) in emb.module_arrow_pos.iter().enumerate() {
            t_ext[pos] = emb.pull_back_threshold(j, t_mod_vals[j]);
        }
        let mut x_ext = Vec::with_capacity(emb.extension().vertex_count());
        let dense_of = |v: Vertex| union.vertices().binary_search(&v).ok();
        for (v, &(lo, hi)) in emb.rect.initial.iter().enumerate() {
            match dense_of(v) {
                Some(k) => x_ext.push(emb.pull_back_activity(k, x_mod_vals[k])),
                None => x_ext.push(lo + S::from_f64_lossy(rng.random::<f64>()) * (hi - lo)),
            }
        }
        let t_ext = ThresholdAssignment::new(t_ext)?;
        let x_ext = ActivityVector::new(x_ext)?;

        let full_net = emb.extended_network(emb.witness_module_signs(), &t_ext)?;
        let full_report = detect_attractor(&full_net, &x_ext, opts)?;
        let tau_full = full_report.attractor().map(|a| a.period);

        // the conjugate module coordinates drive the isolated runs
        let t_mod = emb.phi_a(&t_ext);
        let x_mod = emb.phi_v(&x_ext);
        let (net_1, x0_1) = split_net(module_1, &t_mod, &x_mod)?;
        let (net_2, x0_2) = split_net(module_2, &t_mod, &x_mod)?;
        let tau_1 = detect_attractor(&net_1, &x0_1, opts)?
            .attractor()
            .map(|a| a.period);
        let tau_2 = detect_attractor(&net_2, &x0_2, opts)?
            .attractor()
            .map(|a| a.period);

        let matched = match (tau_full, tau_1, tau_2) {
            (Some(f), Some(t1), Some(t2)) => f == lcm(t1, t2),
            _ => false,
        };
        if let Some(f) = tau_full {
            *full_hist.entry(f).or_insert(0usize) += 1;
        }
        out.push(LcmSample {
            tau_full,
            tau_1,
            tau_2,
            matched,
        });
    }
    Ok(LcmReport {
        samples: out,
        full_period_histogram: full_hist,
    })
}
