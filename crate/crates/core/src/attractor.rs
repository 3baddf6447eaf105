//! Periodic attractor detection.
//!
//! The orbit of a piecewise affine contraction is driven by its symbol
//! sequence (the per-vertex active-input counts): between discontinuity
//! crossings the map is affine with diagonal slope `a`. Once the symbol
//! sequence is periodic with period `tau`, the orbit converges to the
//! unique fixed point of the composed affine map, which has a closed form
//! as a geometric series in the symbols.
//!
//! Detection therefore works on the exact integer symbol sequence, never
//! on floating-point state recurrence:
//!
//! 1. scan the orbit, hashing each step's count vector;
//! 2. on a hash match at distance `tau`, cross-check the recent history
//!    and then confirm `window * tau` further exact matches;
//! 3. reduce `tau` to the minimal period of the confirmed cycle;
//! 4. compute the candidate periodic points analytically and verify that
//!    they reproduce the symbol cycle with a positive margin to the
//!    discontinuity set.
//!
//! A verified candidate is accepted; a candidate that fails verification
//! is reported as unresolved, never as a wrong attractor.

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::digraph::Subnetwork;
use crate::dynamics::{ActivityVector, RegulatoryNetwork, SymbolState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Knobs for `detect_attractor`.
#[derive(Debug, Clone)]
pub struct DetectOptions<S> {
    /// Give up after this many steps.
    pub max_steps: usize,
    /// Confirmation window in units of the candidate period.
    pub window: usize,
    /// Minimum margin to the discontinuity set for a verified attractor.
    pub verify_tol: S,
}

impl<S: Scalar> Default for DetectOptions<S> {
    fn default() -> Self {
        DetectOptions {
            max_steps: 100_000,
            window: 3,
            verify_tol: S::from_f64_lossy(1e-9),
        }
    }
}

impl<S: Scalar> DetectOptions<S> {
    pub fn with_max_steps(max_steps: usize) -> Self {
        DetectOptions {
            max_steps,
            ..Self::default()
        }
    }
}

/// A verified periodic attractor.
#[derive(Debug, Clone)]
pub struct Attractor<S> {
    /// First step from which the observed symbol sequence is tau-periodic
    /// over the simulated horizon.
    pub transient_steps: usize,
    /// Minimal period of the attractor.
    pub period: usize,
    /// The periodic points y^0..y^{tau-1}, phase-aligned so that y^s
    /// shadows x^{transient_steps + s}.
    pub points: Vec<ActivityVector<S>>,
    /// Minimum distance from the cycle to the discontinuity set.
    pub margin: S,
    /// Symbol states of the periodic points.
    pub symbol_cycle: Vec<SymbolState>,
}

/// How a detection run ended.
#[derive(Debug, Clone)]
pub enum Outcome<S> {
    Converged(Attractor<S>),
    /// The symbol sequence looked periodic but the analytic candidate
    /// failed verification (typically margin at or below tolerance).
    Unresolved { reason: String },
    /// No confirmed symbolic period within the step budget.
    Exhausted,
}

#[derive(Debug, Clone)]
pub struct AttractorReport<S> {
    pub steps_used: usize,
    pub outcome: Outcome<S>,
}

impl<S> AttractorReport<S> {
    pub fn converged(&self) -> bool {
        matches!(self.outcome, Outcome::Converged(_))
    }

    pub fn unresolved(&self) -> bool {
        matches!(self.outcome, Outcome::Unresolved { .. })
    }

    pub fn attractor(&self) -> Option<&Attractor<S>> {
        match &self.outcome {
            Outcome::Converged(a) => Some(a),
            _ => None,
        }
    }
}

/// Minimal period of the orbit's attractor, when one was verified.
pub fn asymptotic_period<S>(report: &AttractorReport<S>) -> Option<usize> {
    report.attractor().map(|a| a.period)
}

fn fnv1a(counts: &[u32]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &c in counts {
        for b in c.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut factors = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            factors.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    factors
}

/// Tolerance for float identities that hold exactly in real arithmetic
/// (cycle wrap-around, conjugacy defects).
pub fn verification_step_tol<S: Scalar>() -> S {
    let spec = S::from_f64_lossy(1e-12);
    let ulps = S::epsilon() * S::from_f64_lossy(32.0);
    spec.max(ulps)
}

/// The unique periodic orbit consistent with a given symbol cycle: y^0 is
/// the fixed point of the tau-fold composed affine map, the rest follow by
/// stepping with the prescribed symbols. The result is a candidate; callers
/// verify that its own symbol states reproduce the cycle.
pub fn periodic_point_from_symbols<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    symbol_cycle: &[SymbolState],
) -> Result<Vec<ActivityVector<S>>> {
    if symbol_cycle.is_empty() {
        return Err(Error::domain("symbol cycle must have length >= 1"));
    }
    for s in symbol_cycle {
        if s.counts.len() != net.vertex_count() {
            return Err(Error::domain("symbol cycle does not match the network"));
        }
    }
    let counts: Vec<&[u32]> = symbol_cycle.iter().map(|s| s.counts.as_slice()).collect();
    Ok(periodic_points_from_counts(net, &counts)
        .into_iter()
        .map(|values| ActivityVector::new(values).expect("periodic points lie in [0,1]"))
        .collect())
}

fn periodic_points_from_counts<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    counts_cycle: &[&[u32]],
) -> Vec<Vec<S>> {
    let tau = counts_cycle.len();
    let n = net.vertex_count();
    let a = net.contraction();
    let one = S::one();

    // y0_v = (1-a) * sum_{s=1..tau} a^{s-1} d_v^{(tau-s)} / (1 - a^tau),
    // with d_v^{(t)} = counts^{(t)}_v / Id(v) (0 for input-free vertices).
    let denom = one - a.powi(tau as i32);
    let mut y0 = vec![S::zero(); n];
    let d_of = |t: usize, v: usize| -> S {
        let id = net.graph().in_degrees()[v];
        if id == 0 {
            S::zero()
        } else {
            S::from_count(counts_cycle[t][v] as usize) / S::from_count(id as usize)
        }
    };
    for (v, y) in y0.iter_mut().enumerate() {
        let mut acc = d_of(0, v);
        for t in 1..tau {
            acc = acc * a + d_of(t, v);
        }
        // the series can overshoot the unit box by a rounding ulp
        *y = ((one - a) * acc / denom).min(one).max(S::zero());
    }

    let mut points = Vec::with_capacity(tau);
    points.push(y0);
    for t in 0..tau - 1 {
        let prev = points[t].clone();
        let mut next = vec![S::zero(); n];
        net.step_from_counts(&prev, counts_cycle[t], &mut next);
        points.push(next);
    }
    points
}

/// Detect the periodic attractor of the orbit of `x0`.
pub fn detect_attractor<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    x0: &ActivityVector<S>,
    opts: &DetectOptions<S>,
) -> Result<AttractorReport<S>> {
    if x0.len() != net.vertex_count() {
        return Err(Error::domain(format!(
            "initial state length {} does not match vertex count {}",
            x0.len(),
            net.vertex_count()
        )));
    }
    if opts.window == 0 {
        return Err(Error::domain("confirmation window must be >= 1"));
    }

    let n = net.vertex_count();
    let mut x = x0.values().to_vec();
    let mut next = vec![S::zero(); n];
    let mut counts = vec![0u32; n];

    let mut hashes: Vec<u64> = Vec::new();
    let mut occurrences: HashMap<u64, Vec<usize>> = HashMap::new();

    struct Confirm {
        tau: usize,
        ring: Vec<Vec<u32>>,
        ring_base: usize,
        matched: usize,
        needed: usize,
    }
    let mut confirm: Option<Confirm> = None;
    let mut steps_used = 0;
    let mut last_failure: Option<String> = None;

    // history must be tau-periodic over (up to) the last window*tau steps
    let consistent_history = |hashes: &[u64], t: usize, tau: usize, window: usize| -> bool {
        let lo = t.saturating_sub((window + 1) * tau);
        (lo..=t - tau).all(|s| hashes[s] == hashes[s + tau])
    };

    for t in 0..=opts.max_steps {
        steps_used = t;
        net.fill_symbols(&x, None, &mut counts);
        let h = fnv1a(&counts);
        hashes.push(h);
        occurrences.entry(h).or_default().push(t);

        match confirm.as_mut() {
            Some(c) => {
                if c.ring.len() < c.tau {
                    c.ring.push(counts.clone());
                } else {
                    let idx = (t - c.ring_base) % c.tau;
                    if counts == c.ring[idx] {
                        c.matched += 1;
                        if c.matched >= c.needed {
                            // a slow transient can masquerade as a periodic
                            // tail; only a verified candidate ends the run
                            let done = confirm.take().expect("confirming");
                            match verify_candidate(net, opts, &hashes, done.ring, done.ring_base)
                            {
                                Ok(attractor) => {
                                    return Ok(AttractorReport {
                                        steps_used,
                                        outcome: Outcome::Converged(attractor),
                                    });
                                }
                                Err(reason) => last_failure = Some(reason),
                            }
                        }
                    } else {
                        confirm = None;
                    }
                }
            }
            None => {
                if let Some(times) = occurrences.get(&h) {
                    for &prev in times.iter().rev().take(33) {
                        if prev == t {
                            continue;
                        }
                        let tau = t - prev;
                        let needed = opts.window * tau;
                        if t + tau + needed > opts.max_steps {
                            continue;
                        }
                        if !consistent_history(&hashes, t, tau, opts.window) {
                            continue;
                        }
                        confirm = Some(Confirm {
                            tau,
                            ring: vec![counts.clone()],
                            ring_base: t,
                            matched: 0,
                            needed,
                        });
                        break;
                    }
                }
            }
        }

        net.step_from_counts(&x, &counts, &mut next);
        std::mem::swap(&mut x, &mut next);
    }

    Ok(AttractorReport {
        steps_used,
        outcome: match last_failure {
            Some(reason) => Outcome::Unresolved { reason },
            None => Outcome::Exhausted,
        },
    })
}

/// Turn a confirmed symbol cycle into a verified attractor: reduce to the
/// minimal period, locate the transient, build the analytic points and
/// check that they reproduce the cycle with a margin above tolerance.
fn verify_candidate<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    opts: &DetectOptions<S>,
    hashes: &[u64],
    mut ring: Vec<Vec<u32>>,
    ring_base: usize,
) -> std::result::Result<Attractor<S>, String> {
    let n = net.vertex_count();

    // minimal period of the confirmed cycle, by exact symbol comparison
    let mut tau = ring.len();
    loop {
        let mut reduced = false;
        for p in prime_factors(tau) {
            let d = tau / p;
            if (0..tau).all(|i| ring[i] == ring[(i + d) % tau]) {
                ring.truncate(d);
                tau = d;
                reduced = true;
                break;
            }
        }
        if !reduced {
            break;
        }
    }

    // earliest start of the tau-periodic symbol tail, by hash backwalk
    let mut t0 = ring_base;
    while t0 > 0 && hashes[t0 - 1] == hashes[t0 - 1 + tau] {
        t0 -= 1;
    }

    // rotate the captured cycle so index 0 corresponds to phase t0
    let shift = (ring_base - t0) % tau;
    let rotated: Vec<&[u32]> = (0..tau)
        .map(|i| ring[(i + tau - shift) % tau].as_slice())
        .collect();

    let points_raw = periodic_points_from_counts(net, &rotated);

    // verification: the candidate must reproduce its own symbol cycle...
    let mut symbol_cycle = Vec::with_capacity(tau);
    let mut theta = vec![0u8; net.graph().arrow_count()];
    let mut point_counts = vec![0u32; n];
    for (i, p) in points_raw.iter().enumerate() {
        net.fill_symbols(p, Some(&mut theta), &mut point_counts);
        if point_counts != rotated[i] {
            return Err(format!(
                "analytic candidate fails symbol verification at phase {i} (period {tau})"
            ));
        }
        symbol_cycle.push(SymbolState {
            theta: theta.clone(),
            counts: point_counts.clone(),
        });
    }

    // ...close up under one more step...
    let wrap_tol = verification_step_tol::<S>();
    let mut wrap = vec![S::zero(); n];
    net.step_from_counts(&points_raw[tau - 1], rotated[tau - 1], &mut wrap);
    let wrap_gap = crate::dynamics::d_max(&wrap, &points_raw[0]);
    if wrap_gap > wrap_tol {
        return Err(format!(
            "candidate cycle does not close up (gap {:e})",
            wrap_gap.as_f64()
        ));
    }

    // ...and keep a margin above tolerance
    let margin = points_raw
        .iter()
        .map(|p| net.distance_to_discontinuity_raw(p))
        .fold(S::infinity(), S::min);
    let margin_ok = margin > opts.verify_tol;
    if !margin_ok {
        return Err(format!(
            "attractor margin {:e} at or below tolerance",
            margin.as_f64()
        ));
    }

    // minimality holds on symbols by construction; assert it on the points
    if cfg!(debug_assertions) {
        for q in prime_factors(tau) {
            let d = tau / q;
            let distinct = (0..tau).any(|i| {
                crate::dynamics::d_max(&points_raw[i], &points_raw[(i + d) % tau]) > wrap_tol
            });
            debug_assert!(distinct, "period {tau} reducible by {q}");
        }
    }

    let points = points_raw
        .into_iter()
        .map(|values| ActivityVector::new(values).expect("periodic points lie in [0,1]"))
        .collect();

    Ok(Attractor {
        transient_steps: t0,
        period: tau,
        points,
        margin,
        symbol_cycle,
    })
}

/// Which notion of connectedness `component_count` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentRule {
    /// Components of the underlying undirected graph.
    #[default]
    Weak,
    /// Strongly connected components carrying at least one arrow, i.e.
    /// maximal sets of vertices sharing directed cycles.
    Cycle,
}

/// The subnetwork where the attractor's oscillations live, plus the
/// indicators derived from it.
#[derive(Debug, Clone)]
pub struct OscillatorySubnetwork {
    pub subnetwork: Subnetwork,
    pub size: usize,
    pub component_count: usize,
    /// In-degree (within the subnetwork) -> fraction of oscillatory
    /// vertices; sums to 1 when the subnetwork is nonempty.
    pub degree_distribution: BTreeMap<usize, f64>,
}

/// Arrows whose activation bit is non-constant across the verified cycle,
/// together with their endpoints.
pub fn oscillatory_subnetwork<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    report: &AttractorReport<S>,
) -> Result<OscillatorySubnetwork> {
    oscillatory_subnetwork_with_rule(net, report, ComponentRule::Weak)
}

pub fn oscillatory_subnetwork_with_rule<S: Scalar>(
    net: &RegulatoryNetwork<S>,
    report: &AttractorReport<S>,
    rule: ComponentRule,
) -> Result<OscillatorySubnetwork> {
    let attractor = report
        .attractor()
        .ok_or_else(|| Error::domain("oscillatory subnetwork needs a converged report"))?;
    let cycle = &attractor.symbol_cycle;
    let arrows: Vec<_> = net
        .graph()
        .arrows()
        .iter()
        .enumerate()
        .filter(|&(i, _)| cycle.iter().any(|s| s.theta[i] != cycle[0].theta[i]))
        .map(|(_, &a)| a)
        .collect();
    let subnetwork = net.graph().induced_subnetwork(&arrows)?;
    Ok(indicators_for(subnetwork, rule))
}

pub(crate) fn indicators_for(subnetwork: Subnetwork, rule: ComponentRule) -> OscillatorySubnetwork {
    let size = subnetwork.vertices().len();
    let component_count = if subnetwork.is_empty() {
        0
    } else {
        let (dense, _) = subnetwork.to_dense();
        match rule {
            ComponentRule::Weak => dense.weak_components().len(),
            ComponentRule::Cycle => dense.cycle_component_count(),
        }
    };
    let mut in_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in subnetwork.vertices() {
        *in_counts.entry(subnetwork.in_degree(v)).or_default() += 1;
    }
    let degree_distribution = in_counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / size as f64))
        .collect();
    OscillatorySubnetwork {
        subnetwork,
        size,
        component_count,
        degree_distribution,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use crate::ensembles::{SignAssignment, ThresholdAssignment};
    use approx::assert_abs_diff_eq;

    fn negative_self_loop(a: f64, t: f64) -> RegulatoryNetwork<f64> {
        let g = Digraph::new(1, vec![(0, 0)]).unwrap();
        RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![-1]).unwrap(),
            ThresholdAssignment::new(vec![t]).unwrap(),
            a,
        )
        .unwrap()
    }

    #[test]
    fn periodic_point_constant_symbols() {
        // constant full activation: fixed point at 1; constant zero: at 0
        let g = Digraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        let net = RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![1, 1]).unwrap(),
            ThresholdAssignment::new(vec![0.5, 0.5]).unwrap(),
            0.37,
        )
        .unwrap();
        for tau in [1usize, 3] {
            let on = SymbolState {
                theta: vec![1, 1],
                counts: vec![1, 1],
            };
            let cycle: Vec<_> = (0..tau).map(|_| on.clone()).collect();
            let points = periodic_point_from_symbols(&net, &cycle).unwrap();
            for p in &points {
                assert_abs_diff_eq!(p.get(0), 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(p.get(1), 1.0, epsilon = 1e-12);
            }
            let off = SymbolState {
                theta: vec![0, 0],
                counts: vec![0, 0],
            };
            let cycle: Vec<_> = (0..tau).map(|_| off.clone()).collect();
            for p in periodic_point_from_symbols(&net, &cycle).unwrap() {
                assert_eq!(p.get(0), 0.0);
                assert_eq!(p.get(1), 0.0);
            }
        }
    }

    #[test]
    fn periodic_point_negative_loop_period_two() {
        let net = negative_self_loop(0.2, 0.5);
        let cycle = vec![
            SymbolState {
                theta: vec![1],
                counts: vec![1],
            },
            SymbolState {
                theta: vec![0],
                counts: vec![0],
            },
        ];
        let points = periodic_point_from_symbols(&net, &cycle).unwrap();
        assert_abs_diff_eq!(points[0].get(0), 1.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(points[1].get(0), 5.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn detect_negative_loop_attractor() {
        let net = negative_self_loop(0.2, 0.5);
        let x0 = ActivityVector::new(vec![0.9]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let a = report.attractor().expect("converges");
        assert_eq!(a.period, 2);
        let mut pts: Vec<f64> = a.points.iter().map(|p| p.get(0)).collect();
        pts.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(pts[0], 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pts[1], 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.margin, 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(asymptotic_period(&report), Some(2));
    }

    #[test]
    fn detect_positive_loop_fixed_point() {
        let g = Digraph::new(1, vec![(0, 0)]).unwrap();
        let net = RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![1]).unwrap(),
            ThresholdAssignment::new(vec![0.5]).unwrap(),
            0.5,
        )
        .unwrap();
        let x0 = ActivityVector::new(vec![0.9]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let a = report.attractor().expect("converges");
        assert_eq!(a.period, 1);
        assert_abs_diff_eq!(a.points[0].get(0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn detect_from_a_fixed_point_has_zero_transient() {
        // arrowless vertex decays to 0; starting at 0 is already periodic
        let net: RegulatoryNetwork<f64> = RegulatoryNetwork::new(
            Digraph::empty(1),
            SignAssignment::new(vec![]).unwrap(),
            ThresholdAssignment::new(vec![]).unwrap(),
            0.7,
        )
        .unwrap();
        let x0 = ActivityVector::new(vec![0.0]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let a = report.attractor().expect("converges");
        assert_eq!(a.period, 1);
        assert_eq!(a.transient_steps, 0);
        assert!(a.margin.is_infinite());
    }

    #[test]
    fn minimality_reduces_composite_candidates() {
        // a period-2 cycle found via a hash match at distance 4 still
        // reports tau = 2
        let net = negative_self_loop(0.3, 0.5);
        let x0 = ActivityVector::new(vec![0.77]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        assert_eq!(asymptotic_period(&report), Some(2));
    }

    #[test]
    fn oscillatory_subnetwork_of_fixed_point_is_empty() {
        let g = Digraph::new(1, vec![(0, 0)]).unwrap();
        let net = RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![1]).unwrap(),
            ThresholdAssignment::new(vec![0.5]).unwrap(),
            0.5,
        )
        .unwrap();
        let x0 = ActivityVector::new(vec![0.9]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let osc = oscillatory_subnetwork(&net, &report).unwrap();
        assert_eq!(osc.size, 0);
        assert_eq!(osc.component_count, 0);
        assert!(osc.degree_distribution.is_empty());
    }

    #[test]
    fn oscillatory_subnetwork_of_negative_loop() {
        let net = negative_self_loop(0.2, 0.5);
        let x0 = ActivityVector::new(vec![0.9]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let osc = oscillatory_subnetwork(&net, &report).unwrap();
        assert_eq!(osc.subnetwork.arrows(), &[(0, 0)]);
        assert_eq!(osc.size, 1);
        assert_eq!(osc.component_count, 1);
        assert_eq!(osc.degree_distribution.get(&1), Some(&1.0));
    }

    #[test]
    fn oscillation_confined_to_the_oscillator() {
        // negative self-loop at vertex 0, plus a chain 0 -> 1 -> 2 with
        // thresholds the oscillation never crosses: the chain converges and
        // stays out of the oscillatory subnetwork
        let g = Digraph::new(3, vec![(0, 0), (0, 1), (1, 2)]).unwrap();
        let net = RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![-1, 1, 1]).unwrap(),
            // at a = 0.2 the loop oscillates in {1/6, 5/6}; threshold 0.95
            // on (0,1) stays above it
            ThresholdAssignment::new(vec![0.5, 0.95, 0.5]).unwrap(),
            0.2,
        )
        .unwrap();
        let x0 = ActivityVector::new(vec![0.9, 0.3, 0.7]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let a = report.attractor().expect("converges");
        assert_eq!(a.period, 2);
        let osc = oscillatory_subnetwork(&net, &report).unwrap();
        assert_eq!(osc.subnetwork.arrows(), &[(0, 0)]);
        assert_eq!(osc.subnetwork.vertices(), &[0]);
    }

    #[test]
    fn unresolved_when_margin_too_small() {
        // fixed point lands exactly on the threshold: x* = 1 with T = 1 is
        // avoided by [0,1) thresholds, so force it by hand
        let g = Digraph::new(1, vec![(0, 0)]).unwrap();
        let net = RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![1]).unwrap(),
            ThresholdAssignment::new(vec![1.0]).unwrap(),
            0.5,
        )
        .unwrap();
        // H(1-1) = 1, so x -> 1 is a fixed point sitting on the threshold
        let x0 = ActivityVector::new(vec![1.0]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        assert!(report.unresolved(), "outcome: {:?}", report.outcome);
    }

    #[test]
    fn exhausted_when_budget_is_tiny() {
        let net = negative_self_loop(0.2, 0.5);
        let x0 = ActivityVector::new(vec![0.9]).unwrap();
        let opts = DetectOptions {
            max_steps: 2,
            ..DetectOptions::default()
        };
        let report = detect_attractor(&net, &x0, &opts).unwrap();
        assert!(matches!(report.outcome, Outcome::Exhausted));
    }

    #[test]
    fn detection_works_in_f32() {
        let g = Digraph::new(1, vec![(0, 0)]).unwrap();
        let net: RegulatoryNetwork<f32> = RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![-1]).unwrap(),
            ThresholdAssignment::new(vec![0.5f32]).unwrap(),
            0.2f32,
        )
        .unwrap();
        let x0 = ActivityVector::new(vec![0.9f32]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let a = report.attractor().expect("converges in f32");
        assert_eq!(a.period, 2);
        assert!((a.margin - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn long_periods_are_detected_and_minimal() {
        // slow contraction on a small dense graph: hunt for a long cycle
        // and cross-check it against the brute-force orbit
        let seed = crate::ensembles::EnsembleSeed::new(77);
        let mut best = 0usize;
        for i in 0..120u64 {
            let mut rng = seed.graph_stream(i);
            let graph =
                crate::ensembles::sample_erdos_renyi(6, 0.5, true, &mut rng).unwrap();
            let signs = crate::ensembles::sample_signs(graph.arrows(), 0.5, &mut rng).unwrap();
            let thresholds: ThresholdAssignment<f64> =
                crate::ensembles::sample_thresholds(graph.arrows(), &mut rng);
            let net = RegulatoryNetwork::new(graph, signs, thresholds, 0.85).unwrap();
            let x0: ActivityVector<f64> =
                crate::ensembles::sample_initial(6, &mut seed.orbit_stream(i, 0));
            let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
            let Some(a) = report.attractor() else { continue };
            best = best.max(a.period);
            // the simulated orbit must land on the phase-aligned cycle
            let extra = 320usize; // 0.85^320 ~ 5e-23
            let mut x = x0.clone();
            for _ in 0..a.transient_steps + extra {
                x = net.step(&x).unwrap();
            }
            let gap = x.d_max(&a.points[extra % a.period]);
            assert!(gap <= 1e-12, "instance {i}: tau {} gap {gap:e}", a.period);
        }
        assert!(best >= 50, "expected a long cycle in the sweep, best {best}");
    }

    #[test]
    fn oracle_orbit_shadows_analytic_points() {
        // brute-force simulation approaches the cyclically indexed analytic
        // points at rate a^N
        let net = negative_self_loop(0.35, 0.4);
        let x0 = ActivityVector::new(vec![0.81]).unwrap();
        let report = detect_attractor(&net, &x0, &DetectOptions::default()).unwrap();
        let a = report.attractor().unwrap();
        let n_extra = (1e-10f64.ln() / 0.35f64.ln()).ceil() as usize;
        let mut x = x0.clone();
        for _ in 0..a.transient_steps + n_extra {
            x = net.step(&x).unwrap();
        }
        let expect = &a.points[n_extra % a.period];
        assert!(x.d_max(expect) <= 0.35f64.powi(n_extra as i32) + 1e-12);
    }
}
