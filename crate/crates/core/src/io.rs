//! File formats: the JSON graph exchange format, replayable instance
//! files, attractor report JSON and the orbit trace CSV. All formats are
//! byte-stable for a given input (sorted keys, canonical arrow order).
//!
//! Formats are pinned to f64; the generic kernels narrow on load if a
//! different scalar is wanted.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attractor::{oscillatory_subnetwork_with_rule, AttractorReport, ComponentRule, Outcome};
use crate::digraph::{Arrow, Digraph, Subnetwork, Vertex};
use crate::dynamics::{ActivityVector, RegulatoryNetwork};
use crate::ensembles::{SignAssignment, ThresholdAssignment};
use crate::error::{Error, Result};

/// `{"n": ..., "arrows": [[u,v], ...]}` with arrows in lexicographic order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDto {
    pub n: usize,
    pub arrows: Vec<Arrow>,
}

impl GraphDto {
    pub fn from_digraph(g: &Digraph) -> Self {
        GraphDto {
            n: g.vertex_count(),
            arrows: g.arrows().to_vec(),
        }
    }

    pub fn to_digraph(&self) -> Result<Digraph> {
        Digraph::new(self.n, self.arrows.clone())
    }
}

/// `{"vertices": [...], "arrows": [[u,v], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubnetworkDto {
    pub vertices: Vec<Vertex>,
    pub arrows: Vec<Arrow>,
}

impl SubnetworkDto {
    pub fn from_subnetwork(s: &Subnetwork) -> Self {
        SubnetworkDto {
            vertices: s.vertices().to_vec(),
            arrows: s.arrows().to_vec(),
        }
    }

    pub fn to_subnetwork(&self) -> Result<Subnetwork> {
        Subnetwork::new(self.vertices.clone(), self.arrows.clone())
    }
}

fn arrow_key((u, v): Arrow) -> String {
    format!("{u},{v}")
}

fn parse_arrow_key(key: &str) -> Result<Arrow> {
    let (u, v) = key
        .split_once(',')
        .ok_or_else(|| Error::domain(format!("bad arrow key {key:?}, expected \"u,v\"")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::domain(format!("bad arrow key {key:?}")))
    };
    Ok((parse(u)?, parse(v)?))
}

/// A replayable sampled instance: graph, contraction rate, per-arrow signs
/// and thresholds keyed by `"u,v"`, and optionally an initial condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDto {
    pub graph: GraphDto,
    pub a: f64,
    pub signs: BTreeMap<String, i8>,
    pub thresholds: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x0: Option<Vec<f64>>,
}

impl InstanceDto {
    pub fn from_network(net: &RegulatoryNetwork<f64>, x0: Option<&ActivityVector<f64>>) -> Self {
        let mut signs = BTreeMap::new();
        let mut thresholds = BTreeMap::new();
        for (i, &arrow) in net.graph().arrows().iter().enumerate() {
            signs.insert(arrow_key(arrow), net.signs().get(i));
            thresholds.insert(arrow_key(arrow), net.thresholds().get(i));
        }
        InstanceDto {
            graph: GraphDto::from_digraph(net.graph()),
            a: net.contraction(),
            signs,
            thresholds,
            x0: x0.map(|x| x.values().to_vec()),
        }
    }

    pub fn to_network(&self) -> Result<(RegulatoryNetwork<f64>, Option<ActivityVector<f64>>)> {
        let graph = self.graph.to_digraph()?;
        let mut signs = Vec::with_capacity(graph.arrow_count());
        let mut thresholds = Vec::with_capacity(graph.arrow_count());
        for &arrow in graph.arrows() {
            let key = arrow_key(arrow);
            signs.push(
                *self
                    .signs
                    .get(&key)
                    .ok_or_else(|| Error::domain(format!("missing sign for arrow {key}")))?,
            );
            thresholds.push(
                *self
                    .thresholds
                    .get(&key)
                    .ok_or_else(|| Error::domain(format!("missing threshold for arrow {key}")))?,
            );
        }
        for key in self.signs.keys().chain(self.thresholds.keys()) {
            let (u, v) = parse_arrow_key(key)?;
            if !graph.has_arrow(u, v) {
                return Err(Error::domain(format!(
                    "sign/threshold key {key} is not an arrow of the graph"
                )));
            }
        }
        let net = RegulatoryNetwork::new(
            graph,
            SignAssignment::new(signs)?,
            ThresholdAssignment::new(thresholds)?,
            self.a,
        )?;
        let x0 = match &self.x0 {
            Some(values) => {
                if values.len() != net.vertex_count() {
                    return Err(Error::domain("x0 length does not match the graph"));
                }
                Some(ActivityVector::new(values.clone())?)
            }
            None => None,
        };
        Ok((net, x0))
    }
}

/// Oscillatory subnetwork block of the report JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OscDto {
    pub vertices: Vec<Vertex>,
    pub arrows: Vec<Arrow>,
    pub nc: usize,
    pub degree_hist: BTreeMap<usize, f64>,
}

/// Attractor report JSON: `{converged, transient, period, margin, points,
/// osc, ...}`. `margin` is null when infinite (arrowless graphs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDto {
    pub converged: bool,
    pub steps_used: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transient: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub osc: Option<OscDto>,
}

impl ReportDto {
    pub fn from_report(
        net: &RegulatoryNetwork<f64>,
        report: &AttractorReport<f64>,
        rule: ComponentRule,
    ) -> Result<Self> {
        let mut dto = ReportDto {
            converged: report.converged(),
            steps_used: report.steps_used,
            reason: None,
            transient: None,
            period: None,
            margin: None,
            points: None,
            osc: None,
        };
        match &report.outcome {
            Outcome::Converged(a) => {
                dto.transient = Some(a.transient_steps);
                dto.period = Some(a.period);
                dto.margin = a.margin.is_finite().then_some(a.margin);
                dto.points = Some(a.points.iter().map(|p| p.values().to_vec()).collect());
                let osc = oscillatory_subnetwork_with_rule(net, report, rule)?;
                dto.osc = Some(OscDto {
                    vertices: osc.subnetwork.vertices().to_vec(),
                    arrows: osc.subnetwork.arrows().to_vec(),
                    nc: osc.component_count,
                    degree_hist: osc.degree_distribution,
                });
            }
            Outcome::Unresolved { reason } => dto.reason = Some(reason.clone()),
            Outcome::Exhausted => {}
        }
        Ok(dto)
    }
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_pretty_json(value))?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let data = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&data)?)
}

/// Orbit trace: CSV with columns `t,v,x_v` plus a sidecar instance JSON
/// (`<path>.instance.json`) for replay.
pub fn write_orbit_trace(
    net: &RegulatoryNetwork<f64>,
    x0: &ActivityVector<f64>,
    steps: usize,
    path: &Path,
) -> Result<()> {
    let mut out = String::from("t,v,x_v\n");
    let mut x = x0.clone();
    for t in 0..=steps {
        for v in 0..x.len() {
            out.push_str(&format!("{t},{v},{}\n", fmt_float(x.get(v))));
        }
        if t < steps {
            x = net.step(&x)?;
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    let sidecar = path.with_extension("instance.json");
    write_json(&sidecar, &InstanceDto::from_network(net, Some(x0)))?;
    Ok(())
}

/// Fixed float formatting with 12 significant digits, used everywhere a
/// float lands in a byte-stable file.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;

    fn sample_net() -> RegulatoryNetwork<f64> {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        RegulatoryNetwork::new(
            g,
            SignAssignment::new(vec![1, -1, 1]).unwrap(),
            ThresholdAssignment::new(vec![0.25, 0.5, 0.75]).unwrap(),
            0.3,
        )
        .unwrap()
    }

    #[test]
    fn instance_roundtrip() {
        let net = sample_net();
        let x0 = ActivityVector::new(vec![0.1, 0.2, 0.3]).unwrap();
        let dto = InstanceDto::from_network(&net, Some(&x0));
        let json = to_pretty_json(&dto);
        let back: InstanceDto = serde_json::from_str(&json).unwrap();
        let (net2, x02) = back.to_network().unwrap();
        assert_eq!(net2.graph().arrows(), net.graph().arrows());
        assert_eq!(net2.signs().values(), net.signs().values());
        assert_eq!(net2.thresholds().values(), net.thresholds().values());
        assert_eq!(x02.unwrap().values(), x0.values());
    }

    #[test]
    fn instance_with_missing_threshold_is_rejected() {
        let net = sample_net();
        let mut dto = InstanceDto::from_network(&net, None);
        dto.thresholds.remove("0,1");
        assert!(dto.to_network().is_err());
        let mut dto = InstanceDto::from_network(&net, None);
        dto.signs.insert("2,1".into(), 1);
        assert!(dto.to_network().is_err());
    }

    #[test]
    fn graph_dto_arrows_are_sorted() {
        let g = Digraph::new(3, vec![(2, 0), (0, 1), (1, 2)]).unwrap();
        let dto = GraphDto::from_digraph(&g);
        assert_eq!(dto.arrows, vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn report_of_arrowless_instance_has_null_margin() {
        let net: RegulatoryNetwork<f64> = RegulatoryNetwork::new(
            Digraph::empty(2),
            SignAssignment::new(vec![]).unwrap(),
            ThresholdAssignment::new(vec![]).unwrap(),
            0.5,
        )
        .unwrap();
        let x0 = ActivityVector::new(vec![0.4, 0.0]).unwrap();
        let report = crate::attractor::detect_attractor(
            &net,
            &x0,
            &crate::attractor::DetectOptions::default(),
        )
        .unwrap();
        let dto = ReportDto::from_report(&net, &report, ComponentRule::Weak).unwrap();
        let json = serde_json::to_value(&dto).unwrap();
        assert_eq!(json["converged"], true);
        assert_eq!(json["period"], 1);
        assert!(json["margin"].is_null());
    }

    #[test]
    fn fmt_float_is_stable() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(0.5), "5.00000000000e-1");
        assert_eq!(fmt_float(1.0 / 3.0), "3.33333333333e-1");
    }
}
