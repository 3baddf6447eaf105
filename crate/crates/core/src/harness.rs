//! Ensemble experiment runner: samples a grid of (a, eta) cells for a
//! fixed graph model, runs many orbits per cell, aggregates indicator
//! statistics and emits byte-stable CSV/JSON grids.
//!
//! Work is parallelised over sampled graphs; every work item derives its
//! own random substream from the root seed, so outputs are a pure function
//! of (spec, root seed) regardless of worker count or scheduling.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attractor::{
    detect_attractor, oscillatory_subnetwork_with_rule, ComponentRule, DetectOptions, Outcome,
};
use crate::dynamics::{ActivityVector, RegulatoryNetwork};
use crate::ensembles::{
    sample_initial, sample_signs, sample_thresholds, EnsembleSeed, GraphModel,
    ThresholdAssignment,
};
use crate::error::{Error, Result};
use crate::io::fmt_float;

fn default_max_steps() -> usize {
    100_000
}

/// A grid experiment: one graph model, grids over the contraction rate and
/// the inhibition probability, with per-cell replication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub graph_model: GraphModel,
    pub n_vertices: usize,
    pub a_grid: Vec<f64>,
    pub eta_grid: Vec<f64>,
    pub graphs_per_cell: usize,
    pub orbits_per_graph: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    pub root_seed: u64,
    #[serde(default)]
    pub component_rule: ComponentRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.a_grid.is_empty() || self.eta_grid.is_empty() {
            return Err(Error::domain("a_grid and eta_grid must be nonempty"));
        }
        if self.a_grid.iter().any(|&a| !(0.0..1.0).contains(&a)) {
            return Err(Error::domain("every a must lie in [0,1)"));
        }
        if self.eta_grid.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
            return Err(Error::domain("every eta must lie in [0,1]"));
        }
        if self.graphs_per_cell == 0 || self.orbits_per_graph == 0 {
            return Err(Error::domain("replication counts must be positive"));
        }
        self.graph_model.validate(self.n_vertices)?;
        Ok(())
    }

    fn cells(&self) -> Vec<(f64, f64)> {
        let mut cells = Vec::new();
        for &a in &self.a_grid {
            for &eta in &self.eta_grid {
                cells.push((a, eta));
            }
        }
        cells
    }
}

/// Identifies one cell of the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellKey {
    pub model: GraphModel,
    pub n_vertices: usize,
    pub a: f64,
    pub eta: f64,
}

/// Aggregated per-cell statistics. All fields are exact integer counts or
/// sums, so merging is associative and commutative and emitted files do
/// not depend on aggregation order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellStatistics {
    pub key: CellKey,
    pub n_orbits: u64,
    pub n_converged: u64,
    pub n_unresolved: u64,
    pub n_exhausted: u64,
    /// minimal period -> orbit count (converged orbits only)
    pub period_histogram: BTreeMap<usize, u64>,
    pub osc_size_sum: u64,
    pub component_count_sum: u64,
    pub transient_sum: u64,
    /// pooled in-degree counts over oscillatory-subnetwork vertices
    pub degree_pool: BTreeMap<usize, u64>,
}

impl CellStatistics {
    fn empty(key: CellKey) -> Self {
        CellStatistics {
            key,
            n_orbits: 0,
            n_converged: 0,
            n_unresolved: 0,
            n_exhausted: 0,
            period_histogram: BTreeMap::new(),
            osc_size_sum: 0,
            component_count_sum: 0,
            transient_sum: 0,
            degree_pool: BTreeMap::new(),
        }
    }

    pub fn merge(&mut self, other: &CellStatistics) {
        self.n_orbits += other.n_orbits;
        self.n_converged += other.n_converged;
        self.n_unresolved += other.n_unresolved;
        self.n_exhausted += other.n_exhausted;
        for (&tau, &c) in &other.period_histogram {
            *self.period_histogram.entry(tau).or_insert(0) += c;
        }
        self.osc_size_sum += other.osc_size_sum;
        self.component_count_sum += other.component_count_sum;
        self.transient_sum += other.transient_sum;
        for (&k, &c) in &other.degree_pool {
            *self.degree_pool.entry(k).or_insert(0) += c;
        }
    }

    pub fn mean_osc_size(&self) -> Option<f64> {
        (self.n_converged > 0).then(|| self.osc_size_sum as f64 / self.n_converged as f64)
    }

    pub fn mean_component_count(&self) -> Option<f64> {
        (self.n_converged > 0).then(|| self.component_count_sum as f64 / self.n_converged as f64)
    }

    pub fn mean_transient(&self) -> Option<f64> {
        (self.n_converged > 0).then(|| self.transient_sum as f64 / self.n_converged as f64)
    }
}

fn run_graph_orbits(
    spec: &EnsembleSpec,
    key: &CellKey,
    graph_index: u64,
) -> Result<CellStatistics> {
    let seed = EnsembleSeed::new(spec.root_seed);
    let mut graph_rng = seed.graph_stream(graph_index);
    let graph = spec.graph_model.sample(spec.n_vertices, &mut graph_rng)?;
    let signs = sample_signs(graph.arrows(), key.eta, &mut graph_rng)?;
    let thresholds: ThresholdAssignment<f64> = sample_thresholds(graph.arrows(), &mut graph_rng);
    let net = RegulatoryNetwork::new(graph, signs, thresholds, key.a)?;
    let opts = DetectOptions::with_max_steps(spec.max_steps);

    let mut stats = CellStatistics::empty(key.clone());
    for j in 0..spec.orbits_per_graph as u64 {
        let x0: ActivityVector<f64> =
            sample_initial(spec.n_vertices, &mut seed.orbit_stream(graph_index, j));
        let report = detect_attractor(&net, &x0, &opts)?;
        stats.n_orbits += 1;
        match &report.outcome {
            Outcome::Converged(a) => {
                stats.n_converged += 1;
                *stats.period_histogram.entry(a.period).or_insert(0) += 1;
                stats.transient_sum += a.transient_steps as u64;
                let osc = oscillatory_subnetwork_with_rule(&net, &report, spec.component_rule)?;
                stats.osc_size_sum += osc.size as u64;
                stats.component_count_sum += osc.component_count as u64;
                for &v in osc.subnetwork.vertices() {
                    *stats
                        .degree_pool
                        .entry(osc.subnetwork.in_degree(v))
                        .or_insert(0) += 1;
                }
            }
            Outcome::Unresolved { .. } => stats.n_unresolved += 1,
            Outcome::Exhausted => stats.n_exhausted += 1,
        }
    }
    Ok(stats)
}

/// Runs the whole grid. `threads` bounds the worker pool (`None` uses the
/// global default); results are identical for any choice.
///
/// The per-cell graph/sign/threshold bundles and initial conditions are
/// keyed by the eta index only, so the whole a-grid reruns the same
/// sampled instances at different contraction rates (the sweep protocol
/// the indicator trends are defined over).
pub fn run_ensemble(spec: &EnsembleSpec, threads: Option<usize>) -> Result<Vec<CellStatistics>> {
    spec.validate()?;
    let run = || -> Result<Vec<CellStatistics>> {
        let cells = spec.cells();
        let n_eta = spec.eta_grid.len();
        let items: Vec<(usize, u64)> = (0..cells.len())
            .flat_map(|c| {
                let eta_idx = c % n_eta;
                (0..spec.graphs_per_cell as u64)
                    .map(move |g| (c, eta_idx as u64 * spec.graphs_per_cell as u64 + g))
            })
            .collect();
        let partials: Vec<(usize, CellStatistics)> = items
            .into_par_iter()
            .map(|(cell_idx, graph_index)| {
                let (a, eta) = cells[cell_idx];
                let key = CellKey {
                    model: spec.graph_model,
                    n_vertices: spec.n_vertices,
                    a,
                    eta,
                };
                run_graph_orbits(spec, &key, graph_index).map(|s| (cell_idx, s))
            })
            .collect::<Result<_>>()?;

        let mut out: Vec<CellStatistics> = cells
            .iter()
            .map(|&(a, eta)| {
                CellStatistics::empty(CellKey {
                    model: spec.graph_model,
                    n_vertices: spec.n_vertices,
                    a,
                    eta,
                })
            })
            .collect();
        for (cell_idx, partial) in &partials {
            out[*cell_idx].merge(partial);
        }
        Ok(out)
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::construction(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Long-format grid CSV: one row per (cell, period); cells with no
/// converged orbit keep a single row with an empty period column.
pub fn grid_csv(stats: &[CellStatistics]) -> String {
    let mut out = String::from("model,p_or_m,a,eta,tau,count,n_converged,mean_osc_size,mean_nc\n");
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for cell in stats {
        let prefix = format!(
            "{},{},{},{}",
            cell.key.model.name(),
            fmt_float(cell.key.model.p_or_m()),
            fmt_float(cell.key.a),
            fmt_float(cell.key.eta),
        );
        let suffix = format!(
            "{},{},{}",
            cell.n_converged,
            opt(cell.mean_osc_size()),
            opt(cell.mean_component_count()),
        );
        if cell.period_histogram.is_empty() {
            out.push_str(&format!("{prefix},,0,{suffix}\n"));
        } else {
            for (&tau, &count) in &cell.period_histogram {
                out.push_str(&format!("{prefix},{tau},{count},{suffix}\n"));
            }
        }
    }
    out
}

/// Writes `grid.csv` and `grid.json` under `dir`; returns their paths.
pub fn emit_grid(stats: &[CellStatistics], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("grid.csv");
    fs::write(&csv_path, grid_csv(stats))?;
    let json_path = dir.join("grid.json");
    crate::io::write_json(&json_path, &stats)?;
    Ok((csv_path, json_path))
}

/// Writes the raw cell statistics (`stats.json`) for later `emit-grid`
/// invocations.
pub fn write_stats(stats: &[CellStatistics], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("stats.json");
    crate::io::write_json(&path, &stats)?;
    Ok(path)
}

pub fn read_stats(path: &Path) -> Result<Vec<CellStatistics>> {
    crate::io::read_json(path)
}
