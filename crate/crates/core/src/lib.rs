//! Simulation and verification toolkit for discrete-time regulatory
//! networks on random digraphs.
//!
//! A regulatory network couples units with activities in [0,1] through
//! signed, thresholded arrows; each step applies the affine contraction
//! `x'_v = a x_v + (1-a) k_v / Id(v)` where `k_v` counts the active
//! inputs. The crate provides:
//!
//! - [`digraph`]: the graph substrate (components, bipartiteness,
//!   subnetworks);
//! - [`ensembles`]: seeded, substream-deterministic samplers for graphs
//!   (Erdős–Rényi, Barabási–Albert, scale-free trees), signs, thresholds
//!   and initial conditions;
//! - [`dynamics`]: the piecewise-affine kernel and its symbol states;
//! - [`attractor`]: analytic periodic-attractor detection with verified
//!   margins, and oscillatory-subnetwork indicators;
//! - [`modularity`]: embeddings that run an oscillatory subnetwork as an
//!   independent module, with exact affine conjugacies and the
//!   least-common-multiple period law for disjoint modules;
//! - [`symmetry`]: the inhibition/activation parity conjugacy on
//!   odd-cycle-free digraphs and paired-ensemble comparisons;
//! - [`harness`]: the parallel grid experiment runner with byte-stable
//!   CSV/JSON outputs;
//! - [`io`]: replayable instance files and report formats.
//!
//! The continuous kernels are generic over the floating-point [`Scalar`];
//! the aliases below pin the common concrete choices.

pub mod attractor;
pub mod digraph;
pub mod dynamics;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod io;
pub mod modularity;
pub mod scalar;
pub mod symmetry;

pub use attractor::{
    asymptotic_period, detect_attractor, oscillatory_subnetwork, periodic_point_from_symbols,
    Attractor, AttractorReport, ComponentRule, DetectOptions, OscillatorySubnetwork, Outcome,
};
pub use digraph::{Arrow, Bipartition, Digraph, Subnetwork, Vertex};
pub use dynamics::{heaviside, ActivityVector, RegulatoryNetwork, SymbolState};
pub use ensembles::{
    sample_barabasi_albert, sample_erdos_renyi, sample_initial, sample_scale_free_tree,
    sample_signs, sample_thresholds, EnsembleSeed, GraphModel, SignAssignment,
    ThresholdAssignment,
};
pub use error::{Error, Result};
pub use harness::{emit_grid, run_ensemble, CellKey, CellStatistics, EnsembleSpec};
pub use modularity::{
    build_embedding, conjugacy_defect, lcm_period_check, stability_rect, ModuleEmbedding,
    Rectangles,
};
pub use scalar::Scalar;
pub use symmetry::{
    build_parity_transform, paired_ensemble_symmetry, sign_flip_conjugacy_defect, ParityTransform,
    SymmetryReport, SymmetrySpec,
};

pub type ActivityVector64 = dynamics::ActivityVector<f64>;
pub type ActivityVector32 = dynamics::ActivityVector<f32>;
pub type RegulatoryNetwork64 = dynamics::RegulatoryNetwork<f64>;
pub type RegulatoryNetwork32 = dynamics::RegulatoryNetwork<f32>;
pub type ThresholdAssignment64 = ensembles::ThresholdAssignment<f64>;
pub type ThresholdAssignment32 = ensembles::ThresholdAssignment<f32>;
pub type AttractorReport64 = attractor::AttractorReport<f64>;
pub type AttractorReport32 = attractor::AttractorReport<f32>;
pub type DetectOptions64 = attractor::DetectOptions<f64>;
pub type ModuleEmbedding64 = modularity::ModuleEmbedding<f64>;
