//! Contrastive causal discovery from two observational regimes that share a
//! DAG but differ by soft interventions at unknown targets.
//!
//! The library is organized around a desk-scale pipeline:
//!
//! - [`graph`] — DAGs, PDAGs, d-separation, CPDAGs, Meek closure, metrics.
//! - [`synth`] — ground-truth graphs, two-regime SCMs, and sampled datasets.
//! - [`sampler`] — contrast-aware greedy sampling of node subsets.
//! - [`discovery`] — per-regime local PDAG estimation via a PolyBIC
//!   bootstrap-voting ensemble.
//! - [`invariance`] — cross-regime conditional-invariance tests and witness
//!   admissibility.
//! - [`rules`] — the SSI / CVT / DPT contrastive orientation rules.
//! - [`aggregate`] — candidate catalogs, knowledge sets, conflict resolution,
//!   and Meek-closure aggregation into the final maximal PDAG.
//! - [`oracle`] — exhaustive small-graph enumeration of the restricted
//!   equivalence class and its essential-graph estimands, used to verify the
//!   soundness, enrichment, separation, and consistency claims mechanically.
//! - [`pipeline`], [`config`], [`fileio`] — end-to-end orchestration, run
//!   configuration, and the text file formats.

pub mod aggregate;
pub mod config;
pub mod discovery;
pub mod error;
pub mod fileio;
pub mod graph;
pub mod invariance;
pub mod oracle;
pub mod pipeline;
pub mod rules;
pub mod sampler;
pub mod seed;
pub mod stats;
pub mod synth;

pub use error::Error;
pub use graph::{AugmentedDag, Dag, EvalReport, Pdag};
pub use synth::TwoRegimeDataset;
