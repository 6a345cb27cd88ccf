//! Synthetic ground truth: random DAGs, two-regime structural causal models
//! with soft interventions at unknown non-root targets, and sampled datasets.

mod mechanism;
mod scm;

pub use mechanism::{MechanismFamily, MechanismKind, MechanismSpec};
pub use scm::{build_scm, sample_dag, sample_targets, simulate, simulate_dataset, TwoRegimeScm};

use std::collections::BTreeSet;

use crate::graph::Dag;

/// Paired sample matrices for regimes 0 and 1 over the same variables.
///
/// Matrices are stored column-major as `columns[var][row]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRegimeDataset {
    pub n_vars: usize,
    pub samples0: Vec<Vec<f64>>,
    pub samples1: Vec<Vec<f64>>,
    /// Ground truth, when known: the generating DAG and the target set.
    pub truth: Option<(Dag, BTreeSet<usize>)>,
    /// Number of values clamped during simulation.
    pub clamped: u64,
}

impl TwoRegimeDataset {
    pub fn rows0(&self) -> usize {
        self.samples0.first().map_or(0, |c| c.len())
    }

    pub fn rows1(&self) -> usize {
        self.samples1.first().map_or(0, |c| c.len())
    }

    pub fn column(&self, regime: u8, var: usize) -> &[f64] {
        match regime {
            0 => &self.samples0[var],
            _ => &self.samples1[var],
        }
    }

    /// Rows of both regimes stacked, for pooled statistics.
    pub fn pooled_column(&self, var: usize) -> Vec<f64> {
        let mut out = self.samples0[var].clone();
        out.extend_from_slice(&self.samples1[var]);
        out
    }

    pub fn all_finite(&self) -> bool {
        self.samples0
            .iter()
            .chain(self.samples1.iter())
            .all(|c| c.iter().all(|v| v.is_finite()))
    }
}
