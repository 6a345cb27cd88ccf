//! Structural evaluation: SHD over the directed adjacency plus
//! precision/recall/F1 over directed-edge presence.

use crate::error::{Error, Result};

use super::{Dag, Pdag};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Edge additions + deletions + reversals; an undirected predicted edge
    /// against a directed true edge counts as one error.
    pub shd: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub predicted_directed: usize,
    pub truth_edges: usize,
}

fn f1_of(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Evaluate a PDAG prediction against a true DAG.
pub fn evaluate_pdag(pred: &Pdag, truth: &Dag) -> Result<EvalReport> {
    if pred.n() != truth.n() {
        return Err(Error::invalid(format!(
            "node count mismatch: pred={} truth={}",
            pred.n(),
            truth.n()
        )));
    }
    let mut shd = 0usize;
    let mut pairs = pred.skeleton();
    pairs.extend(truth.skeleton());
    for &(a, b) in &pairs {
        let in_pred = pred.adjacent(a, b);
        let in_truth = truth.adjacent(a, b);
        if in_pred != in_truth {
            shd += 1; // addition or deletion
            continue;
        }
        // Both have the pair: any orientation disagreement is one repair.
        let agree = if truth.has_edge(a, b) {
            pred.has_directed(a, b)
        } else {
            pred.has_directed(b, a)
        };
        if !agree {
            shd += 1;
        }
    }

    let tp = pred
        .directed()
        .iter()
        .filter(|&&(a, b)| truth.has_edge(a, b))
        .count();
    let npred = pred.directed().len();
    let ntruth = truth.edge_count();
    let precision = if npred == 0 { 0.0 } else { tp as f64 / npred as f64 };
    let recall = if ntruth == 0 { 0.0 } else { tp as f64 / ntruth as f64 };
    // Exact prediction of an empty graph scores perfect.
    let (precision, recall) = if npred == 0 && ntruth == 0 {
        (1.0, 1.0)
    } else {
        (precision, recall)
    };
    Ok(EvalReport {
        shd,
        precision,
        recall,
        f1: f1_of(precision, recall),
        true_positives: tp,
        predicted_directed: npred,
        truth_edges: ntruth,
    })
}

/// Evaluate a DAG prediction against a true DAG.
pub fn evaluate_dag(pred: &Dag, truth: &Dag) -> Result<EvalReport> {
    evaluate_pdag(&Pdag::from_dag(pred), truth)
}

/// Mean and sample standard deviation of per-graph metric values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_graphs_score_perfect() {
        let g = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let r = evaluate_dag(&g, &g).unwrap();
        assert_eq!(r.shd, 0);
        assert_eq!(r.f1, 1.0);
    }

    #[test]
    fn empty_prediction_counts_deletions() {
        let truth = Dag::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = evaluate_pdag(&Pdag::empty(4), &truth).unwrap();
        assert_eq!(r.shd, 3);
        assert_eq!(r.recall, 0.0);
        assert_eq!(r.f1, 0.0);
    }

    #[test]
    fn single_reversal_costs_one() {
        let truth = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let pred = Dag::new(3, [(1, 0), (1, 2)]).unwrap();
        let r = evaluate_dag(&pred, &truth).unwrap();
        assert_eq!(r.shd, 1);
    }

    #[test]
    fn undirected_against_directed_costs_one() {
        let truth = Dag::new(2, [(0, 1)]).unwrap();
        let pred = Pdag::new(2, [], [(0, 1)]).unwrap();
        let r = evaluate_pdag(&pred, &truth).unwrap();
        assert_eq!(r.shd, 1);
        // No directed predictions at all.
        assert_eq!(r.precision, 0.0);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let truth = Dag::new(3, []).unwrap();
        assert!(evaluate_pdag(&Pdag::empty(2), &truth).is_err());
    }
}
