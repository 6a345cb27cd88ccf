//! Per-regime, per-subset PDAG estimation: a PolyBIC bootstrap voting
//! ensemble over the four edge classes {i->j, j->i, i-j, no-edge}.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Pdag;
use crate::stats;
use crate::synth::TwoRegimeDataset;

/// Edge class for an unordered pair `(i, j)` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// `i -> j`
    Forward,
    /// `j -> i`
    Backward,
    Undirected,
    NoEdge,
}

impl EdgeClass {
    pub const ALL: [EdgeClass; 4] = [
        EdgeClass::Forward,
        EdgeClass::Backward,
        EdgeClass::Undirected,
        EdgeClass::NoEdge,
    ];

    fn index(self) -> usize {
        match self {
            EdgeClass::Forward => 0,
            EdgeClass::Backward => 1,
            EdgeClass::Undirected => 2,
            EdgeClass::NoEdge => 3,
        }
    }
}

/// Pairwise orientation confidences over a subset; entry `(i, j)` estimates
/// the confidence for `i -> j` (subset-local indices, zero diagonal).
#[derive(Debug, Clone)]
pub struct ScoreMatrix {
    pub values: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn k(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryConfig {
    /// Bootstrap replicates per regime.
    pub r_boot: usize,
    /// Polynomial degree of the pairwise regressions.
    pub degree: usize,
    /// Tie-breaking margin of the vote decoder.
    pub epsilon: f64,
    /// Confidence threshold of the vote decoder.
    pub tau: f64,
    pub ridge: f64,
    /// Multiplier on the batch-mean-absolute-difference denominator.
    pub temperature: f64,
    /// Rows per bootstrap replicate; 0 means all rows.
    pub boot_size: usize,
    /// Weight of the single PolyBIC learner.
    pub learner_weight: f64,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            r_boot: 10,
            degree: 2,
            epsilon: 0.05,
            tau: 0.55,
            ridge: 1e-3,
            temperature: 1.0,
            boot_size: 2048,
            learner_weight: 1.0,
        }
    }
}

/// Local PDAGs for one subset in both regimes, with the vote tallies that
/// produced them. PDAGs keep global node indices.
#[derive(Debug, Clone)]
pub struct LocalPdagPair {
    pub subset: Vec<usize>,
    pub pdag0: Pdag,
    pub pdag1: Pdag,
    /// `tallies[regime][pair-index][class]`, pairs in lexicographic
    /// subset-local order.
    pub tallies: [Vec<[f64; 4]>; 2],
}

impl LocalPdagPair {
    pub fn pdag(&self, regime: u8) -> &Pdag {
        if regime == 0 {
            &self.pdag0
        } else {
            &self.pdag1
        }
    }

    /// Subset-local pair index for global nodes `(a, b)`.
    pub fn pair_index(&self, a: usize, b: usize) -> Option<usize> {
        let ia = self.subset.iter().position(|&v| v == a)?;
        let ib = self.subset.iter().position(|&v| v == b)?;
        let (lo, hi) = if ia < ib { (ia, ib) } else { (ib, ia) };
        let k = self.subset.len();
        // Lexicographic rank of (lo, hi) among pairs of 0..k.
        Some(lo * k - lo * (lo + 1) / 2 + (hi - lo - 1))
    }
}

/// BIC of a polynomial ridge regression of `y` on the columns of `x`.
///
/// `m log(RSS/m) + p_eff log(m)` with `p_eff` the feature count including
/// the intercept.
pub fn bic_fit(y: &[f64], x: &[&[f64]], degree: usize, ridge: f64) -> Result<f64> {
    let m = y.len();
    if x.iter().any(|c| c.len() != m) {
        return Err(Error::invalid("column lengths differ from response"));
    }
    if m < degree + 2 {
        return Err(Error::degenerate(format!(
            "need at least degree+2={} rows, got {m}",
            degree + 2
        )));
    }
    let phi = stats::polynomial_features(x, m, degree);
    let fit = stats::ridge_fit(&phi, y, ridge)?;
    let rss = fit.rss.max(1e-300);
    Ok(m as f64 * (rss / m as f64).ln() + fit.params as f64 * (m as f64).ln())
}

/// Pairwise orientation scores: `A[i,j] = sigmoid(dBIC(i,j) / denom)` with
/// `dBIC(i,j) = BIC(X_i|X_j) - BIC(X_j|X_i)` and `denom` the mean absolute
/// `dBIC` over unordered pairs (floored at 1e-8, scaled by `temperature`).
pub fn polybic_scores(
    columns: &[Vec<f64>],
    degree: usize,
    temperature: f64,
    ridge: f64,
) -> Result<ScoreMatrix> {
    let k = columns.len();
    if k < 2 {
        return Err(Error::invalid("need at least two columns"));
    }
    let mut diff = vec![vec![0.0f64; k]; k];
    let mut abs_sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..k {
        for j in (i + 1)..k {
            let bic_i_given_j = bic_fit(&columns[i], &[&columns[j]], degree, ridge)?;
            let bic_j_given_i = bic_fit(&columns[j], &[&columns[i]], degree, ridge)?;
            let d = bic_i_given_j - bic_j_given_i;
            diff[i][j] = d;
            diff[j][i] = -d;
            abs_sum += d.abs();
            pairs += 1;
        }
    }
    let denom = (temperature * abs_sum / pairs as f64).max(1e-8);
    let mut values = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                values[i][j] = stats::sigmoid(diff[i][j] / denom);
            }
        }
    }
    Ok(ScoreMatrix { values })
}

/// Four-case decoder for one unordered pair `(i, j)`, `i < j`.
pub fn decode_pair(a_ij: f64, a_ji: f64, epsilon: f64, tau: f64) -> EdgeClass {
    let max = a_ij.max(a_ji);
    if max < tau {
        return EdgeClass::NoEdge;
    }
    if a_ij - a_ji > epsilon {
        EdgeClass::Forward
    } else if a_ji - a_ij > epsilon {
        EdgeClass::Backward
    } else {
        EdgeClass::Undirected
    }
}

/// Decode a full score matrix into per-pair classes (pairs in lexicographic
/// order).
pub fn decode_votes(a: &ScoreMatrix, epsilon: f64, tau: f64) -> Vec<EdgeClass> {
    let k = a.k();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            out.push(decode_pair(a.values[i][j], a.values[j][i], epsilon, tau));
        }
    }
    out
}

/// Majority vote over weighted tallies; any tie for the maximum defaults to
/// no-edge.
pub fn majority_vote(tally: &[f64; 4]) -> EdgeClass {
    let mut best = 0usize;
    for c in 1..4 {
        if tally[c] > tally[best] {
            best = c;
        }
    }
    let ties = tally.iter().filter(|&&w| w == tally[best]).count();
    if ties > 1 {
        EdgeClass::NoEdge
    } else {
        EdgeClass::ALL[best]
    }
}

fn standardize(column: &mut [f64]) {
    let m = stats::mean(column);
    let sd = stats::variance(column).sqrt();
    if sd > 0.0 {
        column.iter_mut().for_each(|v| *v = (*v - m) / sd);
    } else {
        column.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Run the ensemble on one regime's subset columns.
fn discover_regime(
    columns: &[Vec<f64>],
    cfg: &DiscoveryConfig,
    seed: u64,
    regime: u8,
) -> Result<Vec<[f64; 4]>> {
    let k = columns.len();
    let rows = columns[0].len();
    let n_pairs = k * (k - 1) / 2;
    let mut tallies = vec![[0.0f64; 4]; n_pairs];
    let boot = if cfg.boot_size == 0 {
        rows
    } else {
        cfg.boot_size.min(rows)
    };
    // Columns are standardized once per regime so BIC differences reflect
    // conditional structure rather than raw scale.
    let mut base: Vec<Vec<f64>> = columns.to_vec();
    base.iter_mut().for_each(|c| standardize(c));
    for rep in 0..cfg.r_boot {
        let mut rng = crate::seed::rng(seed, "bootstrap", (regime as u64) << 32 | rep as u64);
        let resampled: Vec<Vec<f64>> = {
            let idx: Vec<usize> = (0..boot).map(|_| rng.random_range(0..rows)).collect();
            base.iter()
                .map(|c| idx.iter().map(|&r| c[r]).collect())
                .collect()
        };
        let scores = polybic_scores(&resampled, cfg.degree, cfg.temperature, cfg.ridge)?;
        for (p, class) in decode_votes(&scores, cfg.epsilon, cfg.tau).into_iter().enumerate() {
            tallies[p][class.index()] += cfg.learner_weight;
        }
    }
    Ok(tallies)
}

/// Estimate local PDAGs for `subset` on both regimes independently.
pub fn discover_local(
    d: &TwoRegimeDataset,
    subset: &[usize],
    cfg: &DiscoveryConfig,
    seed: u64,
) -> Result<LocalPdagPair> {
    if subset.len() < 2 {
        return Err(Error::invalid("subset must have at least two nodes"));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() {
        return Err(Error::invalid("subset contains duplicate nodes"));
    }
    if sorted.iter().any(|&v| v >= d.n_vars) {
        return Err(Error::invalid("subset node out of range"));
    }

    let mut pdags = Vec::with_capacity(2);
    let mut tallies: Vec<Vec<[f64; 4]>> = Vec::with_capacity(2);
    for regime in 0..2u8 {
        let columns: Vec<Vec<f64>> = sorted
            .iter()
            .map(|&v| d.column(regime, v).to_vec())
            .collect();
        let t = discover_regime(&columns, cfg, seed, regime)?;
        let mut pdag = Pdag::empty(d.n_vars);
        let mut p = 0usize;
        for i in 0..sorted.len() {
            for j in (i + 1)..sorted.len() {
                let (ga, gb) = (sorted[i], sorted[j]);
                match majority_vote(&t[p]) {
                    EdgeClass::Forward => pdag.insert_directed(ga, gb),
                    EdgeClass::Backward => pdag.insert_directed(gb, ga),
                    EdgeClass::Undirected => pdag.insert_undirected(ga, gb),
                    EdgeClass::NoEdge => {}
                }
                p += 1;
            }
        }
        pdags.push(pdag);
        tallies.push(t);
    }
    let pdag1 = pdags.pop().unwrap();
    let pdag0 = pdags.pop().unwrap();
    let t1 = tallies.pop().unwrap();
    let t0 = tallies.pop().unwrap();
    Ok(LocalPdagPair {
        subset: sorted,
        pdag0,
        pdag1,
        tallies: [t0, t1],
    })
}
