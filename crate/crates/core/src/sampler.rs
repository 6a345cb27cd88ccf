//! Contrast-aware greedy sampling of node subsets.
//!
//! Selection scores combine node-wise environment sensitivity (standardized
//! mean shift plus mutual information with the regime label), pairwise
//! cross-regime correlation contrast, and pooled precision-matrix relevance.
//! Scores decay with pair visit counts and a coverage bonus down-weights
//! frequently visited nodes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::stats;
use crate::synth::TwoRegimeDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerParams {
    pub w1: f64,
    pub w2: f64,
    /// Pair-relevance decay base (> 1, may be infinite).
    pub q: f64,
    /// Contrast decay base (> 1, may be infinite).
    pub r: f64,
    /// Seed-score mixing between pair relevance and sensitivity.
    pub rho: f64,
    /// Greedy-score mixing between pair relevance and sensitivity+contrast.
    pub lambda: f64,
    /// Coverage-bonus exponent (>= 0).
    pub beta_cov: f64,
    /// Subset size.
    pub k: usize,
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams {
            w1: 1.0,
            w2: 1.0,
            q: 2.0,
            r: 2.0,
            rho: 0.3,
            lambda: 0.5,
            beta_cov: 1.0,
            k: 5,
        }
    }
}

/// Node sensitivity, pair contrast, and pair relevance, all rescaled to [0,1].
#[derive(Debug, Clone)]
pub struct SelectionScores {
    pub sensitivity: Vec<f64>,
    /// Symmetric, zero diagonal.
    pub contrast: Vec<Vec<f64>>,
    /// Symmetric, zero diagonal.
    pub relevance: Vec<Vec<f64>>,
    /// Nodes whose standardized-shift term was dropped for zero variance.
    pub degenerate_nodes: Vec<usize>,
}

/// Number of equal-frequency bins for the mutual-information estimate.
const MI_BINS: usize = 8;

/// Plug-in mutual information between a binned column and the binary regime
/// label, in nats.
fn mutual_information_with_regime(x0: &[f64], x1: &[f64]) -> f64 {
    let m0 = x0.len();
    let m1 = x1.len();
    let total = m0 + m1;
    if m0 == 0 || m1 == 0 {
        return 0.0;
    }
    let mut pooled: Vec<f64> = x0.iter().chain(x1.iter()).copied().collect();
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Equal-frequency cut points; ties collapse bins harmlessly.
    let cuts: Vec<f64> = (1..MI_BINS)
        .map(|b| pooled[b * total / MI_BINS])
        .collect();
    let bin_of = |v: f64| cuts.iter().take_while(|&&c| v >= c).count();
    let mut joint = [[0.0f64; 2]; MI_BINS];
    for &v in x0 {
        joint[bin_of(v)][0] += 1.0;
    }
    for &v in x1 {
        joint[bin_of(v)][1] += 1.0;
    }
    let n = total as f64;
    let pc = [m0 as f64 / n, m1 as f64 / n];
    let mut mi = 0.0;
    for row in &joint {
        let pb = (row[0] + row[1]) / n;
        if pb == 0.0 {
            continue;
        }
        for c in 0..2 {
            let pbc = row[c] / n;
            if pbc > 0.0 {
                mi += pbc * (pbc / (pb * pc[c])).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Compute sensitivity, contrast, and relevance scores from the dataset.
pub fn compute_scores(d: &TwoRegimeDataset, w1: f64, w2: f64) -> Result<SelectionScores> {
    if d.rows0() == 0 || d.rows1() == 0 {
        return Err(Error::invalid("both regimes must be non-empty"));
    }
    if w1 < 0.0 || w2 < 0.0 {
        return Err(Error::invalid("score weights must be non-negative"));
    }
    let n = d.n_vars;
    let mut degenerate = Vec::new();
    let mut sens = Vec::with_capacity(n);
    for v in 0..n {
        let c0 = d.column(0, v);
        let c1 = d.column(1, v);
        let pooled_var = 0.5 * (stats::variance(c0) + stats::variance(c1));
        let shift = if pooled_var <= 0.0 {
            degenerate.push(v);
            0.0
        } else {
            (stats::mean(c0) - stats::mean(c1)).abs() / pooled_var.sqrt()
        };
        sens.push(w1 * shift + w2 * mutual_information_with_regime(c0, c1));
    }
    stats::rescale(&mut sens);

    let mut contrast = vec![vec![0.0; n]; n];
    {
        let mut flat = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let c0 = stats::correlation(d.column(0, i), d.column(0, j));
                let c1 = stats::correlation(d.column(1, i), d.column(1, j));
                flat.push((c0 - c1).abs());
            }
        }
        stats::rescale(&mut flat);
        let mut it = flat.into_iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = it.next().unwrap();
                contrast[i][j] = v;
                contrast[j][i] = v;
            }
        }
    }

    let mut relevance = vec![vec![0.0; n]; n];
    {
        let pooled: Vec<Vec<f64>> = (0..n).map(|v| d.pooled_column(v)).collect();
        let prec = stats::precision_matrix(&pooled, 1e-3)?;
        let mut flat = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                flat.push(prec[(i, j)].abs());
            }
        }
        stats::rescale(&mut flat);
        let mut it = flat.into_iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = it.next().unwrap();
                relevance[i][j] = v;
                relevance[j][i] = v;
            }
        }
    }

    Ok(SelectionScores {
        sensitivity: sens,
        contrast,
        relevance,
        degenerate_nodes: degenerate,
    })
}

/// Sequential sampler state: base scores plus visit counts.
#[derive(Debug, Clone)]
pub struct SamplerState {
    pub n: usize,
    pub params: SamplerParams,
    pub scores: SelectionScores,
    pub node_counts: Vec<u64>,
    pub pair_counts: Vec<Vec<u64>>,
    /// How many draws fell back to uniform because all scores were zero.
    pub uniform_fallbacks: u64,
}

/// One emitted subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetDraw {
    pub nodes: Vec<usize>,
    pub used_fallback: bool,
}

impl SamplerState {
    pub fn new(scores: SelectionScores, params: SamplerParams) -> Result<Self> {
        let n = scores.sensitivity.len();
        if params.k > n {
            return Err(Error::invalid(format!(
                "subset size k={} exceeds node count {n}",
                params.k
            )));
        }
        if params.q <= 1.0 || params.r <= 1.0 {
            return Err(Error::invalid("decay bases q, r must exceed 1"));
        }
        Ok(SamplerState {
            n,
            params,
            scores,
            node_counts: vec![0; n],
            pair_counts: vec![vec![0; n]; n],
            uniform_fallbacks: 0,
        })
    }

    /// Base score decayed by the pair visit count: `base / decay^count`.
    fn decayed(&self, base: f64, decay: f64, count: u64) -> f64 {
        if count == 0 {
            return base;
        }
        let denom = decay.powi(count.min(i32::MAX as u64) as i32);
        if denom.is_infinite() {
            0.0
        } else {
            base / denom
        }
    }

    fn relevance_t(&self, i: usize, j: usize) -> f64 {
        self.decayed(
            self.scores.relevance[i][j],
            self.params.q,
            self.pair_counts[i][j],
        )
    }

    fn contrast_t(&self, i: usize, j: usize) -> f64 {
        self.decayed(
            self.scores.contrast[i][j],
            self.params.r,
            self.pair_counts[i][j],
        )
    }

    fn coverage_penalty(&self, v: usize) -> f64 {
        (1.0 + self.node_counts[v] as f64).powf(self.params.beta_cov)
    }

    /// Categorical draw proportional to `weights`; zero-sum weights fall back
    /// to a uniform draw over the candidates and set the fallback flag.
    fn categorical(
        &mut self,
        candidates: &[usize],
        weights: &[f64],
        rng: &mut impl Rng,
    ) -> (usize, bool) {
        let total: f64 = weights.iter().sum();
        if total > 0.0 && total.is_finite() {
            let mut t = rng.random_range(0.0..total);
            for (idx, &w) in weights.iter().enumerate() {
                if t < w {
                    return (candidates[idx], false);
                }
                t -= w;
            }
            return (*candidates.last().unwrap(), false);
        }
        self.uniform_fallbacks += 1;
        (candidates[rng.random_range(0..candidates.len())], true)
    }

    /// Draw one subset of exactly `k` distinct nodes.
    pub fn sample_subset(&mut self, rng: &mut impl Rng) -> SubsetDraw {
        let k = self.params.k;
        let rho = self.params.rho;
        let lambda = self.params.lambda;
        let mut used_fallback = false;

        // Seed draw over all nodes.
        let all: Vec<usize> = (0..self.n).collect();
        let seed_weights: Vec<f64> = all
            .iter()
            .map(|&i| {
                let pair_sum: f64 = (0..self.n)
                    .filter(|&j| j != i)
                    .map(|j| self.relevance_t(i, j))
                    .sum();
                ((1.0 - rho) * pair_sum + rho * self.scores.sensitivity[i])
                    / self.coverage_penalty(i)
            })
            .collect();
        let (seed, fb) = self.categorical(&all, &seed_weights, rng);
        used_fallback |= fb;

        let mut subset = vec![seed];
        while subset.len() < k {
            let candidates: Vec<usize> =
                (0..self.n).filter(|v| !subset.contains(v)).collect();
            let weights: Vec<f64> = candidates
                .iter()
                .map(|&j| {
                    let pair_sum: f64 = subset.iter().map(|&i| self.relevance_t(i, j)).sum();
                    let mean_contrast: f64 = subset
                        .iter()
                        .map(|&i| self.contrast_t(i, j))
                        .sum::<f64>()
                        / subset.len() as f64;
                    (lambda * pair_sum
                        + (1.0 - lambda) * (self.scores.sensitivity[j] + mean_contrast))
                        / self.coverage_penalty(j)
                })
                .collect();
            let (next, fb) = self.categorical(&candidates, &weights, rng);
            used_fallback |= fb;
            subset.push(next);
        }
        subset.sort_unstable();
        SubsetDraw {
            nodes: subset,
            used_fallback,
        }
    }

    /// Increment node and pair visit counts for an emitted subset.
    pub fn update(&mut self, subset: &[usize]) {
        for &i in subset {
            self.node_counts[i] += 1;
        }
        for (x, &i) in subset.iter().enumerate() {
            for &j in &subset[x + 1..] {
                self.pair_counts[i][j] += 1;
                self.pair_counts[j][i] += 1;
            }
        }
    }

    /// Draw and record `t` subsets.
    pub fn sample_many(&mut self, t: usize, rng: &mut impl Rng) -> Vec<SubsetDraw> {
        (0..t)
            .map(|_| {
                let draw = self.sample_subset(rng);
                self.update(&draw.nodes);
                draw
            })
            .collect()
    }
}

/// Default subset budget: `10 * (n / k)^2`, clamped to `[10, 500]`.
pub fn default_subset_budget(n: usize, k: usize) -> usize {
    let ratio = n as f64 / k.max(1) as f64;
    ((10.0 * ratio * ratio).ceil() as usize).clamp(10, 500)
}
