//! Cross-regime conditional-invariance tests and witness admissibility.
//!
//! The default estimator tests equality of the conditional law `X_v | X_Z`
//! across regimes with (a) a Chow-style F test for coefficient equality
//! between per-regime ridge regressions and (b) a residual-variance ratio
//! test, combined by Bonferroni. An empty witness set reduces to two-sample
//! mean and variance tests.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::discovery::LocalPdagPair;
use crate::error::{Error, Result};
use crate::stats;
use crate::synth::TwoRegimeDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Invariant,
    Changed,
}

/// One tested invariance literal.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceLiteral {
    pub v: usize,
    pub z: BTreeSet<usize>,
    pub verdict: Verdict,
    pub p_value: f64,
    pub statistic: f64,
    /// Witness columns dropped for zero pooled variance.
    pub dropped: Vec<usize>,
}

impl InvarianceLiteral {
    pub fn is_invariant(&self) -> bool {
        self.verdict == Verdict::Invariant
    }

    /// Literal confidence used when consolidating rule evidence.
    pub fn confidence(&self) -> f64 {
        (1.0 - self.p_value).clamp(0.0, 1.0)
    }
}

/// Anything that can answer invariance queries: the data-driven tester below
/// or the graphical population oracle.
pub trait LiteralSource {
    fn literal(&self, v: usize, z: &BTreeSet<usize>) -> Result<InvarianceLiteral>;
}

fn two_sided_f(stat: f64, df1: f64, df2: f64) -> f64 {
    if !stat.is_finite() || df1 <= 0.0 || df2 <= 0.0 {
        return 1.0;
    }
    let f = match FisherSnedecor::new(df1, df2) {
        Ok(f) => f,
        Err(_) => return 1.0,
    };
    let c = f.cdf(stat);
    (2.0 * c.min(1.0 - c)).clamp(0.0, 1.0)
}

fn upper_f(stat: f64, df1: f64, df2: f64) -> f64 {
    if !stat.is_finite() || df1 <= 0.0 || df2 <= 0.0 {
        return 1.0;
    }
    match FisherSnedecor::new(df1, df2) {
        Ok(f) => (1.0 - f.cdf(stat.max(0.0))).clamp(0.0, 1.0),
        Err(_) => 1.0,
    }
}

/// Test the conditional law of `v` given `z` for equality across regimes at
/// level `alpha`.
pub fn test_invariance(
    d: &TwoRegimeDataset,
    v: usize,
    z: &BTreeSet<usize>,
    alpha: f64,
    ridge: f64,
) -> Result<InvarianceLiteral> {
    if v >= d.n_vars {
        return Err(Error::invalid("node out of range"));
    }
    if z.contains(&v) {
        return Err(Error::invalid("witness set must not contain the node"));
    }
    if let Some(&w) = z.iter().find(|&&w| w >= d.n_vars) {
        return Err(Error::invalid(format!("witness node {w} out of range")));
    }
    let (m0, m1) = (d.rows0(), d.rows1());
    if m0 <= z.len() + 3 || m1 <= z.len() + 3 {
        return Err(Error::degenerate(format!(
            "need more than |Z|+3={} rows per regime, got {m0}/{m1}",
            z.len() + 3
        )));
    }

    // Drop witness columns that are constant in the pooled data.
    let mut dropped = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    for &w in z {
        if stats::variance(&d.pooled_column(w)) <= 0.0 {
            dropped.push(w);
        } else {
            kept.push(w);
        }
    }

    let y0 = d.column(0, v);
    let y1 = d.column(1, v);
    let (p_a, p_b, statistic) = if kept.is_empty() {
        mean_and_variance_tests(y0, y1)
    } else {
        chow_and_variance_tests(d, v, &kept, ridge)?
    };
    let p_value = (2.0 * p_a.min(p_b)).min(1.0);
    let verdict = if p_value >= alpha {
        Verdict::Invariant
    } else {
        Verdict::Changed
    };
    Ok(InvarianceLiteral {
        v,
        z: z.clone(),
        verdict,
        p_value,
        statistic,
        dropped,
    })
}

/// Welch mean test + variance-ratio test for an empty witness set.
fn mean_and_variance_tests(y0: &[f64], y1: &[f64]) -> (f64, f64, f64) {
    let (m0, m1) = (y0.len() as f64, y1.len() as f64);
    let (mu0, mu1) = (stats::mean(y0), stats::mean(y1));
    let (v0, v1) = (
        stats::variance(y0).max(1e-300),
        stats::variance(y1).max(1e-300),
    );
    let se2 = v0 / m0 + v1 / m1;
    let t = (mu0 - mu1) / se2.sqrt();
    let df = se2 * se2 / ((v0 / m0).powi(2) / (m0 - 1.0) + (v1 / m1).powi(2) / (m1 - 1.0));
    let p_mean = match StudentsT::new(0.0, 1.0, df) {
        Ok(dist) => (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0),
        Err(_) => 1.0,
    };
    let f = v0 / v1;
    let p_var = two_sided_f(f, m0 - 1.0, m1 - 1.0);
    (p_mean, p_var, t.abs().max(f.max(1.0 / f)))
}

/// Chow coefficient-equality test + residual-variance ratio given witnesses.
fn chow_and_variance_tests(
    d: &TwoRegimeDataset,
    v: usize,
    z: &[usize],
    ridge: f64,
) -> Result<(f64, f64, f64)> {
    let (m0, m1) = (d.rows0(), d.rows1());
    let p = z.len() + 1;

    let fit = |regime: Option<u8>| -> Result<f64> {
        let (rows, y, cols): (usize, Vec<f64>, Vec<Vec<f64>>) = match regime {
            Some(c) => (
                if c == 0 { m0 } else { m1 },
                d.column(c, v).to_vec(),
                z.iter().map(|&w| d.column(c, w).to_vec()).collect(),
            ),
            None => (
                m0 + m1,
                d.pooled_column(v),
                z.iter().map(|&w| d.pooled_column(w)).collect(),
            ),
        };
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let phi = stats::polynomial_features(&refs, rows, 1);
        Ok(stats::ridge_fit(&phi, &y, ridge)?.rss)
    };
    let rss0 = fit(Some(0))?;
    let rss1 = fit(Some(1))?;
    let rss_pooled = fit(None)?;

    let df2 = (m0 + m1) as f64 - 2.0 * p as f64;
    if df2 < 1.0 {
        return Err(Error::degenerate("not enough rows for the Chow test"));
    }
    let within = (rss0 + rss1).max(1e-300);
    let chow = ((rss_pooled - rss0 - rss1).max(0.0) / p as f64) / (within / df2);
    let p_chow = upper_f(chow, p as f64, df2);

    let s0 = rss0.max(1e-300) / (m0 - p) as f64;
    let s1 = rss1.max(1e-300) / (m1 - p) as f64;
    let f = s0 / s1;
    let p_var = two_sided_f(f, (m0 - p) as f64, (m1 - p) as f64);
    Ok((p_chow, p_var, chow.max(f.max(1.0 / f))))
}

/// Witness admissibility: `z` contains no possible descendant of `v` in
/// either local PDAG. Possible descendants over-approximate definite
/// descendants, so admissibility stays sound.
pub fn witness_admissible(v: usize, z: &BTreeSet<usize>, lp: &LocalPdagPair) -> Result<bool> {
    if !lp.subset.contains(&v) {
        return Err(Error::invalid("node not contained in the subset"));
    }
    if let Some(&w) = z.iter().find(|w| !lp.subset.contains(w)) {
        return Err(Error::invalid(format!("witness {w} outside the subset")));
    }
    if z.is_empty() {
        return Ok(true);
    }
    for pdag in [&lp.pdag0, &lp.pdag1] {
        let desc = pdag.possible_descendants(v);
        if z.iter().any(|w| desc.contains(w)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Data-backed literal source with per-(v, Z) caching.
pub struct EmpiricalTester<'a> {
    data: &'a TwoRegimeDataset,
    pub alpha: f64,
    pub ridge: f64,
    cache: RefCell<BTreeMap<(usize, Vec<usize>), InvarianceLiteral>>,
}

impl<'a> EmpiricalTester<'a> {
    pub fn new(data: &'a TwoRegimeDataset, alpha: f64, ridge: f64) -> Self {
        EmpiricalTester {
            data,
            alpha,
            ridge,
            cache: RefCell::new(BTreeMap::new()),
        }
    }
}

impl LiteralSource for EmpiricalTester<'_> {
    fn literal(&self, v: usize, z: &BTreeSet<usize>) -> Result<InvarianceLiteral> {
        let key = (v, z.iter().copied().collect::<Vec<_>>());
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let lit = test_invariance(self.data, v, z, self.alpha, self.ridge)?;
        self.cache.borrow_mut().insert(key, lit.clone());
        Ok(lit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::{discover_local, DiscoveryConfig};
    use crate::graph::{Dag, Pdag};
    use crate::synth::{build_scm, simulate_dataset, MechanismFamily, MechanismKind};
    use rand_distr::{Distribution, Normal};

    fn gaussian_dataset(
        n_vars: usize,
        rows: usize,
        seed: u64,
        tweak: impl Fn(usize, &mut Vec<f64>),
    ) -> TwoRegimeDataset {
        let mut rng = crate::seed::rng(seed, "inv-test", 0);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..rows).map(|_| normal.sample(rng)).collect()
        };
        let samples0: Vec<Vec<f64>> = (0..n_vars).map(|_| draw(&mut rng)).collect();
        let mut samples1: Vec<Vec<f64>> = (0..n_vars).map(|_| draw(&mut rng)).collect();
        for (i, col) in samples1.iter_mut().enumerate() {
            tweak(i, col);
        }
        TwoRegimeDataset {
            n_vars,
            samples0,
            samples1,
            truth: None,
            clamped: 0,
        }
    }

    #[test]
    fn verdict_matches_p_value_threshold() {
        let d = gaussian_dataset(2, 500, 3, |_, _| {});
        let z = BTreeSet::from([1]);
        let lit = test_invariance(&d, 0, &z, 0.01, 1e-3).unwrap();
        assert_eq!(lit.is_invariant(), lit.p_value >= 0.01);
    }

    #[test]
    fn marginal_shift_is_detected() {
        let d = gaussian_dataset(2, 2000, 5, |i, col| {
            if i == 0 {
                col.iter_mut().for_each(|v| *v += 5.0);
            }
        });
        let lit = test_invariance(&d, 0, &BTreeSet::new(), 0.01, 1e-3).unwrap();
        assert_eq!(lit.verdict, Verdict::Changed);
        let other = test_invariance(&d, 1, &BTreeSet::new(), 0.01, 1e-3).unwrap();
        assert_eq!(other.verdict, Verdict::Invariant);
    }

    #[test]
    fn statistic_is_symmetric_under_regime_swap() {
        let d = gaussian_dataset(3, 800, 9, |i, col| {
            if i == 2 {
                col.iter_mut().for_each(|v| *v *= 2.0);
            }
        });
        let swapped = TwoRegimeDataset {
            n_vars: d.n_vars,
            samples0: d.samples1.clone(),
            samples1: d.samples0.clone(),
            truth: None,
            clamped: 0,
        };
        for v in 0..3 {
            let z: BTreeSet<usize> = (0..3).filter(|&w| w != v).take(1).collect();
            let a = test_invariance(&d, v, &z, 0.01, 1e-3).unwrap();
            let b = test_invariance(&swapped, v, &z, 0.01, 1e-3).unwrap();
            assert_eq!(a.verdict, b.verdict, "verdict flipped for node {v}");
            assert!((a.p_value - b.p_value).abs() < 1e-9);
        }
    }

    #[test]
    fn doubled_weight_is_detected_given_parents() {
        // 0 -> 1 linear; regime 1 doubles the weight. Conditioning on the
        // parent must flag the change.
        let mut hits = 0;
        let runs = 20;
        for s in 0..runs {
            let mut rng = crate::seed::rng(s, "pow", 0);
            let normal = Normal::new(0.0, 0.3).unwrap();
            let rows = 10_000;
            let x0: Vec<f64> = (0..rows).map(|_| normal.sample(&mut rng) * 3.0).collect();
            let y0: Vec<f64> = x0.iter().map(|v| v + normal.sample(&mut rng)).collect();
            let x1: Vec<f64> = (0..rows).map(|_| normal.sample(&mut rng) * 3.0).collect();
            let y1: Vec<f64> = x1.iter().map(|v| 2.0 * v + normal.sample(&mut rng)).collect();
            let d = TwoRegimeDataset {
                n_vars: 2,
                samples0: vec![x0, y0],
                samples1: vec![x1, y1],
                truth: None,
                clamped: 0,
            };
            let lit = test_invariance(&d, 1, &BTreeSet::from([0]), 0.01, 1e-3).unwrap();
            if lit.verdict == Verdict::Changed {
                hits += 1;
            }
        }
        assert!(hits >= 19, "power {hits}/{runs}");
    }

    #[test]
    fn degenerate_witness_column_is_dropped_and_flagged() {
        let mut d = gaussian_dataset(3, 300, 11, |_, _| {});
        d.samples0[2].iter_mut().for_each(|v| *v = 1.0);
        d.samples1[2].iter_mut().for_each(|v| *v = 1.0);
        let lit = test_invariance(&d, 0, &BTreeSet::from([1, 2]), 0.01, 1e-3).unwrap();
        assert_eq!(lit.dropped, vec![2]);
    }

    #[test]
    fn insufficient_rows_is_an_error() {
        let d = gaussian_dataset(3, 4, 13, |_, _| {});
        assert!(test_invariance(&d, 0, &BTreeSet::from([1]), 0.01, 1e-3).is_err());
        assert!(test_invariance(&d, 0, &BTreeSet::from([0]), 0.01, 1e-3).is_err());
    }

    #[test]
    fn empty_witness_is_always_admissible() {
        let d = gaussian_dataset(3, 300, 17, |_, _| {});
        let lp = discover_local(&d, &[0, 1, 2], &DiscoveryConfig::default(), 1).unwrap();
        assert!(witness_admissible(0, &BTreeSet::new(), &lp).unwrap());
    }

    #[test]
    fn descendants_in_either_pdag_block_admissibility() {
        let lp = LocalPdagPair {
            subset: vec![0, 1, 2],
            pdag0: Pdag::from_dag(&Dag::new(3, [(0, 1)]).unwrap()),
            pdag1: Pdag::empty(3),
            tallies: [vec![], vec![]],
        };
        // 1 is a directed child of 0 in pdag0.
        assert!(!witness_admissible(0, &BTreeSet::from([1]), &lp).unwrap());
        // Undirected contact counts as a possible descendant.
        let lp2 = LocalPdagPair {
            subset: vec![0, 1, 2],
            pdag0: Pdag::new(3, [], [(0, 1)]).unwrap(),
            pdag1: Pdag::empty(3),
            tallies: [vec![], vec![]],
        };
        assert!(!witness_admissible(0, &BTreeSet::from([1]), &lp2).unwrap());
        // Outside-subset witness is an input error.
        assert!(witness_admissible(0, &BTreeSet::from([5]), &lp).is_err());
    }

    #[test]
    fn empirical_tester_caches_and_agrees_with_direct_calls() {
        let d = gaussian_dataset(3, 400, 19, |_, _| {});
        let tester = EmpiricalTester::new(&d, 0.01, 1e-3);
        let z = BTreeSet::from([1]);
        let a = tester.literal(0, &z).unwrap();
        let b = tester.literal(0, &z).unwrap();
        let direct = test_invariance(&d, 0, &z, 0.01, 1e-3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, direct);
    }

    #[test]
    fn population_oracle_agreement_on_linear_scms() {
        // Large-sample literals should agree with d-separation on the
        // augmented graph for most tested (v, Z) pairs.
        use crate::graph::AugmentedDag;
        let mut agree = 0usize;
        let mut total = 0usize;
        for s in 0..10 {
            let mut rng = crate::seed::rng(s, "agree", 0);
            let g = crate::synth::sample_dag(5, 6, &mut rng).unwrap();
            let targets = crate::synth::sample_targets(&g, 0.4, &mut rng).unwrap();
            let scm = build_scm(
                &g,
                &targets,
                &MechanismFamily::Fixed(MechanismKind::Linear),
                &mut rng,
            )
            .unwrap();
            let d = simulate_dataset(&scm, 100_000, 1000 + s).unwrap();
            let aug = AugmentedDag::new(g.clone(), targets.clone()).unwrap();
            for v in 0..5usize {
                for z in [
                    BTreeSet::new(),
                    g.parents(v).into_iter().collect::<BTreeSet<_>>(),
                ] {
                    if z.contains(&v) {
                        continue;
                    }
                    let lit = test_invariance(&d, v, &z, 0.01, 1e-3).unwrap();
                    let pop = aug.regime_d_separated(v, &z).unwrap();
                    total += 1;
                    if lit.is_invariant() == pop {
                        agree += 1;
                    }
                }
            }
        }
        let rate = agree as f64 / total as f64;
        assert!(rate >= 0.95, "oracle agreement {rate}");
    }
}
