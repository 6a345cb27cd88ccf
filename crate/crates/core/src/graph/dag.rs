//! Labeled DAGs over node indices, plus the regime-augmented variant.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Returns true iff `edges` over `n` nodes admits a topological order.
///
/// Kahn's algorithm; self-loops count as cycles.
pub fn is_acyclic(edges: &BTreeSet<(usize, usize)>, n: usize) -> Result<bool> {
    let mut indeg = vec![0usize; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::invalid(format!(
                "edge ({a},{b}) out of range for n={n}"
            )));
        }
        indeg[b] += 1;
        children[a].push(b);
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0usize;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &c in &children[v] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push(c);
            }
        }
    }
    Ok(seen == n)
}

/// A labeled directed acyclic graph over nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dag {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Dag {
    /// Validates ranges, self-loops, and acyclicity.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
        }
        if !is_acyclic(&edges, n)? {
            return Err(Error::invalid("edge set contains a directed cycle"));
        }
        Ok(Dag { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        Dag {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, b)| b == v)
            .map(|&(a, _)| a)
            .collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        self.edges
            .range((v, 0)..=(v, usize::MAX))
            .map(|&(_, b)| b)
            .collect()
    }

    /// Nodes with no parents.
    pub fn roots(&self) -> BTreeSet<usize> {
        let mut has_parent = vec![false; self.n];
        for &(_, b) in &self.edges {
            has_parent[b] = true;
        }
        (0..self.n).filter(|&v| !has_parent[v]).collect()
    }

    /// A topological order (deterministic: smallest-index-first tie-break).
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indeg = vec![0usize; self.n];
        for &(_, b) in &self.edges {
            indeg[b] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(v);
            for c in self.children(v) {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    /// Descendants of `v`, excluding `v` itself.
    pub fn descendants(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = self.children(v);
        while let Some(u) = stack.pop() {
            if out.insert(u) {
                stack.extend(self.children(u));
            }
        }
        out
    }

    /// v-structures `(a, m, b)` with `a → m ← b`, `a < b`, `a` and `b`
    /// non-adjacent.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for m in 0..self.n {
            let pa = self.parents(m);
            for (x, &a) in pa.iter().enumerate() {
                for &b in &pa[x + 1..] {
                    if !self.adjacent(a, b) {
                        let (a, b) = if a < b { (a, b) } else { (b, a) };
                        out.insert((a, m, b));
                    }
                }
            }
        }
        out
    }

    /// Skeleton as canonical unordered pairs.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(a, b)| super::unordered(a, b))
            .collect()
    }
}

/// A DAG augmented with an implicit regime node `C` that points at every
/// intervention target. `C` is addressed as index `n` of the base graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedDag {
    base: Dag,
    targets: BTreeSet<usize>,
}

impl AugmentedDag {
    pub fn new(base: Dag, targets: impl IntoIterator<Item = usize>) -> Result<Self> {
        let targets: BTreeSet<usize> = targets.into_iter().collect();
        if let Some(&t) = targets.iter().find(|&&t| t >= base.n()) {
            return Err(Error::invalid(format!(
                "target {t} out of range for n={}",
                base.n()
            )));
        }
        Ok(AugmentedDag { base, targets })
    }

    pub fn base(&self) -> &Dag {
        &self.base
    }

    pub fn targets(&self) -> &BTreeSet<usize> {
        &self.targets
    }

    /// Index of the regime node in [`Self::to_dag`].
    pub fn regime_node(&self) -> usize {
        self.base.n()
    }

    /// Materializes the augmented graph as a plain DAG on `n + 1` nodes.
    pub fn to_dag(&self) -> Dag {
        let c = self.base.n();
        let mut edges = self.base.edges.clone();
        for &t in &self.targets {
            edges.insert((c, t));
        }
        Dag {
            n: c + 1,
            edges,
        }
    }

    /// d-separation of the regime node from `v` given `z` (base-graph
    /// indices).
    pub fn regime_d_separated(&self, v: usize, z: &BTreeSet<usize>) -> Result<bool> {
        self.to_dag().d_separated(self.regime_node(), v, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        edges.iter().copied().collect()
    }

    #[test]
    fn acyclicity_examples() {
        assert!(is_acyclic(&set(&[]), 3).unwrap());
        assert!(!is_acyclic(&set(&[(0, 1), (1, 2), (2, 0)]), 3).unwrap());
        assert!(is_acyclic(&set(&[(0, 1), (0, 2), (1, 2)]), 3).unwrap());
    }

    #[test]
    fn out_of_range_edge_is_an_input_error() {
        assert!(is_acyclic(&set(&[(0, 5)]), 3).is_err());
        assert!(Dag::new(3, [(0, 5)]).is_err());
    }

    #[test]
    fn self_loop_rejected() {
        assert!(Dag::new(2, [(1, 1)]).is_err());
    }

    #[test]
    fn structure_queries() {
        let g = Dag::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.parents(2), vec![0, 1]);
        assert_eq!(g.children(0), vec![1, 2]);
        assert_eq!(g.roots(), BTreeSet::from([0, 3]));
        assert_eq!(g.descendants(0), BTreeSet::from([1, 2]));
        assert_eq!(g.topological_order(), vec![0, 1, 2, 3]);
        assert!(g.v_structures().is_empty());

        let collider = Dag::new(3, [(0, 1), (2, 1)]).unwrap();
        assert_eq!(
            collider.v_structures(),
            BTreeSet::from([(0, 1, 2)])
        );
    }

    #[test]
    fn augmented_regime_node_is_a_source() {
        let g = Dag::new(2, [(0, 1)]).unwrap();
        let aug = AugmentedDag::new(g, [1]).unwrap();
        let full = aug.to_dag();
        assert_eq!(full.n(), 3);
        assert!(full.has_edge(2, 1));
        assert!(full.parents(2).is_empty());
    }

    #[test]
    fn augmented_rejects_out_of_range_target() {
        let g = Dag::new(2, [(0, 1)]).unwrap();
        assert!(AugmentedDag::new(g, [2]).is_err());
    }
}
