//! Partially directed graphs: a directed edge set plus an undirected edge
//! set, disjoint on unordered pairs.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::unordered;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pdag {
    n: usize,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>,
}

impl Pdag {
    /// Validates ranges, self-loops, and the one-entry-per-pair invariant.
    pub fn new(
        n: usize,
        directed: impl IntoIterator<Item = (usize, usize)>,
        undirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let directed: BTreeSet<(usize, usize)> = directed.into_iter().collect();
        let undirected: BTreeSet<(usize, usize)> =
            undirected.into_iter().map(|(a, b)| unordered(a, b)).collect();
        let mut pairs = BTreeSet::new();
        for &(a, b) in &directed {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            if !pairs.insert(unordered(a, b)) {
                return Err(Error::invalid(format!(
                    "pair ({a},{b}) appears more than once"
                )));
            }
        }
        for &(a, b) in &undirected {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            if !pairs.insert((a, b)) {
                return Err(Error::invalid(format!(
                    "pair ({a},{b}) appears in both edge sets"
                )));
            }
        }
        Ok(Pdag {
            n,
            directed,
            undirected,
        })
    }

    pub fn empty(n: usize) -> Self {
        Pdag {
            n,
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
        }
    }

    pub fn from_dag(dag: &super::Dag) -> Self {
        Pdag {
            n: dag.n(),
            directed: dag.edges().clone(),
            undirected: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn undirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&unordered(a, b))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_directed(a, b) || self.has_directed(b, a) || self.has_undirected(a, b)
    }

    /// Skeleton as canonical unordered pairs.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        let mut s: BTreeSet<(usize, usize)> = self.undirected.clone();
        s.extend(self.directed.iter().map(|&(a, b)| unordered(a, b)));
        s
    }

    pub fn edge_count(&self) -> usize {
        self.directed.len() + self.undirected.len()
    }

    /// Neighbors over the skeleton.
    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &(a, b) in &self.directed {
            if a == v {
                out.insert(b);
            } else if b == v {
                out.insert(a);
            }
        }
        for &(a, b) in &self.undirected {
            if a == v {
                out.insert(b);
            } else if b == v {
                out.insert(a);
            }
        }
        out
    }

    pub(crate) fn insert_directed(&mut self, a: usize, b: usize) {
        self.undirected.remove(&unordered(a, b));
        self.directed.insert((a, b));
    }

    pub(crate) fn insert_undirected(&mut self, a: usize, b: usize) {
        self.undirected.insert(unordered(a, b));
    }

    /// Nodes reachable from `v` by semi-directed paths (directed edges
    /// traversed parent→child, undirected edges either way); `v` excluded.
    ///
    /// This is a superset of the definite descendants of `v`, so excluding
    /// all possible descendants from a witness set excludes all definite
    /// descendants.
    pub fn possible_descendants(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = self.semi_directed_successors(v);
        while let Some(u) = stack.pop() {
            if u != v && out.insert(u) {
                stack.extend(self.semi_directed_successors(u));
            }
        }
        out.remove(&v);
        out
    }

    fn semi_directed_successors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, b) in &self.directed {
            if a == v {
                out.push(b);
            }
        }
        for &(a, b) in &self.undirected {
            if a == v {
                out.push(b);
            } else if b == v {
                out.push(a);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Dag;

    #[test]
    fn pair_in_both_sets_rejected() {
        assert!(Pdag::new(3, [(0, 1)], [(1, 0)]).is_err());
        assert!(Pdag::new(3, [(0, 1), (1, 0)], []).is_err());
    }

    #[test]
    fn undirected_pairs_are_canonical() {
        let p = Pdag::new(3, [], [(2, 1)]).unwrap();
        assert!(p.has_undirected(1, 2));
        assert!(p.has_undirected(2, 1));
    }

    #[test]
    fn possible_descendants_examples() {
        // Fully directed chain.
        let p = Pdag::from_dag(&Dag::new(3, [(0, 1), (1, 2)]).unwrap());
        assert_eq!(p.possible_descendants(0), BTreeSet::from([1, 2]));

        // Fully undirected chain: undirected edges are traversable.
        let p = Pdag::new(3, [], [(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.possible_descendants(0), BTreeSet::from([1, 2]));

        // Sink.
        let p = Pdag::new(3, [(0, 1), (2, 1)], []).unwrap();
        assert!(p.possible_descendants(1).is_empty());
    }
}
