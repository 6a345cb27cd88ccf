//! d-separation via the standard reachability procedure.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::Dag;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Dir {
    /// Trail leaves the node against an arrow (towards parents) or the walk
    /// just started here.
    Up,
    /// Trail enters the node along an arrow (from a parent).
    Down,
}

impl Dag {
    /// True iff every path between `a` and `b` is blocked by `z`.
    pub fn d_separated(&self, a: usize, b: usize, z: &BTreeSet<usize>) -> Result<bool> {
        if a >= self.n() || b >= self.n() {
            return Err(Error::invalid("query node out of range"));
        }
        if a == b {
            return Err(Error::invalid("query nodes must be distinct"));
        }
        if z.contains(&a) || z.contains(&b) {
            return Err(Error::invalid("query nodes must not appear in z"));
        }
        if let Some(&w) = z.iter().find(|&&w| w >= self.n()) {
            return Err(Error::invalid(format!("conditioning node {w} out of range")));
        }
        Ok(!self.reachable(a, z).contains(&b))
    }

    /// Nodes reachable from `x` by trails active given `z`.
    fn reachable(&self, x: usize, z: &BTreeSet<usize>) -> BTreeSet<usize> {
        // Ancestors of z (including z itself): colliders in this set are open.
        let mut anc_z: BTreeSet<usize> = z.clone();
        let mut stack: Vec<usize> = z.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for p in self.parents(v) {
                if anc_z.insert(p) {
                    stack.push(p);
                }
            }
        }

        let mut reached = BTreeSet::new();
        let mut visited: BTreeSet<(usize, u8)> = BTreeSet::new();
        let mut frontier: Vec<(usize, Dir)> = vec![(x, Dir::Up)];
        while let Some((y, d)) = frontier.pop() {
            let key = (y, matches!(d, Dir::Down) as u8);
            if !visited.insert(key) {
                continue;
            }
            if !z.contains(&y) {
                reached.insert(y);
            }
            match d {
                Dir::Up => {
                    if !z.contains(&y) {
                        for p in self.parents(y) {
                            frontier.push((p, Dir::Up));
                        }
                        for c in self.children(y) {
                            frontier.push((c, Dir::Down));
                        }
                    }
                }
                Dir::Down => {
                    if !z.contains(&y) {
                        for c in self.children(y) {
                            frontier.push((c, Dir::Down));
                        }
                    }
                    if anc_z.contains(&y) {
                        for p in self.parents(y) {
                            frontier.push((p, Dir::Up));
                        }
                    }
                }
            }
        }
        reached.remove(&x);
        reached
    }
}
