//! Meek closure: apply background orientations, then rules R1-R4 to a fixed
//! point.

use std::collections::BTreeSet;

use super::{is_acyclic, Pdag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConflictKind {
    /// A wanted orientation opposes an existing directed edge.
    OppositeOrientation,
    /// A background edge does not lie on the skeleton.
    OffSkeleton,
    /// The directed part acquired a cycle.
    DirectedCycle,
}

/// Inconsistency report naming the offending edges; the caller decides how
/// to resolve it.
#[derive(Debug, Clone)]
pub struct ClosureConflict {
    pub kind: ConflictKind,
    pub edges: Vec<(usize, usize)>,
}

impl std::fmt::Display for ClosureConflict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} on edges {:?}", self.kind, self.edges)
    }
}

/// Orient `background` in `p`, then close under Meek R1-R4.
///
/// The result is a maximally oriented PDAG and the operation is idempotent.
/// Background edges must lie on the skeleton of `p`; an orientation conflict
/// or a directed cycle yields a [`ClosureConflict`] instead of a graph.
pub fn meek_close(
    p: &Pdag,
    background: &BTreeSet<(usize, usize)>,
) -> Result<Pdag, ClosureConflict> {
    let mut g = p.clone();
    for &(a, b) in background {
        if g.has_directed(b, a) {
            return Err(ClosureConflict {
                kind: ConflictKind::OppositeOrientation,
                edges: vec![(a, b), (b, a)],
            });
        }
        if g.has_directed(a, b) {
            continue;
        }
        if !g.has_undirected(a, b) {
            return Err(ClosureConflict {
                kind: ConflictKind::OffSkeleton,
                edges: vec![(a, b)],
            });
        }
        g.insert_directed(a, b);
    }
    if let Some(cycle) = directed_cycle(&g) {
        return Err(ClosureConflict {
            kind: ConflictKind::DirectedCycle,
            edges: cycle,
        });
    }
    loop {
        let mut oriented = Vec::new();
        for &(a, b) in g.undirected() {
            if let Some(dir) = rule_orientation(&g, a, b) {
                oriented.push(dir);
            } else if let Some(dir) = rule_orientation(&g, b, a) {
                oriented.push(dir);
            }
        }
        if oriented.is_empty() {
            break;
        }
        for (a, b) in oriented {
            if g.has_directed(b, a) {
                return Err(ClosureConflict {
                    kind: ConflictKind::OppositeOrientation,
                    edges: vec![(a, b), (b, a)],
                });
            }
            if g.has_undirected(a, b) {
                g.insert_directed(a, b);
            }
        }
    }
    if let Some(cycle) = directed_cycle(&g) {
        return Err(ClosureConflict {
            kind: ConflictKind::DirectedCycle,
            edges: cycle,
        });
    }
    Ok(g)
}

/// Returns `Some((a, b))` when one of R1-R4 orients the undirected pair
/// `a - b` as `a -> b`.
fn rule_orientation(g: &Pdag, a: usize, b: usize) -> Option<(usize, usize)> {
    // R1: c -> a, a - b, c and b non-adjacent.
    for &(c, t) in g.directed() {
        if t == a && !g.adjacent(c, b) && c != b {
            return Some((a, b));
        }
    }
    // R2: a -> c -> b with a - b.
    for &(x, c) in g.directed() {
        if x == a && g.has_directed(c, b) {
            return Some((a, b));
        }
    }
    // R3: a - c, a - d, c -> b, d -> b, c and d non-adjacent.
    let into_b: Vec<usize> = g
        .directed()
        .iter()
        .filter(|&&(_, t)| t == b)
        .map(|&(s, _)| s)
        .collect();
    for (i, &c) in into_b.iter().enumerate() {
        if !g.has_undirected(a, c) {
            continue;
        }
        for &d in &into_b[i + 1..] {
            if g.has_undirected(a, d) && !g.adjacent(c, d) {
                return Some((a, b));
            }
        }
    }
    // R4: c -> d -> b with a adjacent to c and c, b non-adjacent.
    for &(c, d) in g.directed() {
        if g.has_directed(d, b) && c != a && c != b && g.adjacent(a, c) && !g.adjacent(c, b) {
            return Some((a, b));
        }
    }
    None
}

/// Any cycle in the directed part, as a list of its edges.
fn directed_cycle(g: &Pdag) -> Option<Vec<(usize, usize)>> {
    if is_acyclic(g.directed(), g.n()).unwrap_or(false) {
        return None;
    }
    // Walk children until a node repeats; extract the loop.
    let mut color = vec![0u8; g.n()];
    let mut stack_path: Vec<usize> = Vec::new();
    fn dfs(
        v: usize,
        g: &Pdag,
        color: &mut [u8],
        path: &mut Vec<usize>,
    ) -> Option<Vec<(usize, usize)>> {
        color[v] = 1;
        path.push(v);
        for &(s, t) in g.directed() {
            if s != v {
                continue;
            }
            if color[t] == 1 {
                let start = path.iter().position(|&x| x == t).unwrap();
                let mut cycle: Vec<(usize, usize)> = path[start..]
                    .windows(2)
                    .map(|w| (w[0], w[1]))
                    .collect();
                cycle.push((v, t));
                return Some(cycle);
            }
            if color[t] == 0 {
                if let Some(c) = dfs(t, g, color, path) {
                    return Some(c);
                }
            }
        }
        color[v] = 2;
        path.pop();
        None
    }
    for v in 0..g.n() {
        if color[v] == 0 {
            if let Some(c) = dfs(v, g, &mut color, &mut stack_path) {
                return Some(c);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Pdag;

    fn bg(edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        edges.iter().copied().collect()
    }

    #[test]
    fn r1_orients_the_tail() {
        // Skeleton 0 - 1 - 2 with 0,2 non-adjacent; background 0 -> 1.
        let p = Pdag::new(3, [], [(0, 1), (1, 2)]).unwrap();
        let closed = meek_close(&p, &bg(&[(0, 1)])).unwrap();
        assert!(closed.has_directed(1, 2));
        assert!(closed.undirected().is_empty());
    }

    #[test]
    fn r2_orients_the_shortcut() {
        let p = Pdag::new(3, [], [(0, 1), (1, 2), (0, 2)]).unwrap();
        let closed = meek_close(&p, &bg(&[(0, 1), (1, 2)])).unwrap();
        assert!(closed.has_directed(0, 2));
    }

    #[test]
    fn empty_background_is_idempotent() {
        let p = Pdag::new(4, [(0, 1)], [(1, 2), (2, 3), (0, 3)]).unwrap();
        let once = meek_close(&p, &bg(&[])).unwrap();
        let twice = meek_close(&once, &bg(&[])).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn opposite_background_is_a_conflict() {
        let p = Pdag::new(2, [(0, 1)], []).unwrap();
        let err = meek_close(&p, &bg(&[(1, 0)])).unwrap_err();
        assert_eq!(err.kind, ConflictKind::OppositeOrientation);
        assert!(err.edges.contains(&(1, 0)));
    }

    #[test]
    fn background_cycle_is_reported() {
        let p = Pdag::new(3, [], [(0, 1), (1, 2), (0, 2)]).unwrap();
        let err = meek_close(&p, &bg(&[(0, 1), (1, 2), (2, 0)])).unwrap_err();
        assert_eq!(err.kind, ConflictKind::DirectedCycle);
        assert_eq!(err.edges.len(), 3);
    }

    #[test]
    fn off_skeleton_background_is_rejected() {
        let p = Pdag::new(3, [], [(0, 1)]).unwrap();
        let err = meek_close(&p, &bg(&[(0, 2)])).unwrap_err();
        assert_eq!(err.kind, ConflictKind::OffSkeleton);
    }
}
