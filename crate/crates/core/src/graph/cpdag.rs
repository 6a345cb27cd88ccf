//! CPDAG construction: skeleton + v-structures + Meek completion.

use std::collections::BTreeSet;

use super::{meek_close, Dag, Pdag};

/// Essential graph of the Markov equivalence class of `g`.
pub fn cpdag_of(g: &Dag) -> Pdag {
    let mut pattern = Pdag::empty(g.n());
    let mut compelled: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (a, m, b) in g.v_structures() {
        compelled.insert((a, m));
        compelled.insert((b, m));
    }
    for &(a, b) in g.edges() {
        if !compelled.contains(&(a, b)) {
            pattern.insert_undirected(a, b);
        }
    }
    for &(a, b) in &compelled {
        pattern.insert_directed(a, b);
    }
    // v-structure orientations come from the DAG itself, so closure cannot
    // conflict.
    meek_close(&pattern, &BTreeSet::new()).expect("pattern of a DAG is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_is_fully_undirected() {
        let g = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let c = cpdag_of(&g);
        assert!(c.directed().is_empty());
        assert_eq!(c.undirected().len(), 2);
    }

    #[test]
    fn v_structure_is_compelled() {
        let g = Dag::new(3, [(0, 1), (2, 1)]).unwrap();
        let c = cpdag_of(&g);
        assert!(c.has_directed(0, 1));
        assert!(c.has_directed(2, 1));
        assert!(c.undirected().is_empty());
    }

    #[test]
    fn triangle_is_fully_undirected() {
        let g = Dag::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let c = cpdag_of(&g);
        assert!(c.directed().is_empty());
        assert_eq!(c.undirected().len(), 3);
    }
}
