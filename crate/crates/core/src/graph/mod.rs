//! Graph types and algorithms: DAGs, partially directed graphs,
//! d-separation, CPDAG construction, Meek closure, and evaluation metrics.

mod cpdag;
mod dag;
mod dsep;
mod eval;
mod meek;
mod pdag;

pub use cpdag::cpdag_of;
pub use dag::{is_acyclic, AugmentedDag, Dag};
pub use eval::{evaluate_dag, evaluate_pdag, mean_std, EvalReport};
pub use meek::{meek_close, ClosureConflict, ConflictKind};
pub use pdag::Pdag;

/// Canonical unordered pair (smaller index first).
pub(crate) fn unordered(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}
