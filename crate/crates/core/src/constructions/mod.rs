//! Combinatorial maps between ensembles, with exhaustive verifiers.

mod bridges;
mod concat;
mod marks;
mod verify;
mod walk_marks;

use serde::{Deserialize, Serialize};

pub use bridges::{bridge_concat, build_zeta, concat_walks, in_d_class, split_zeta, xi, ZetaParts};
pub use concat::{in_lex_star, shift_to_star, tree_concat, tree_concat_inverse, ShiftOutcome};
pub use marks::{
    attach_marks_tree, detach_marks_tree, enumerate_marked_trees, multichoose,
    stars_and_bars_count, weak_compositions, MarkedPolymer,
};
pub use verify::{
    verify_bridge_concat, verify_concat, verify_marks, verify_shift, verify_single_contact,
    verify_supermult, verify_walk_marks, verify_zeta, Check, VerifierReport, Witness,
};
pub use walk_marks::{attach_marks_walk, enumerate_marked_walks, MarkedWalk};

/// Outcome of inverting a map on an arbitrary input. Precondition failures
/// are reported through `Err` instead.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inverse<T> {
    Preimage(T),
    NotInImage(String),
}

impl<T> Inverse<T> {
    pub fn preimage(self) -> Option<T> {
        match self {
            Inverse::Preimage(t) => Some(t),
            Inverse::NotInImage(_) => None,
        }
    }
}
