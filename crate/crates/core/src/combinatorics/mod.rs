//! Permutation counting and instance checkers for the ordered-partition
//! lemmas, plus randomized falsification harnesses for them.

mod falsify;
mod grid;
mod lemmas;
mod perms;

pub use falsify::{falsify_lemma2, falsify_lemma3, Counterexample, FalsifyReport, GRID_DENOMINATOR};
pub use grid::GridBounds;
pub use lemmas::{
    lemma2_check, lemma3_check, lemma_eta_cap, subset_sum_gap_free, LemmaBounds, OrderedTuple,
    PartitionedTuple, Verdict, MAX_SUBSET_LEN,
};
pub use perms::{count_pattern_permutations, Pattern};
