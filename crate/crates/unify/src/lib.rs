//! Strictness analysis, unification, matching, and splitting over the
//! canonical terms of `totem-lf`. Everything here is restricted to the
//! pattern fragment in which most general unifiers exist; problems outside
//! it are refused, never answered wrongly.

mod shared;

pub mod matching;
pub mod split;
pub mod strictness;
pub mod unify;

pub use shared::stable_topological;

pub use matching::{match_or_block, match_terms, FragmentError, MatchVerdict};
pub use split::{split_context, split_var, SplitChild, SplitError};
pub use strictness::{
    is_strict_term, strict_occurrence_among, strict_occurrence_exists, strict_vars,
};
pub use unify::{unify, UnifOutcome, UnifProblem};
