//! The logic-programming reading of an LF signature: object constants are
//! clauses, and a goal `a M₁ … M_n` is solved by backchaining through the
//! clauses of `a`, producing an inhabiting derivation term.

pub mod clause;
pub mod solve;

pub use clause::{clauses_for, Clause};
pub use solve::{solve, Goal, Solution, Solve, SolveError, DEFAULT_DEPTH};
