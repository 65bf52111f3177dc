//! The structural subterm order used by the termination checker.

use crate::syntax::{Head, Term};

/// Termination orders over input argument positions (indices into the input
/// context of a moded family).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TerminationOrder {
    /// A single argument decreases.
    Subterm(usize),
    /// Lexicographic combination.
    Lex(Vec<usize>),
    /// Simultaneous: no argument grows and at least one shrinks.
    Simul(Vec<usize>),
}

impl TerminationOrder {
    pub fn positions(&self) -> Vec<usize> {
        match self {
            TerminationOrder::Subterm(i) => vec![*i],
            TerminationOrder::Lex(is) | TerminationOrder::Simul(is) => is.clone(),
        }
    }
}

/// Strict structural subterm: descends through spines of rigid heads
/// (constants and bound variables) and under binders. Binder bodies are
/// compared without renaming, so a bound variable may be "captured" by the
/// enclosing pattern; this cannot make a well-typed comparison succeed
/// wrongly because the terms being compared are arguments of the same
/// clause head.
///
/// Spines headed by a free variable are deliberately opaque: instantiating
/// the head can collapse the spine (`X N` becomes `z` under `X := [u] z`),
/// so descending through it would not survive substitution. Keeping to
/// rigid spines makes the order stable: `m < n` implies `m[s] < n[s]` for
/// every substitution `s`.
pub fn subterm_less(m: &Term, n: &Term) -> bool {
    match n {
        Term::App(Head::Free(_), _) => false,
        Term::App(_, sp) => sp.iter().any(|arg| subterm_le(m, arg)),
        Term::Lam(_, body) => subterm_le(m, body),
        _ => false,
    }
}

/// Non-strict subterm: equality or strict subterm.
pub fn subterm_le(m: &Term, n: &Term) -> bool {
    m == n || subterm_less(m, n)
}

/// Compare argument tuples under a termination order. `lhs` are the premise
/// call's arguments at the order's positions, `rhs` the head's, in the same
/// positional order as `order.positions()`.
pub fn order_decreases(order: &TerminationOrder, lhs: &[Term], rhs: &[Term]) -> bool {
    match order {
        TerminationOrder::Subterm(_) => subterm_less(&lhs[0], &rhs[0]),
        TerminationOrder::Lex(_) => {
            for (l, r) in lhs.iter().zip(rhs) {
                if subterm_less(l, r) {
                    return true;
                }
                if l != r {
                    return false;
                }
            }
            false
        }
        TerminationOrder::Simul(_) => {
            let mut strict = false;
            for (l, r) in lhs.iter().zip(rhs) {
                if subterm_less(l, r) {
                    strict = true;
                } else if l != r {
                    return false;
                }
            }
            strict
        }
    }
}
