//! The LF kernel: canonical terms, hereditary substitution, signatures,
//! contexts, bidirectional typing, and the structural subterm order.
//!
//! Everything above this crate (unification, coverage, proof terms) builds
//! on the invariant established here: terms the kernel hands out are in
//! beta-eta-long canonical form, and structural equality on them is
//! alpha-equivalence.

pub mod ctx;
pub mod fixtures;
pub mod gen;
pub mod sig;
pub mod subst;
pub mod subterm;
pub mod syntax;
pub mod typing;

pub use ctx::Context;
pub use sig::{Decl, Signature};
pub use subst::{apply_subst, compose_subst, Substitution};
pub use subterm::{order_decreases, subterm_le, subterm_less, TerminationOrder};
pub use syntax::{name, Head, Name, Supply, Term};
pub use typing::{
    alpha_eq, check_context, check_family, check_kind, check_object, check_signature,
    check_subst_typing, equal, infer_object, minimal_domain_context, normalize, PathStep,
    TypeError, TypeErrorKind,
};
