//! Strict occurrences of metavariables.
//!
//! An occurrence of a variable `v` in a canonical term counts as *strict*
//! when it is not buried inside an argument of some metavariable and its own
//! arguments are distinct bound variables (up to eta-expansion). Strict
//! occurrences are the ones that matching can invert deterministically, so
//! mode analysis only treats a variable as known once it has appeared
//! strictly somewhere.

use totem_lf::{Context, Head, Name, Term};

/// Which names count as metavariables during the analysis. Everything else
/// that appears free is treated as a rigid parameter (it behaves like a
/// constant).
#[derive(Clone, Copy)]
pub struct MetaView<'a> {
    metas: &'a [Name],
}

impl<'a> MetaView<'a> {
    pub fn of(metas: &'a [Name]) -> MetaView<'a> {
        MetaView { metas }
    }

    fn is_meta(&self, x: &Name) -> bool {
        self.metas.iter().any(|m| m == x)
    }
}

/// A spine argument usable in a strict occurrence: a bound variable or a
/// rigid parameter, possibly eta-expanded.
#[derive(PartialEq, Eq, Clone, Debug)]
enum SpineVar {
    Bound(u32),
    Param(Name),
}

fn spine_var(arg: &Term, view: MetaView) -> Option<SpineVar> {
    match arg.as_eta_head()? {
        Head::Bound(i) => Some(SpineVar::Bound(i)),
        Head::Free(x) if !view.is_meta(&x) => Some(SpineVar::Param(x)),
        _ => None,
    }
}

fn distinct_spine(args: &[Term], view: MetaView) -> bool {
    let mut seen: Vec<SpineVar> = Vec::with_capacity(args.len());
    for arg in args {
        match spine_var(arg, view) {
            Some(v) if !seen.contains(&v) => seen.push(v),
            _ => return false,
        }
    }
    true
}

fn strict_in(t: &Term, v: &Name, view: MetaView) -> bool {
    match t {
        Term::Type => false,
        Term::Pi(a, b) | Term::Lam(a, b) => strict_in(a, v, view) || strict_in(b, v, view),
        Term::Redex(f, sp) => strict_in(f, v, view) || sp.iter().any(|a| strict_in(a, v, view)),
        Term::App(h, sp) => match h {
            Head::Free(w) if view.is_meta(w) => {
                // Arguments of a metavariable are opaque: occurrences inside
                // them do not count, and the head itself only counts when the
                // spine is a list of distinct variables.
                w == v && distinct_spine(sp, view)
            }
            _ => sp.iter().any(|a| strict_in(a, v, view)),
        },
    }
}

/// Does `v` occur strictly in `t`, treating every free variable as a
/// metavariable? This is the right view for closed clause bodies, where
/// locally bound variables are still de Bruijn indices.
pub fn strict_occurrence_exists(t: &Term, v: &Name) -> bool {
    let all = t.free_vars();
    strict_in(t, v, MetaView::of(&all))
}

/// Does `v` occur strictly in `t` when exactly the variables of `metas`
/// count as metavariables? Free variables outside `metas` are rigid
/// parameters and may serve as spine arguments.
pub fn strict_occurrence_among(t: &Term, v: &Name, metas: &[Name]) -> bool {
    strict_in(t, v, MetaView::of(metas))
}

/// True iff every variable in `freevars` has at least one strict occurrence
/// in `t` (all free variables of `t` are treated as metavariables).
pub fn is_strict_term(t: &Term, freevars: &[Name]) -> bool {
    freevars.iter().all(|v| strict_occurrence_exists(t, v))
}

/// The subset of `metas` that occurs strictly in `t`, in context order.
pub fn strict_vars(t: &Term, metas: &Context) -> Vec<Name> {
    let names: Vec<Name> = metas.names().cloned().collect();
    names
        .iter()
        .filter(|v| strict_in(t, v, MetaView::of(&names)))
        .cloned()
        .collect()
}
