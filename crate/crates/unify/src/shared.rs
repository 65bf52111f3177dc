//! Internals shared by the unifier, the matcher, and splitting.

use totem_lf::{Context, Head, Name, Term};

/// How a name occurs in a term, from the unifier's point of view. A rigid
/// occurrence survives every instantiation of the metavariables; an
/// occurrence guarded by a metavariable's argument might be erased by a
/// suitable instantiation, so nothing definite can be concluded from it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub(crate) enum Occ {
    Absent,
    FlexGuarded,
    Rigid,
}

pub(crate) fn classify_occurrence(
    t: &Term,
    is_flex: &dyn Fn(&Name) -> bool,
    hit: &dyn Fn(&Name) -> bool,
    guarded: bool,
) -> Occ {
    match t {
        Term::Type => Occ::Absent,
        Term::Pi(a, b) | Term::Lam(a, b) => classify_occurrence(a, is_flex, hit, guarded)
            .max(classify_occurrence(b, is_flex, hit, guarded)),
        Term::Redex(f, sp) => sp.iter().fold(
            classify_occurrence(f, is_flex, hit, guarded),
            |acc, arg| acc.max(classify_occurrence(arg, is_flex, hit, guarded)),
        ),
        Term::App(h, sp) => {
            let mut acc = Occ::Absent;
            let mut child_guard = guarded;
            if let Head::Free(w) = h {
                if hit(w) {
                    acc = if guarded { Occ::FlexGuarded } else { Occ::Rigid };
                }
                if is_flex(w) {
                    child_guard = true;
                }
            }
            sp.iter().fold(acc, |a, arg| {
                a.max(classify_occurrence(arg, is_flex, hit, child_guard))
            })
        }
    }
}

/// Read a spine of eta-expanded variables: every argument must be (the
/// eta-expansion of) a distinct free variable. Returns the variable names
/// in spine order.
pub(crate) fn spine_as_distinct_vars(sp: &[Term]) -> Option<Vec<Name>> {
    let mut out: Vec<Name> = Vec::with_capacity(sp.len());
    for arg in sp {
        match arg.as_eta_head()? {
            Head::Free(x) if !out.contains(&x) => out.push(x),
            _ => return None,
        }
    }
    Some(out)
}

/// Build the lambda solution `\z1...zn. rhs[zi/spine_i]` for a pattern
/// equation `X spine = rhs`. The binder domains come from `locals`, the
/// classifiers recorded when the binders were opened. Fails (with a reason)
/// when a domain depends on a variable that is not abstracted further out.
pub(crate) fn lambda_solution(
    spine: &[Name],
    rhs: &Term,
    locals: &Context,
    all_locals: &dyn Fn(&Name) -> bool,
) -> Result<Term, String> {
    let mut out = rhs.clone();
    for z in spine.iter().rev() {
        let dom = locals
            .lookup(z)
            .ok_or_else(|| format!("spine variable {z} has no recorded classifier"))?
            .clone();
        out = Term::lam(dom, out.close(z));
    }
    if !out.locally_closed() {
        return Err("pattern solution is not locally closed".to_string());
    }
    if out.free_vars().iter().any(|x| all_locals(x)) {
        return Err("pattern solution mentions a local variable outside its spine".to_string());
    }
    Ok(out)
}

/// Reorder context entries so every classifier only mentions variables
/// declared earlier (or outside the context). Stable: ties keep the input
/// order. `None` signals a dependency cycle, which well-typed inputs cannot
/// produce.
pub fn stable_topological(entries: Vec<(Name, Term)>) -> Option<Vec<(Name, Term)>> {
    let mut pending = entries;
    let mut out: Vec<(Name, Term)> = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let pick = pending.iter().position(|(_, a)| {
            a.free_vars()
                .iter()
                .all(|x| !pending.iter().any(|(y, _)| y == x) || out.iter().any(|(y, _)| y == x))
        })?;
        out.push(pending.remove(pick));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use totem_lf::fixtures::{capp, cnst, var};
    use totem_lf::name;

    #[test]
    fn occurrence_classification() {
        let flex = |x: &Name| *x == name("F") || *x == name("X");
        let hit = |x: &Name| *x == name("X");
        // X under a constant spine: rigid.
        let t = capp("s", vec![var("X")]);
        assert_eq!(classify_occurrence(&t, &flex, &hit, false), Occ::Rigid);
        // X under an argument of the metavariable F: guarded.
        let t = Term::App(Head::Free(name("F")), vec![var("X")]);
        assert_eq!(classify_occurrence(&t, &flex, &hit, false), Occ::FlexGuarded);
        // Rigid beats guarded when both occur.
        let t = capp(
            "plus",
            vec![Term::App(Head::Free(name("F")), vec![var("X")]), var("X")],
        );
        assert_eq!(classify_occurrence(&t, &flex, &hit, false), Occ::Rigid);
        let t = cnst("z");
        assert_eq!(classify_occurrence(&t, &flex, &hit, false), Occ::Absent);
    }

    #[test]
    fn topological_reordering_is_stable() {
        let entries = vec![
            (name("d"), capp("eval", vec![var("m"), var("v")])),
            (name("m"), cnst("tm")),
            (name("v"), cnst("tm")),
        ];
        let sorted = stable_topological(entries).unwrap();
        let names: Vec<_> = sorted.iter().map(|(x, _)| x.to_string()).collect();
        assert_eq!(names, vec!["m", "v", "d"]);
    }
}
