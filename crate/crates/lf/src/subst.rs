//! Substitutions for free variables.
//!
//! A substitution is a finite map from names to locally closed terms,
//! applied simultaneously, and read as the identity outside its domain.
//! Identity bindings `x := x` are dropped on construction so that equality
//! of substitutions is meaningful in tests and serialized certificates.

use std::fmt;

use crate::syntax::{Head, Name, Term};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Substitution {
    bindings: Vec<(Name, Term)>,
}

fn is_identity(x: &Name, t: &Term) -> bool {
    matches!(t.as_plain_free(), Some(y) if y == x)
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    pub fn singleton(x: &Name, t: Term) -> Substitution {
        let mut s = Substitution::identity();
        s.bind(x.clone(), t);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Term)>) -> Substitution {
        let mut s = Substitution::identity();
        for (x, t) in pairs {
            s.bind(x, t);
        }
        s
    }

    /// Add a binding. Panics on a duplicate name: substitutions are built
    /// binding-by-binding from fresh problems, so a duplicate is a bug.
    pub fn bind(&mut self, x: Name, t: Term) {
        assert!(
            self.get(&x).is_none(),
            "duplicate binding for {x} in substitution"
        );
        if !is_identity(&x, &t) {
            self.bindings.push((x, t));
        }
    }

    pub fn get(&self, x: &Name) -> Option<&Term> {
        self.bindings.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.bindings.iter().map(|(x, t)| (x, t))
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.bindings.iter().map(|(x, _)| x)
    }

    /// Apply the substitution. Beta-redexes created at substituted heads are
    /// contracted hereditarily, so canonical input stays canonical whenever
    /// the instance is well-typed.
    pub fn apply(&self, t: &Term) -> Term {
        if self.is_empty() {
            return t.clone();
        }
        match t {
            Term::Type => Term::Type,
            Term::Pi(a, b) => Term::pi(self.apply(a), self.apply(b)),
            Term::Lam(a, b) => Term::lam(self.apply(a), self.apply(b)),
            Term::App(h, sp) => {
                let sp: Vec<Term> = sp.iter().map(|u| self.apply(u)).collect();
                match h {
                    Head::Free(x) => match self.get(x) {
                        Some(img) => img.clone().apply(sp),
                        None => Term::App(h.clone(), sp),
                    },
                    other => Term::App(other.clone(), sp),
                }
            }
            Term::Redex(f, sp) => self
                .apply(f)
                .apply(sp.iter().map(|u| self.apply(u)).collect::<Vec<_>>()),
        }
    }

    /// Composition: `apply(t, s1.compose(s2)) == apply(apply(t, s1), s2)`
    /// for every term `t`. The domain is the union of both domains; the
    /// identity padding outside `dom(s1)` is materialized, so in particular
    /// `identity.compose(s) == s`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::identity();
        for (x, m) in &self.bindings {
            let m = other.apply(m);
            if !is_identity(x, &m) {
                out.bindings.push((x.clone(), m));
            }
        }
        for (y, n) in &other.bindings {
            if self.get(y).is_none() {
                out.bindings.push((y.clone(), n.clone()));
            }
        }
        out
    }

    /// Keep only the bindings whose names satisfy the predicate.
    pub fn restrict(&self, keep: impl Fn(&Name) -> bool) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(x, _)| keep(x))
                .cloned()
                .collect(),
        }
    }

    /// If every image is (an eta-expansion of) a free variable, return the
    /// name map. Used to recognize renaming substitutions.
    pub fn as_var_map(&self) -> Option<Vec<(Name, Name)>> {
        let mut out = Vec::new();
        for (x, t) in &self.bindings {
            match t.as_eta_head() {
                Some(Head::Free(y)) => out.push((x.clone(), y)),
                _ => return None,
            }
        }
        Some(out)
    }

    /// A renaming maps variables to variables with pairwise distinct images.
    /// (Injectivity against variables the substitution leaves fixed is up to
    /// the caller, which knows the relevant domain.)
    pub fn is_renaming(&self) -> bool {
        match self.as_var_map() {
            None => false,
            Some(map) => {
                let mut seen: Vec<Name> = Vec::new();
                for (_, y) in map {
                    if seen.contains(&y) {
                        return false;
                    }
                    seen.push(y);
                }
                true
            }
        }
    }
}

/// Free-function form, to mirror the kernel interface naming.
pub fn apply_subst(t: &Term, s: &Substitution) -> Term {
    s.apply(t)
}

pub fn compose_subst(s1: &Substitution, s2: &Substitution) -> Substitution {
    s1.compose(s2)
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (x, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}/{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::name;

    fn v(s: &str) -> Term {
        Term::var(&name(s))
    }

    fn c(s: &str) -> Term {
        Term::cnst(&name(s))
    }

    #[test]
    fn identity_bindings_are_dropped() {
        let s = Substitution::from_pairs([(name("x"), v("x"))]);
        assert!(s.is_empty());
    }

    #[test]
    fn compose_is_extension_on_identity() {
        let theta = Substitution::from_pairs([(name("y"), c("c"))]);
        assert_eq!(Substitution::identity().compose(&theta), theta);
    }

    #[test]
    fn compose_matches_sequential_application() {
        // ((app y y)/x) composed with (c/y) is ((app c c)/x, c/y).
        let app_yy = Term::App(Head::Const(name("app")), vec![v("y"), v("y")]);
        let s1 = Substitution::from_pairs([(name("x"), app_yy)]);
        let s2 = Substitution::from_pairs([(name("y"), c("c"))]);
        let s12 = s1.compose(&s2);
        let t = Term::App(Head::Const(name("pair")), vec![v("x"), v("y")]);
        assert_eq!(s12.apply(&t), s2.apply(&s1.apply(&t)));
        assert_eq!(
            s12,
            Substitution::from_pairs([
                (
                    name("x"),
                    Term::App(Head::Const(name("app")), vec![c("c"), c("c")])
                ),
                (name("y"), c("c")),
            ])
        );
    }

    #[test]
    fn apply_contracts_at_substituted_heads() {
        // x c with x := [y : tm] y reduces to c.
        let t = Term::App(Head::Free(name("x")), vec![c("c")]);
        let id = Term::lam(c("tm"), Term::bound(0));
        let s = Substitution::from_pairs([(name("x"), id)]);
        assert_eq!(s.apply(&t), c("c"));
    }

    #[test]
    fn renamings_are_injective_var_maps() {
        let r = Substitution::from_pairs([(name("x"), v("a")), (name("y"), v("b"))]);
        assert!(r.is_renaming());
        let not_inj = Substitution::from_pairs([(name("x"), v("a")), (name("y"), v("a"))]);
        assert!(!not_inj.is_renaming());
        let not_var = Substitution::from_pairs([(name("x"), c("c"))]);
        assert!(!not_var.is_renaming());
    }
}
