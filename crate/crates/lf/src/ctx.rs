//! Contexts: ordered lists of typed free variables.

use std::fmt;

use crate::subst::Substitution;
use crate::syntax::{Name, Term};

/// `x1 : A1, ..., xn : An` with distinct names; each classifier may mention
/// only the variables before it.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Context {
    entries: Vec<(Name, Term)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Term)>) -> Context {
        Context {
            entries: pairs.into_iter().collect(),
        }
    }

    pub fn push(&mut self, x: Name, a: Term) {
        self.entries.push((x, a));
    }

    pub fn lookup(&self, x: &Name) -> Option<&Term> {
        self.entries.iter().find(|(y, _)| y == x).map(|(_, a)| a)
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.lookup(x).is_some()
    }

    pub fn position(&self, x: &Name) -> Option<usize> {
        self.entries.iter().position(|(y, _)| y == x)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (Name, Term)> {
        self.entries.iter()
    }

    pub fn get(&self, i: usize) -> Option<&(Name, Term)> {
        self.entries.get(i)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(x, _)| x)
    }

    pub fn extended(&self, other: &Context) -> Context {
        let mut out = self.clone();
        out.entries.extend(other.entries.iter().cloned());
        out
    }

    /// Apply a substitution to every classifier. Entries themselves are kept;
    /// callers drop instantiated variables separately.
    pub fn apply_subst(&self, s: &Substitution) -> Context {
        Context {
            entries: self
                .entries
                .iter()
                .map(|(x, a)| (x.clone(), s.apply(a)))
                .collect(),
        }
    }

    /// Remove the named entry, returning the prefix before it, its
    /// classifier, and the suffix after it.
    pub fn split_at_name(&self, x: &Name) -> Option<(Context, Term, Context)> {
        let i = self.position(x)?;
        let before = Context {
            entries: self.entries[..i].to_vec(),
        };
        let after = Context {
            entries: self.entries[i + 1..].to_vec(),
        };
        Some((before, self.entries[i].1.clone(), after))
    }

    pub fn names_distinct(&self) -> bool {
        for (i, (x, _)) in self.entries.iter().enumerate() {
            if self.entries[i + 1..].iter().any(|(y, _)| y == x) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, a)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} : {a}")?;
        }
        Ok(())
    }
}

impl FromIterator<(Name, Term)> for Context {
    fn from_iter<T: IntoIterator<Item = (Name, Term)>>(iter: T) -> Context {
        Context::from_pairs(iter)
    }
}
