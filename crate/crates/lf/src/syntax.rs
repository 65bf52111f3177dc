//! Term syntax for the LF kernel.
//!
//! Terms are kept in a spine form: a head applied to a vector of arguments.
//! Bound variables are de Bruijn indices, free variables are names, so
//! structural equality on well-formed terms is exactly alpha-equivalence.
//! The kernel maintains the invariant that every term it hands out is in
//! beta-eta-long (canonical) form; `Redex` exists only so that non-canonical
//! input can be written down and passed to `normalize`.

use std::fmt;
use std::rc::Rc;

/// Interned-ish identifier. Cheap to clone, compares by content.
pub type Name = Rc<str>;

/// Convenience constructor for [`Name`].
pub fn name(s: &str) -> Name {
    Rc::from(s)
}

/// The head of a spine.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Head {
    /// A constant declared in the signature (object or family level).
    Const(Name),
    /// A free variable, looked up in a context.
    Free(Name),
    /// A bound variable (de Bruijn index, innermost binder is 0).
    Bound(u32),
}

/// Kinds, families and objects share one syntax; the typing rules keep the
/// levels apart.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    /// The base kind `type`.
    Type,
    /// Dependent product `{x : A} B`. The codomain binds index 0.
    Pi(Box<Term>, Box<Term>),
    /// Abstraction `[x : A] M`. The body binds index 0.
    Lam(Box<Term>, Box<Term>),
    /// A head applied to a spine of arguments (possibly empty).
    App(Head, Vec<Term>),
    /// A non-canonical application of an arbitrary term to a spine.
    /// Only ever accepted as *input*; normalization eliminates it.
    Redex(Box<Term>, Vec<Term>),
}

impl Term {
    /// Free variable `x` (empty spine).
    pub fn var(x: &Name) -> Term {
        Term::App(Head::Free(x.clone()), vec![])
    }

    /// Constant `c` (empty spine).
    pub fn cnst(c: &Name) -> Term {
        Term::App(Head::Const(c.clone()), vec![])
    }

    /// Bound variable with index `i` (empty spine).
    pub fn bound(i: u32) -> Term {
        Term::App(Head::Bound(i), vec![])
    }

    pub fn pi(dom: Term, cod: Term) -> Term {
        Term::Pi(Box::new(dom), Box::new(cod))
    }

    pub fn lam(dom: Term, body: Term) -> Term {
        Term::Lam(Box::new(dom), Box::new(body))
    }

    /// Non-dependent function space `dom -> cod`: the codomain is shifted
    /// under the new binder, which it does not mention.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        let cod = cod.shift(1, 0);
        Term::pi(dom, cod)
    }

    /// Is this spine-form with the given head and an empty spine?
    pub fn as_plain_free(&self) -> Option<&Name> {
        match self {
            Term::App(Head::Free(x), sp) if sp.is_empty() => Some(x),
            _ => None,
        }
    }

    /// Shift loose bound variables `>= cutoff` by `by`.
    pub fn shift(&self, by: i32, cutoff: u32) -> Term {
        match self {
            Term::Type => Term::Type,
            Term::Pi(a, b) => Term::pi(a.shift(by, cutoff), b.shift(by, cutoff + 1)),
            Term::Lam(a, b) => Term::lam(a.shift(by, cutoff), b.shift(by, cutoff + 1)),
            Term::App(h, sp) => {
                let sp = sp.iter().map(|t| t.shift(by, cutoff)).collect();
                let h = match h {
                    Head::Bound(i) if *i >= cutoff => Head::Bound((*i as i32 + by) as u32),
                    other => other.clone(),
                };
                Term::App(h, sp)
            }
            Term::Redex(f, sp) => Term::Redex(
                Box::new(f.shift(by, cutoff)),
                sp.iter().map(|t| t.shift(by, cutoff)).collect(),
            ),
        }
    }

    /// Hereditary substitution of `arg` for bound variable `j`.
    ///
    /// Indices above `j` are decremented; if the variable occurs at the head
    /// of a spine the substitution beta-reduces on the fly, so canonical
    /// input yields canonical output (for well-typed instances).
    pub fn subst_bound(&self, j: u32, arg: &Term) -> Term {
        match self {
            Term::Type => Term::Type,
            Term::Pi(a, b) => Term::pi(a.subst_bound(j, arg), b.subst_bound(j + 1, arg)),
            Term::Lam(a, b) => Term::lam(a.subst_bound(j, arg), b.subst_bound(j + 1, arg)),
            Term::App(h, sp) => {
                let sp: Vec<Term> = sp.iter().map(|t| t.subst_bound(j, arg)).collect();
                match h {
                    Head::Bound(i) if *i == j => arg.shift(j as i32, 0).apply(sp),
                    Head::Bound(i) if *i > j => Term::App(Head::Bound(i - 1), sp),
                    other => Term::App(other.clone(), sp),
                }
            }
            Term::Redex(f, sp) => f
                .subst_bound(j, arg)
                .apply(sp.iter().map(|t| t.subst_bound(j, arg)).collect::<Vec<_>>()),
        }
    }

    /// Open a binder body with `arg` (substitute for index 0).
    pub fn open(&self, arg: &Term) -> Term {
        self.subst_bound(0, arg)
    }

    /// Apply a term to further arguments, contracting beta-redexes
    /// hereditarily. Applying `Type` or a `Pi` is ill-formed and is left as a
    /// `Redex` for the type checker to reject.
    pub fn apply(self, args: impl IntoIterator<Item = Term>) -> Term {
        let mut cur = self;
        for a in args {
            cur = match cur {
                Term::Lam(_, b) => b.open(&a),
                Term::App(h, mut sp) => {
                    sp.push(a);
                    Term::App(h, sp)
                }
                Term::Redex(f, mut sp) => {
                    sp.push(a);
                    Term::Redex(f, sp)
                }
                other => Term::Redex(Box::new(other), vec![a]),
            };
        }
        cur
    }

    /// Abstract the free variable `x`: occurrences become bound variable 0
    /// and existing loose indices are shifted up to make room.
    pub fn close(&self, x: &Name) -> Term {
        self.close_at(x, 0)
    }

    fn close_at(&self, x: &Name, depth: u32) -> Term {
        match self {
            Term::Type => Term::Type,
            Term::Pi(a, b) => Term::pi(a.close_at(x, depth), b.close_at(x, depth + 1)),
            Term::Lam(a, b) => Term::lam(a.close_at(x, depth), b.close_at(x, depth + 1)),
            Term::App(h, sp) => {
                let sp = sp.iter().map(|t| t.close_at(x, depth)).collect();
                let h = match h {
                    Head::Free(y) if y == x => Head::Bound(depth),
                    Head::Bound(i) if *i >= depth => Head::Bound(i + 1),
                    other => other.clone(),
                };
                Term::App(h, sp)
            }
            Term::Redex(f, sp) => Term::Redex(
                Box::new(f.close_at(x, depth)),
                sp.iter().map(|t| t.close_at(x, depth)).collect(),
            ),
        }
    }

    /// Collect free variables in first-occurrence order, without duplicates.
    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.add_free_vars(&mut out);
        out
    }

    pub fn add_free_vars(&self, out: &mut Vec<Name>) {
        match self {
            Term::Type => {}
            Term::Pi(a, b) | Term::Lam(a, b) => {
                a.add_free_vars(out);
                b.add_free_vars(out);
            }
            Term::App(h, sp) => {
                if let Head::Free(x) = h {
                    if !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                for t in sp {
                    t.add_free_vars(out);
                }
            }
            Term::Redex(f, sp) => {
                f.add_free_vars(out);
                for t in sp {
                    t.add_free_vars(out);
                }
            }
        }
    }

    pub fn has_free(&self, x: &Name) -> bool {
        match self {
            Term::Type => false,
            Term::Pi(a, b) | Term::Lam(a, b) => a.has_free(x) || b.has_free(x),
            Term::App(h, sp) => {
                matches!(h, Head::Free(y) if y == x) || sp.iter().any(|t| t.has_free(x))
            }
            Term::Redex(f, sp) => f.has_free(x) || sp.iter().any(|t| t.has_free(x)),
        }
    }

    /// Does the term mention the given constant?
    pub fn has_const(&self, c: &Name) -> bool {
        match self {
            Term::Type => false,
            Term::Pi(a, b) | Term::Lam(a, b) => a.has_const(c) || b.has_const(c),
            Term::App(h, sp) => {
                matches!(h, Head::Const(d) if d == c) || sp.iter().any(|t| t.has_const(c))
            }
            Term::Redex(f, sp) => f.has_const(c) || sp.iter().any(|t| t.has_const(c)),
        }
    }

    /// True if the term contains no loose bound variables (given `depth`
    /// enclosing binders).
    pub fn locally_closed_at(&self, depth: u32) -> bool {
        match self {
            Term::Type => true,
            Term::Pi(a, b) | Term::Lam(a, b) => {
                a.locally_closed_at(depth) && b.locally_closed_at(depth + 1)
            }
            Term::App(h, sp) => {
                !matches!(h, Head::Bound(i) if *i >= depth)
                    && sp.iter().all(|t| t.locally_closed_at(depth))
            }
            Term::Redex(f, sp) => {
                f.locally_closed_at(depth) && sp.iter().all(|t| t.locally_closed_at(depth))
            }
        }
    }

    pub fn locally_closed(&self) -> bool {
        self.locally_closed_at(0)
    }

    /// Eta-expand a head-form term against a canonical classifier. The term
    /// must not be a `Lam`; spine arguments are assumed already eta-long.
    pub fn eta_expand_at(self, classifier: &Term) -> Term {
        match classifier {
            Term::Pi(a, b) => {
                let arg = Term::bound(0).eta_expand_at(&a.shift(1, 0));
                let body = self.shift(1, 0).apply(vec![arg]).eta_expand_at(b);
                Term::lam((**a).clone(), body)
            }
            _ => self,
        }
    }

    /// Strip a lambda prefix, returning the number of binders stripped and
    /// the body.
    pub fn strip_lams(&self) -> (usize, &Term) {
        let mut n = 0;
        let mut cur = self;
        while let Term::Lam(_, b) = cur {
            n += 1;
            cur = b;
        }
        (n, cur)
    }

    /// Does bound variable `k` (relative to this term) occur anywhere?
    pub fn uses_bound(&self, k: u32) -> bool {
        match self {
            Term::Type => false,
            Term::Pi(a, b) | Term::Lam(a, b) => a.uses_bound(k) || b.uses_bound(k + 1),
            Term::App(h, sp) => {
                matches!(h, Head::Bound(i) if *i == k) || sp.iter().any(|t| t.uses_bound(k))
            }
            Term::Redex(f, sp) => f.uses_bound(k) || sp.iter().any(|t| t.uses_bound(k)),
        }
    }

    /// Undo eta-expansion everywhere: `[x] m x` becomes `m` whenever `x`
    /// does not otherwise occur in `m`. Canonical forms are eta-long, which
    /// is unreadable (and unparsable without classifier information), so
    /// rendering goes through this first.
    pub fn eta_contract(&self) -> Term {
        match self {
            Term::Type => Term::Type,
            Term::Pi(a, b) => Term::pi(a.eta_contract(), b.eta_contract()),
            Term::Lam(a, b) => {
                let b = b.eta_contract();
                if let Term::App(h, sp) = &b {
                    if let Some((last, rest)) = sp.split_last() {
                        let stripped = Term::App(h.clone(), rest.to_vec());
                        if last.as_eta_head() == Some(Head::Bound(0)) && !stripped.uses_bound(0) {
                            // Index 0 is unused, so opening never places the
                            // dummy; it only unshifts the remaining indices.
                            return stripped.open(&Term::Type);
                        }
                    }
                }
                Term::Lam(Box::new(a.eta_contract()), Box::new(b))
            }
            Term::App(h, sp) => {
                Term::App(h.clone(), sp.iter().map(|t| t.eta_contract()).collect())
            }
            Term::Redex(f, sp) => Term::Redex(
                Box::new(f.eta_contract()),
                sp.iter().map(|t| t.eta_contract()).collect(),
            ),
        }
    }

    /// If the term is the eta-expansion of a variable or constant head
    /// applied to nothing — `\xs. h xs` with `xs` exactly the bound variables
    /// in order — return that head (adjusted to the outside of the prefix).
    pub fn as_eta_head(&self) -> Option<Head> {
        let (n, body) = self.strip_lams();
        let Term::App(h, sp) = body else { return None };
        if sp.len() != n {
            return None;
        }
        for (k, arg) in sp.iter().enumerate() {
            let expect = (n - 1 - k) as u32;
            match arg.as_eta_head() {
                Some(Head::Bound(i)) if i == expect => {}
                _ => return None,
            }
        }
        match h {
            Head::Bound(i) => {
                if *i >= n as u32 {
                    Some(Head::Bound(*i - n as u32))
                } else {
                    None
                }
            }
            other => Some(other.clone()),
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Const(c) => write!(f, "{c}"),
            Head::Free(x) => write!(f, "{x}"),
            Head::Bound(i) => write!(f, "#{i}"),
        }
    }
}

/// Raw structural display with de Bruijn indices. The surface crate has the
/// readable printer; this one exists for kernel-level debugging and tests.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Type => write!(f, "type"),
            Term::Pi(a, b) => write!(f, "{{_ : {a}}} {b}"),
            Term::Lam(a, b) => write!(f, "[_ : {a}] {b}"),
            Term::App(h, sp) if sp.is_empty() => write!(f, "{h}"),
            Term::App(h, sp) => {
                write!(f, "({h}")?;
                for t in sp {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Term::Redex(t, sp) => {
                write!(f, "(({t})")?;
                for a in sp {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A deterministic supply of fresh names. Generated names use a `#` suffix,
/// which the surface syntax refuses in user declarations, so they can never
/// collide with declared names.
#[derive(Debug, Default, Clone)]
pub struct Supply {
    next: u64,
}

impl Supply {
    pub fn new() -> Supply {
        Supply { next: 0 }
    }

    /// Start numbering above `n` (used when reading back files that already
    /// contain generated names).
    pub fn starting_at(n: u64) -> Supply {
        Supply { next: n }
    }

    pub fn fresh(&mut self, hint: &str) -> Name {
        let base = match hint.find('#') {
            Some(i) if i > 0 => &hint[..i],
            _ if hint.is_empty() => "x",
            _ => hint,
        };
        self.next += 1;
        name(&format!("{}#{}", base, self.next))
    }
}
