//! Signatures: ordered lists of family and object constant declarations.

use std::collections::HashMap;

use crate::ctx::Context;
use crate::syntax::{name, Head, Name, Supply, Term};

/// One constant declaration.
///
/// `classifier` is a kind for family constants and a family for object
/// constants, stored canonical. The remaining fields record surface-level
/// information the kernel itself does not consult but that every layer above
/// it needs: how many leading binders were implicit in the source, printable
/// hints for the binders, and which binders are operational premises for
/// backchaining (in operational order, which for clauses written with `<-`
/// is the reverse of binder order).
#[derive(Clone, PartialEq, Debug)]
pub struct Decl {
    pub name: Name,
    pub classifier: Term,
    pub is_family: bool,
    pub implicit: usize,
    pub arg_hints: Vec<Name>,
    pub premise_order: Vec<usize>,
}

impl Decl {
    /// Number of binders in the classifier's Pi-prefix.
    pub fn arity(&self) -> usize {
        let mut n = 0;
        let mut cur = &self.classifier;
        while let Term::Pi(_, b) = cur {
            n += 1;
            cur = b;
        }
        n
    }

    /// The head constant of the classifier's target (object constants), or
    /// `None` for family constants and targets of kind `type`.
    pub fn target_family(&self) -> Option<&Name> {
        let mut cur = &self.classifier;
        while let Term::Pi(_, b) = cur {
            cur = b;
        }
        match cur {
            Term::App(Head::Const(c), _) => Some(c),
            _ => None,
        }
    }

    /// Open the whole Pi-prefix with fresh variables, returning the fresh
    /// context and the instantiated target. Binder hints are used for the
    /// fresh names.
    pub fn open_prefix(&self, supply: &mut Supply) -> (Context, Term) {
        let mut ctx = Context::new();
        let mut cur = self.classifier.clone();
        let mut i = 0;
        while let Term::Pi(a, b) = cur {
            let hint: &str = self.arg_hints.get(i).map(|h| h as &str).unwrap_or("x");
            let x = supply.fresh(hint);
            cur = b.open(&Term::var(&x));
            ctx.push(x, *a);
            i += 1;
        }
        (ctx, cur)
    }

    /// Like [`Decl::open_prefix`], but the binders are named after the
    /// argument hints themselves (suffixed with a counter only on repeats)
    /// instead of drawing numbered names from a supply. The resulting names
    /// are stable across calls, which matters wherever they end up in a
    /// printed artifact.
    pub fn open_named(&self) -> (Context, Term) {
        let mut ctx = Context::new();
        let mut cur = self.classifier.clone();
        let mut i = 0;
        while let Term::Pi(a, b) = cur {
            let hint = self
                .arg_hints
                .get(i)
                .cloned()
                .unwrap_or_else(|| name("x"));
            let x = freshen_hint(&hint, &ctx);
            cur = b.open(&Term::var(&x));
            ctx.push(x, *a);
            i += 1;
        }
        (ctx, cur)
    }
}

/// Argument hints may repeat; parameter names may not.
fn freshen_hint(hint: &Name, taken: &Context) -> Name {
    if !taken.contains(hint) {
        return hint.clone();
    }
    let mut k = 1usize;
    loop {
        let cand = name(&format!("{hint}{k}"));
        if !taken.contains(&cand) {
            return cand;
        }
        k += 1;
    }
}

#[derive(Clone, Default, Debug)]
pub struct Signature {
    decls: Vec<Decl>,
    by_name: HashMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Append a declaration. Fails on name collisions.
    pub fn push(&mut self, d: Decl) -> Result<(), Name> {
        if self.by_name.contains_key(&d.name) {
            return Err(d.name);
        }
        self.by_name.insert(d.name.clone(), self.decls.len());
        self.decls.push(d);
        Ok(())
    }

    pub fn get(&self, c: &Name) -> Option<&Decl> {
        self.by_name.get(c).map(|&i| &self.decls[i])
    }

    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.decls.iter()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// Object constants whose classifier targets the given family, in
    /// declaration order. This is the clause list for backchaining and the
    /// constructor list for splitting.
    pub fn constants_for(&self, family: &Name) -> Vec<&Decl> {
        self.decls
            .iter()
            .filter(|d| !d.is_family && d.target_family() == Some(family))
            .collect()
    }
}
