//! Bidirectional type checking and normalization to canonical form.
//!
//! All checking functions return the beta-eta-long canonical form of their
//! subject. Classifiers handed to the internal recursion are canonical; the
//! public entry points canonicalize classifier arguments first, so callers
//! may pass surface-level classifiers.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::ctx::Context;
use crate::sig::{Decl, Signature};
use crate::subst::Substitution;
use crate::syntax::{Head, Name, Term};

/// One step into a term, for error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    SpineArg(usize),
    LamDom,
    LamBody,
    PiDom,
    PiCod,
    RedexFun,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathStep::SpineArg(i) => write!(f, "arg[{i}]"),
            PathStep::LamDom => write!(f, "lam-dom"),
            PathStep::LamBody => write!(f, "lam-body"),
            PathStep::PiDom => write!(f, "pi-dom"),
            PathStep::PiCod => write!(f, "pi-cod"),
            PathStep::RedexFun => write!(f, "fun"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeErrorKind {
    #[error("unknown constant `{0}`")]
    UnknownConst(Name),
    #[error("unknown variable `{0}`")]
    UnknownVar(Name),
    #[error("expected `{expected}`, found `{found}`")]
    Mismatch { expected: Term, found: Term },
    #[error("classifier `{classifier}` is not a product, cannot apply")]
    NotAFunction { classifier: Term },
    #[error("object expected, found `{found}`")]
    ObjectExpected { found: Term },
    #[error("family expected, found `{found}`")]
    FamilyExpected { found: Term },
    #[error("kind expected, found `{found}`")]
    KindExpected { found: Term },
    #[error("family constant `{0}` used in object position")]
    FamilyInObjectPosition(Name),
    #[error("object constant `{0}` used in family position")]
    ObjectInFamilyPosition(Name),
    #[error("abstraction checked against atomic classifier `{classifier}`")]
    LambdaAtAtomic { classifier: Term },
    #[error("duplicate name `{0}`")]
    DuplicateName(Name),
    #[error("loose bound variable")]
    LooseBound,
}

/// A typing error: the rule that failed, the path from the checked term to
/// the offending subterm, and what went wrong there.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct TypeError {
    pub rule: &'static str,
    pub path: Vec<PathStep>,
    pub kind: TypeErrorKind,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.rule)?;
        if !self.path.is_empty() {
            let steps: Vec<String> = self.path.iter().map(|s| s.to_string()).collect();
            write!(f, "at {}: ", steps.join("."))?;
        }
        write!(f, "{}", self.kind)
    }
}

impl TypeError {
    fn new(rule: &'static str, kind: TypeErrorKind) -> TypeError {
        TypeError {
            rule,
            path: Vec::new(),
            kind,
        }
    }
}

fn at<T>(step: PathStep, r: Result<T, TypeError>) -> Result<T, TypeError> {
    r.map_err(|mut e| {
        e.path.insert(0, step);
        e
    })
}

struct Tc<'a> {
    sig: &'a Signature,
    ctx: &'a Context,
    /// Classifiers of bound variables, innermost last; each entry is stored
    /// as it was valid when pushed and shifted on lookup.
    stack: Vec<Term>,
}

impl<'a> Tc<'a> {
    fn new(sig: &'a Signature, ctx: &'a Context) -> Tc<'a> {
        Tc {
            sig,
            ctx,
            stack: Vec::new(),
        }
    }

    fn bound_classifier(&self, i: u32) -> Result<Term, TypeError> {
        let idx = self
            .stack
            .len()
            .checked_sub(1 + i as usize)
            .ok_or_else(|| TypeError::new("obj-var", TypeErrorKind::LooseBound))?;
        Ok(self.stack[idx].shift(i as i32 + 1, 0))
    }

    fn object_head_classifier(&self, h: &Head) -> Result<Term, TypeError> {
        match h {
            Head::Const(c) => {
                let d: &Decl = self.sig.get(c).ok_or_else(|| {
                    TypeError::new("obj-const", TypeErrorKind::UnknownConst(c.clone()))
                })?;
                if d.is_family {
                    return Err(TypeError::new(
                        "obj-const",
                        TypeErrorKind::FamilyInObjectPosition(c.clone()),
                    ));
                }
                Ok(d.classifier.shift(self.stack.len() as i32, 0))
            }
            Head::Free(x) => {
                let a = self.ctx.lookup(x).ok_or_else(|| {
                    TypeError::new("obj-var", TypeErrorKind::UnknownVar(x.clone()))
                })?;
                Ok(a.shift(self.stack.len() as i32, 0))
            }
            Head::Bound(i) => self.bound_classifier(*i),
        }
    }

    /// Check spine arguments against a Pi-telescope, returning the canonical
    /// arguments and the instantiated result classifier.
    fn fold_spine(
        &mut self,
        rule: &'static str,
        mut classifier: Term,
        spine: &[Term],
    ) -> Result<(Vec<Term>, Term), TypeError> {
        let mut out = Vec::with_capacity(spine.len());
        for (i, arg) in spine.iter().enumerate() {
            match classifier {
                Term::Pi(dom, cod) => {
                    let arg = at(PathStep::SpineArg(i), self.check_object(arg, &dom))?;
                    classifier = cod.open(&arg);
                    out.push(arg);
                }
                other => {
                    return Err(TypeError::new(
                        rule,
                        TypeErrorKind::NotAFunction { classifier: other },
                    ))
                }
            }
        }
        Ok((out, classifier))
    }

    fn infer_object(&mut self, t: &Term) -> Result<(Term, Term), TypeError> {
        match t {
            Term::App(h, sp) => {
                let a0 = self.object_head_classifier(h)?;
                let (sp, a) = self.fold_spine("obj-app", a0, sp)?;
                Ok((Term::App(h.clone(), sp), a))
            }
            Term::Redex(f, sp) => {
                let (f, a0) = at(PathStep::RedexFun, self.infer_object(f))?;
                let (sp, a) = self.fold_spine("obj-app", a0, sp)?;
                Ok((f.apply(sp), a))
            }
            Term::Lam(dom, body) => {
                let dom = at(PathStep::LamDom, self.check_family(dom, &Term::Type))?;
                self.stack.push(dom.clone());
                let r = self.infer_object(body);
                self.stack.pop();
                let (body, bty) = at(PathStep::LamBody, r)?;
                Ok((Term::lam(dom.clone(), body), Term::pi(dom, bty)))
            }
            other => Err(TypeError::new(
                "obj-infer",
                TypeErrorKind::ObjectExpected {
                    found: other.clone(),
                },
            )),
        }
    }

    /// `classifier` must be canonical.
    fn check_object(&mut self, t: &Term, classifier: &Term) -> Result<Term, TypeError> {
        match classifier {
            Term::Pi(dom, cod) => match t {
                Term::Lam(tdom, body) => {
                    let tdom = at(PathStep::LamDom, self.check_family(tdom, &Term::Type))?;
                    if tdom != **dom {
                        return Err(TypeError::new(
                            "obj-lam",
                            TypeErrorKind::Mismatch {
                                expected: (**dom).clone(),
                                found: tdom,
                            },
                        ));
                    }
                    self.stack.push((**dom).clone());
                    let r = self.check_object(body, cod);
                    self.stack.pop();
                    Ok(Term::lam((**dom).clone(), at(PathStep::LamBody, r)?))
                }
                Term::Type | Term::Pi(..) => Err(TypeError::new(
                    "obj-lam",
                    TypeErrorKind::ObjectExpected { found: t.clone() },
                )),
                _ => {
                    // Eta-expand a head form against the product.
                    let arg = Term::bound(0).eta_expand_at(&dom.shift(1, 0));
                    let expanded = t.shift(1, 0).apply(vec![arg]);
                    self.stack.push((**dom).clone());
                    let r = self.check_object(&expanded, cod);
                    self.stack.pop();
                    Ok(Term::lam((**dom).clone(), r?))
                }
            },
            _ => {
                let (t, a) = self.infer_object(t)?;
                if a == *classifier {
                    Ok(t)
                } else {
                    Err(TypeError::new(
                        "obj-atom",
                        TypeErrorKind::Mismatch {
                            expected: classifier.clone(),
                            found: a,
                        },
                    ))
                }
            }
        }
    }

    fn infer_family(&mut self, t: &Term) -> Result<(Term, Term), TypeError> {
        match t {
            Term::App(h, sp) => {
                let c = match h {
                    Head::Const(c) => c,
                    _ => {
                        return Err(TypeError::new(
                            "fam-app",
                            TypeErrorKind::FamilyExpected { found: t.clone() },
                        ))
                    }
                };
                let d = self.sig.get(c).ok_or_else(|| {
                    TypeError::new("fam-app", TypeErrorKind::UnknownConst(c.clone()))
                })?;
                if !d.is_family {
                    return Err(TypeError::new(
                        "fam-app",
                        TypeErrorKind::ObjectInFamilyPosition(c.clone()),
                    ));
                }
                let k0 = d.classifier.shift(self.stack.len() as i32, 0);
                let (sp, k) = self.fold_spine("fam-app", k0, sp)?;
                Ok((Term::App(h.clone(), sp), k))
            }
            Term::Lam(dom, body) => {
                let dom = at(PathStep::LamDom, self.check_family(dom, &Term::Type))?;
                self.stack.push(dom.clone());
                let r = self.infer_family(body);
                self.stack.pop();
                let (body, k) = at(PathStep::LamBody, r)?;
                Ok((Term::lam(dom.clone(), body), Term::pi(dom, k)))
            }
            Term::Redex(f, sp) => {
                let (f, k0) = at(PathStep::RedexFun, self.infer_family(f))?;
                let (sp, k) = self.fold_spine("fam-app", k0, sp)?;
                Ok((f.apply(sp), k))
            }
            other => Err(TypeError::new(
                "fam-infer",
                TypeErrorKind::FamilyExpected {
                    found: other.clone(),
                },
            )),
        }
    }

    /// `kind` must be canonical.
    fn check_family(&mut self, t: &Term, kind: &Term) -> Result<Term, TypeError> {
        match (t, kind) {
            (Term::Pi(a, b), Term::Type) => {
                let a = at(PathStep::PiDom, self.check_family(a, &Term::Type))?;
                self.stack.push(a.clone());
                let r = self.check_family(b, &Term::Type);
                self.stack.pop();
                Ok(Term::pi(a, at(PathStep::PiCod, r)?))
            }
            (Term::Pi(..), _) => Err(TypeError::new(
                "fam-pi",
                TypeErrorKind::Mismatch {
                    expected: kind.clone(),
                    found: Term::Type,
                },
            )),
            (Term::Lam(tdom, body), Term::Pi(dom, cod)) => {
                let tdom = at(PathStep::LamDom, self.check_family(tdom, &Term::Type))?;
                if tdom != **dom {
                    return Err(TypeError::new(
                        "fam-lam",
                        TypeErrorKind::Mismatch {
                            expected: (**dom).clone(),
                            found: tdom,
                        },
                    ));
                }
                self.stack.push((**dom).clone());
                let r = self.check_family(body, cod);
                self.stack.pop();
                Ok(Term::lam((**dom).clone(), at(PathStep::LamBody, r)?))
            }
            (Term::Lam(..), Term::Type) => Err(TypeError::new(
                "fam-lam",
                TypeErrorKind::LambdaAtAtomic {
                    classifier: Term::Type,
                },
            )),
            (_, Term::Pi(dom, cod)) => {
                // Eta-expand a family of product kind.
                let arg = Term::bound(0).eta_expand_at(&dom.shift(1, 0));
                let expanded = t.shift(1, 0).apply(vec![arg]);
                self.stack.push((**dom).clone());
                let r = self.check_family(&expanded, cod);
                self.stack.pop();
                Ok(Term::lam((**dom).clone(), r?))
            }
            _ => {
                let (t, k) = self.infer_family(t)?;
                if k == *kind {
                    Ok(t)
                } else {
                    Err(TypeError::new(
                        "fam-atom",
                        TypeErrorKind::Mismatch {
                            expected: kind.clone(),
                            found: k,
                        },
                    ))
                }
            }
        }
    }

    fn check_kind(&mut self, k: &Term) -> Result<Term, TypeError> {
        match k {
            Term::Type => Ok(Term::Type),
            Term::Pi(a, b) => {
                let a = at(PathStep::PiDom, self.check_family(a, &Term::Type))?;
                self.stack.push(a.clone());
                let r = self.check_kind(b);
                self.stack.pop();
                Ok(Term::pi(a, at(PathStep::PiCod, r)?))
            }
            other => Err(TypeError::new(
                "kind",
                TypeErrorKind::KindExpected {
                    found: other.clone(),
                },
            )),
        }
    }
}

/// Peel the Pi-prefix of a classifier and return its target.
pub fn target_of(t: &Term) -> &Term {
    let mut cur = t;
    while let Term::Pi(_, b) = cur {
        cur = b;
    }
    cur
}

/// Is the classifier a kind (i.e. does its target reach `type`)?
pub fn classifier_is_kind(t: &Term) -> bool {
    matches!(target_of(t), Term::Type)
}

pub fn infer_object(ctx: &Context, sig: &Signature, t: &Term) -> Result<(Term, Term), TypeError> {
    Tc::new(sig, ctx).infer_object(t)
}

/// Check an object against a family; the family is canonicalized first.
/// Returns the canonical form of the object.
pub fn check_object(
    ctx: &Context,
    sig: &Signature,
    t: &Term,
    classifier: &Term,
) -> Result<Term, TypeError> {
    let mut tc = Tc::new(sig, ctx);
    let classifier = tc.check_family(classifier, &Term::Type)?;
    tc.check_object(t, &classifier)
}

/// Check a family against a kind; the kind is canonicalized first.
pub fn check_family(ctx: &Context, sig: &Signature, t: &Term, kind: &Term) -> Result<Term, TypeError> {
    let mut tc = Tc::new(sig, ctx);
    let kind = tc.check_kind(kind)?;
    tc.check_family(t, &kind)
}

pub fn check_kind(ctx: &Context, sig: &Signature, k: &Term) -> Result<Term, TypeError> {
    Tc::new(sig, ctx).check_kind(k)
}

/// Normalize a term of any level to canonical form, inferring which level it
/// lives at from its shape and head.
pub fn normalize(ctx: &Context, sig: &Signature, t: &Term) -> Result<Term, TypeError> {
    let mut tc = Tc::new(sig, ctx);
    if term_is_kind(sig, t) {
        return tc.check_kind(t);
    }
    if term_is_family(sig, t) {
        if let Term::Pi(..) = t {
            return tc.check_family(t, &Term::Type);
        }
        let (_, k) = tc.infer_family(t)?;
        return tc.check_family(t, &k);
    }
    let (_, a) = tc.infer_object(t)?;
    tc.check_object(t, &a)
}

fn term_is_kind(_sig: &Signature, t: &Term) -> bool {
    matches!(target_of(t), Term::Type)
}

fn term_is_family(sig: &Signature, t: &Term) -> bool {
    // Find the eventual head constant under the Pi/Lam/Redex structure.
    let mut cur = target_of(t);
    loop {
        match cur {
            Term::Lam(_, b) => cur = b,
            Term::Redex(f, _) => cur = f,
            Term::Pi(_, b) => cur = b,
            Term::App(Head::Const(c), _) => {
                return sig.get(c).map(|d| d.is_family).unwrap_or(false)
            }
            _ => return false,
        }
    }
}

/// Alpha-equivalence of canonical forms is structural equality.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    t1 == t2
}

/// Definitional equality at a classifier: normalize both sides against it
/// and compare. The classifier may be a family (for objects) or a kind (for
/// families).
pub fn equal(
    ctx: &Context,
    sig: &Signature,
    t1: &Term,
    t2: &Term,
    classifier: &Term,
) -> Result<bool, TypeError> {
    let (n1, n2) = if classifier_is_kind(classifier) {
        (
            check_family(ctx, sig, t1, classifier)?,
            check_family(ctx, sig, t2, classifier)?,
        )
    } else {
        (
            check_object(ctx, sig, t1, classifier)?,
            check_object(ctx, sig, t2, classifier)?,
        )
    };
    Ok(n1 == n2)
}

/// Validate a context: distinct names, each classifier a family over the
/// prefix. Returns the canonicalized context.
pub fn check_context(sig: &Signature, ctx: &Context) -> Result<Context, TypeError> {
    let mut out = Context::new();
    for (x, a) in ctx.iter() {
        if out.contains(x) {
            return Err(TypeError::new(
                "ctx",
                TypeErrorKind::DuplicateName(x.clone()),
            ));
        }
        let a = check_family(&out, sig, a, &Term::Type)?;
        out.push(x.clone(), a);
    }
    Ok(out)
}

/// Validate a signature declaration by declaration, canonicalizing every
/// classifier. Also sanity-checks the surface bookkeeping fields.
pub fn check_signature(sig: &Signature) -> Result<Signature, TypeError> {
    let empty = Context::new();
    let mut out = Signature::new();
    for d in sig.decls() {
        let classifier = if d.is_family {
            check_kind(&empty, &out, &d.classifier)?
        } else {
            check_family(&empty, &out, &d.classifier, &Term::Type)?
        };
        let mut nd = d.clone();
        nd.classifier = classifier;
        let arity = nd.arity();
        if nd.implicit > arity
            || nd.premise_order.iter().any(|&i| i >= arity)
            || {
                let mut seen = HashSet::new();
                nd.premise_order.iter().any(|i| !seen.insert(*i))
            }
        {
            return Err(TypeError::new(
                "sig",
                TypeErrorKind::DuplicateName(nd.name.clone()),
            ));
        }
        out.push(nd)
            .map_err(|n| TypeError::new("sig", TypeErrorKind::DuplicateName(n)))?;
    }
    Ok(out)
}

/// `gamma |- s : target`: every image (with identity padding for variables
/// `target` declares but `s` does not bind) checks against the instantiated
/// classifier. Bindings for variables outside `target` are ignored.
pub fn check_subst_typing(
    gamma: &Context,
    sig: &Signature,
    s: &Substitution,
    target: &Context,
) -> Result<(), TypeError> {
    for (x, a) in target.iter() {
        let a_inst = s.apply(a);
        let img = s.get(x).cloned().unwrap_or_else(|| Term::var(x));
        check_object(gamma, sig, &img, &a_inst)?;
    }
    Ok(())
}

/// The smallest sub-context of `gamma` over which `s : target` is still
/// well-typed: variables free in some (padded) image, closed under
/// classifier dependencies.
pub fn minimal_domain_context(
    gamma: &Context,
    sig: &Signature,
    s: &Substitution,
    target: &Context,
) -> Result<Context, TypeError> {
    let mut needed: HashSet<Name> = HashSet::new();
    for (x, _) in target.iter() {
        let img = s.get(x).cloned().unwrap_or_else(|| Term::var(x));
        for v in img.free_vars() {
            needed.insert(v);
        }
    }
    // Classifier dependencies point strictly backwards, so one reverse pass
    // closes the set.
    for (x, a) in gamma.iter().rev() {
        if needed.contains(x) {
            for v in a.free_vars() {
                needed.insert(v);
            }
        }
    }
    let out: Context = gamma
        .iter()
        .filter(|(x, _)| needed.contains(x))
        .cloned()
        .collect();
    check_subst_typing(&out, sig, s, target)?;
    Ok(out)
}
