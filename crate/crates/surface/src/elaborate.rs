//! Elaboration of parsed declarations into kernel declarations.
//!
//! Reconstruction is deliberately first-order: implicit parameters, `_`
//! holes and `?name` holes are solved by unifying the classifiers of the
//! constants they are applied to against the classifiers expected at each
//! position. Anything that would require guessing a function — a hole in a
//! classifier position, an implicit variable applied before its classifier
//! is known, a binder without an annotation — is refused with
//! [`ElabError::ReconstructionAmbiguous`] instead of being searched for.

use thiserror::Error;

use totem_lf::typing::{check_context, check_family, check_kind};
use totem_lf::{name, Context, Decl, Head, Name, Signature, Substitution, Supply, Term};
use totem_unify::{stable_topological, unify, UnifOutcome, UnifProblem};

use crate::ast::{ModeDecl, OrderSpec, SDecl, STerm, SourceFile, TotalDecl};
use crate::lex::Span;
use crate::parse::parse_term;

/// The result of elaborating a whole source file: a kernel-checked
/// signature plus the mode and totality directives, still in surface form
/// (the totality checker consumes them; the printer echoes them back).
#[derive(Clone, Debug)]
pub struct Elaborated {
    pub signature: Signature,
    pub modes: Vec<ModeDecl>,
    pub totals: Vec<TotalDecl>,
}

/// A query `D : A` elaborated against a signature: the free uppercase
/// variables of `A` become the query variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub name: Name,
    pub vars: Context,
    pub goal: Term,
}

/// A `%total` directive with its order resolved to explicit argument
/// positions of the subject family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedTotal {
    pub family: Name,
    pub order: ExplicitOrder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExplicitOrder {
    Subterm(usize),
    Lex(Vec<usize>),
    Simul(Vec<usize>),
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ElabError {
    #[error("{span}: undeclared identifier `{name}`")]
    Undeclared { name: String, span: Span },
    #[error("{span}: type reconstruction is ambiguous: {reason}")]
    ReconstructionAmbiguous { reason: String, span: Span },
    #[error("{span}: classifier mismatch: expected `{expected}`, found `{found}`")]
    Mismatch {
        expected: String,
        found: String,
        span: Span,
    },
    #[error("{span}: {msg}")]
    Invalid { msg: String, span: Span },
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("declaration `{decl}` was rejected by the kernel: {message}")]
    Kernel { decl: String, message: String },
    #[error("{span}: %{directive} {subject}: {msg}")]
    BadDirective {
        directive: String,
        subject: String,
        msg: String,
        span: Span,
    },
}

fn ambiguous(reason: impl Into<String>, span: Span) -> ElabError {
    ElabError::ReconstructionAmbiguous {
        reason: reason.into(),
        span,
    }
}

fn invalid(msg: impl Into<String>, span: Span) -> ElabError {
    ElabError::Invalid {
        msg: msg.into(),
        span,
    }
}

/// Identifiers that stand for implicitly bound variables: leading
/// uppercase letter or underscore, as in Twelf.
fn is_variable_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
}

pub fn elaborate_file(file: &SourceFile) -> Result<Elaborated, ElabError> {
    let mut sig = Signature::new();
    let mut modes: Vec<ModeDecl> = Vec::new();
    let mut totals: Vec<TotalDecl> = Vec::new();
    for d in &file.decls {
        match d {
            SDecl::Const {
                name: n,
                classifier,
                span,
            } => {
                if sig.get(&name(n)).is_some() {
                    return Err(ElabError::Duplicate(n.clone()));
                }
                if is_variable_name(n) {
                    return Err(invalid(
                        format!("`{n}` cannot be declared: uppercase names are variables"),
                        *span,
                    ));
                }
                let decl = DeclElab::new(&sig).elab_decl(n, classifier, *span)?;
                sig.push(decl)
                    .map_err(|x| ElabError::Duplicate(x.to_string()))?;
            }
            SDecl::Mode(m) => {
                let d = family_decl(&sig, &m.family, "mode", m.span)?;
                let explicit = d.arity() - d.implicit;
                if m.args.len() != explicit {
                    return Err(ElabError::BadDirective {
                        directive: "mode".into(),
                        subject: m.family.clone(),
                        msg: format!(
                            "family has {explicit} explicit arguments but {} were given",
                            m.args.len()
                        ),
                        span: m.span,
                    });
                }
                if modes.iter().any(|prev| prev.family == m.family) {
                    return Err(ElabError::BadDirective {
                        directive: "mode".into(),
                        subject: m.family.clone(),
                        msg: "this family already has a mode".into(),
                        span: m.span,
                    });
                }
                modes.push(m.clone());
            }
            SDecl::Total(t) => {
                let d = family_decl(&sig, &t.family, "total", t.span)?;
                let explicit = d.arity() - d.implicit;
                if t.args.len() != explicit {
                    return Err(ElabError::BadDirective {
                        directive: "total".into(),
                        subject: t.family.clone(),
                        msg: format!(
                            "family has {explicit} explicit arguments but {} were given",
                            t.args.len()
                        ),
                        span: t.span,
                    });
                }
                resolve_total_positions(t)?;
                totals.push(t.clone());
            }
        }
    }
    Ok(Elaborated {
        signature: sig,
        modes,
        totals,
    })
}

fn family_decl<'s>(
    sig: &'s Signature,
    fam: &str,
    directive: &str,
    span: Span,
) -> Result<&'s Decl, ElabError> {
    match sig.get(&name(fam)) {
        Some(d) if d.is_family => Ok(d),
        Some(_) => Err(ElabError::BadDirective {
            directive: directive.into(),
            subject: fam.into(),
            msg: "not a type family".into(),
            span,
        }),
        None => Err(ElabError::BadDirective {
            directive: directive.into(),
            subject: fam.into(),
            msg: "family is not declared".into(),
            span,
        }),
    }
}

/// Map the order variables of a `%total` directive to explicit argument
/// positions of its family.
pub fn resolve_total(sig: &Signature, td: &TotalDecl) -> Result<ResolvedTotal, ElabError> {
    family_decl(sig, &td.family, "total", td.span)?;
    let order = resolve_total_positions(td)?;
    Ok(ResolvedTotal {
        family: name(&td.family),
        order,
    })
}

fn resolve_total_positions(td: &TotalDecl) -> Result<ExplicitOrder, ElabError> {
    let pos = |v: &str| -> Result<usize, ElabError> {
        td.args
            .iter()
            .position(|a| a.as_deref() == Some(v))
            .ok_or_else(|| ElabError::BadDirective {
                directive: "total".into(),
                subject: td.family.clone(),
                msg: format!("order variable {v} does not occur in the call pattern"),
                span: td.span,
            })
    };
    let many = |vs: &[String]| -> Result<Vec<usize>, ElabError> {
        let mut out = Vec::new();
        for v in vs {
            let p = pos(v)?;
            if out.contains(&p) {
                return Err(ElabError::BadDirective {
                    directive: "total".into(),
                    subject: td.family.clone(),
                    msg: format!("order variable {v} is repeated"),
                    span: td.span,
                });
            }
            out.push(p);
        }
        if out.is_empty() {
            return Err(ElabError::BadDirective {
                directive: "total".into(),
                subject: td.family.clone(),
                msg: "empty termination order".into(),
                span: td.span,
            });
        }
        Ok(out)
    };
    match &td.order {
        OrderSpec::Single(v) => Ok(ExplicitOrder::Subterm(pos(v)?)),
        OrderSpec::Lex(vs) => Ok(ExplicitOrder::Lex(many(vs)?)),
        OrderSpec::Simul(vs) => Ok(ExplicitOrder::Simul(many(vs)?)),
    }
}

/// Elaborate the query `D : A` against a finished signature. Uppercase
/// free variables of `A` become the query variables, in dependency order.
pub fn elaborate_query(sig: &Signature, text: &str) -> Result<Query, crate::SurfaceError> {
    let st = parse_term(text)?;
    let STerm::Ascribe(lhs, goal, span) = &st else {
        return Err(invalid("a query must have the form `D : A`", st.span()).into());
    };
    let STerm::Ident(qname, _) = &**lhs else {
        return Err(invalid("the left side of a query must be a name", lhs.span()).into());
    };
    let mut el = DeclElab::new(sig);
    let raw = el.elab_classifier(goal)?;
    el.reorient_holes();
    el.generalize_holes();
    let vars = el.surviving_implicits(*span)?;
    let goal_t = el.solution.apply(&raw);
    let mut ctx = Context::new();
    for (x, a) in &vars {
        ctx.push(x.clone(), a.clone());
    }
    let ctx = check_context(sig, &ctx).map_err(|e| ElabError::Kernel {
        decl: qname.clone(),
        message: e.to_string(),
    })?;
    let goal_t = check_family(&ctx, sig, &goal_t, &Term::Type).map_err(|e| ElabError::Kernel {
        decl: qname.clone(),
        message: e.to_string(),
    })?;
    Ok(Query {
        name: name(qname),
        vars: ctx,
        goal: goal_t,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FlexKind {
    /// An uppercase variable: may survive and become an implicit binder.
    Implicit,
    /// A `_` or `?name` hole, or an inserted implicit argument. If it is
    /// still unsolved at the end of the declaration it is generalized.
    Hole,
    /// A hole that was promoted to an implicit binder during finishing.
    Promoted,
}

#[derive(Clone, Debug)]
struct FlexEntry {
    name: Name,
    surface: String,
    classifier: Term,
    kind: FlexKind,
    span: Span,
}

/// One explicit binder of a declaration under elaboration. `seq` records
/// the textual order in which premises were elaborated, which is what the
/// logic-programming engine uses as the subgoal order.
struct EBinder {
    named: Option<(String, Name)>,
    classifier: Term,
    seq: usize,
}

struct DeclElab<'s> {
    sig: &'s Signature,
    supply: Supply,
    /// Explicit binders in scope: (fresh kernel name, classifier).
    locals: Vec<(Name, Term)>,
    /// Surface-name scoping stack for the same binders.
    scope: Vec<(String, Name)>,
    flex: Vec<FlexEntry>,
    solution: Substitution,
    seq: usize,
}

impl<'s> DeclElab<'s> {
    fn new(sig: &'s Signature) -> DeclElab<'s> {
        DeclElab {
            sig,
            supply: Supply::new(),
            locals: Vec::new(),
            scope: Vec::new(),
            flex: Vec::new(),
            solution: Substitution::identity(),
            seq: 0,
        }
    }

    fn next_seq(&mut self) -> usize {
        self.seq += 1;
        self.seq
    }

    fn fresh_local(&mut self, surface: &str, classifier: Term) -> Name {
        let actual = self.supply.fresh(surface);
        self.locals.push((actual.clone(), classifier));
        self.scope.push((surface.to_string(), actual.clone()));
        actual
    }

    fn pop_local(&mut self) {
        self.locals.pop();
        self.scope.pop();
    }

    fn lookup_scope(&self, s: &str) -> Option<(Name, Term)> {
        let (_, actual) = self.scope.iter().rev().find(|(n, _)| n == s)?;
        let (_, classifier) = self.locals.iter().find(|(x, _)| x == actual)?;
        Some((actual.clone(), classifier.clone()))
    }

    fn flex_by_name(&self, s: &str) -> Option<&FlexEntry> {
        self.flex.iter().find(|e| &*e.name == s)
    }

    fn flex_kind(&self, x: &Name) -> Option<FlexKind> {
        self.flex.iter().find(|e| &e.name == x).map(|e| e.kind)
    }

    /// A flex variable still stands for itself if the solution does not
    /// move it (re-orientation can leave identity bindings behind).
    fn unsolved(&self, x: &Name) -> bool {
        match self.solution.get(x) {
            None => true,
            Some(t) => *t == Term::var(x),
        }
    }

    fn local_mentioned_in(&self, t: &Term) -> Option<Name> {
        t.free_vars()
            .into_iter()
            .find(|v| self.locals.iter().any(|(x, _)| x == v))
    }

    fn fresh_hole(&mut self, surface: &str, classifier: &Term, span: Span) -> Term {
        let n = self.supply.fresh("?");
        self.flex.push(FlexEntry {
            name: n.clone(),
            surface: surface.to_string(),
            classifier: self.solution.apply(classifier),
            kind: FlexKind::Hole,
            span,
        });
        Term::var(&n)
    }

    fn unify_types(&mut self, got: &Term, want: &Term, span: Span) -> Result<(), ElabError> {
        let l = self.solution.apply(got);
        let r = self.solution.apply(want);
        if l == r {
            return Ok(());
        }
        let mut flex = Context::new();
        for e in &self.flex {
            if self.unsolved(&e.name) {
                flex.push(e.name.clone(), self.solution.apply(&e.classifier));
            }
        }
        let mut ctx = Context::new();
        for (x, a) in &self.locals {
            ctx.push(x.clone(), self.solution.apply(a));
        }
        let problem = UnifProblem {
            ctx,
            flex,
            eqs: vec![(l.clone(), r.clone())],
        };
        match unify(self.sig, &problem, &mut self.supply) {
            UnifOutcome::Mgu(s, _) => {
                self.solution = self.solution.compose(&s);
                Ok(())
            }
            UnifOutcome::NoSolution => Err(ElabError::Mismatch {
                expected: r.to_string(),
                found: l.to_string(),
                span,
            }),
            UnifOutcome::OutsideFragment(reason) => Err(ambiguous(reason, span)),
        }
    }

    // ----- declarations -------------------------------------------------

    fn elab_decl(
        mut self,
        name_s: &str,
        classifier: &STerm,
        span: Span,
    ) -> Result<Decl, ElabError> {
        let (binders, target) = self.walk(classifier)?;
        let is_family = target == Term::Type;
        self.reorient_holes();
        self.generalize_holes();
        let implicits = self.surviving_implicits(span)?;

        let finals: Vec<Term> = binders
            .iter()
            .map(|b| self.solution.apply(&b.classifier))
            .collect();
        let target_f = self.solution.apply(&target);

        let mut t = target_f.clone();
        for (b, a) in binders.iter().zip(&finals).rev() {
            t = match &b.named {
                Some((_, actual)) => Term::pi(a.clone(), t.close(actual)),
                None => Term::arrow(a.clone(), t),
            };
        }
        for (x, a) in implicits.iter().rev() {
            t = Term::pi(a.clone(), t.close(x));
        }
        if let Some(v) = t.free_vars().first() {
            let (why, at) = if v.starts_with('?') {
                let at = self
                    .flex
                    .iter()
                    .find(|f| f.name == *v)
                    .map_or(span, |f| f.span);
                (format!("hole {v} leaked into the final classifier"), at)
            } else {
                (
                    format!("bound variable {v} escapes into an implicit classifier"),
                    span,
                )
            };
            return Err(ambiguous(why, at));
        }

        // A binder is an operational premise when nothing later depends on
        // its variable; named parameters that index the conclusion are
        // solved by unification with the goal instead.
        let n_imp = implicits.len();
        let mut premises: Vec<(usize, usize)> = Vec::new();
        for (i, b) in binders.iter().enumerate() {
            let depended_on = match &b.named {
                None => false,
                Some((_, actual)) => {
                    target_f.free_vars().contains(actual)
                        || finals[i + 1..]
                            .iter()
                            .any(|c| c.free_vars().contains(actual))
                }
            };
            if !depended_on {
                premises.push((b.seq, n_imp + i));
            }
        }
        premises.sort_by_key(|p| p.0);
        let premise_order: Vec<usize> = if is_family {
            Vec::new()
        } else {
            premises.into_iter().map(|p| p.1).collect()
        };

        let mut arg_hints: Vec<Name> = implicits.iter().map(|(x, _)| x.clone()).collect();
        for b in &binders {
            arg_hints.push(match &b.named {
                Some((surface, _)) => name(surface),
                None => name(&domain_hint(&self.solution.apply(&b.classifier))),
            });
        }

        let empty = Context::new();
        let canon = if is_family {
            check_kind(&empty, self.sig, &t)
        } else {
            check_family(&empty, self.sig, &t, &Term::Type)
        }
        .map_err(|e| ElabError::Kernel {
            decl: name_s.to_string(),
            message: e.to_string(),
        })?;

        Ok(Decl {
            name: name(name_s),
            classifier: canon,
            is_family,
            implicit: n_imp,
            arg_hints,
            premise_order,
        })
    }

    /// Collect the explicit binders of a declaration, elaborating
    /// classifiers in textual order. `B <- A` contributes the same binder
    /// as `A -> B` but is elaborated head-first, so variables are pinned
    /// down in the order they appear in the source line.
    fn walk(&mut self, st: &STerm) -> Result<(Vec<EBinder>, Term), ElabError> {
        match st {
            STerm::Pi {
                binder,
                ann,
                body,
                span,
            } => {
                let Some(ann) = ann else {
                    return Err(ambiguous(
                        format!("binder {{{binder}}} needs a classifier annotation"),
                        *span,
                    ));
                };
                let a = self.elab_classifier(ann)?;
                let seq = self.next_seq();
                let actual = self.fresh_local(binder, a.clone());
                let (mut bs, t) = self.walk(body)?;
                bs.insert(
                    0,
                    EBinder {
                        named: Some((binder.clone(), actual)),
                        classifier: a,
                        seq,
                    },
                );
                Ok((bs, t))
            }
            STerm::Arrow(l, r) => {
                let a = self.elab_classifier(l)?;
                let seq = self.next_seq();
                let (mut bs, t) = self.walk(r)?;
                bs.insert(
                    0,
                    EBinder {
                        named: None,
                        classifier: a,
                        seq,
                    },
                );
                Ok((bs, t))
            }
            STerm::Backarrow(l, r) => {
                let (mut bs, t) = self.walk(l)?;
                let a = self.elab_classifier(r)?;
                let seq = self.next_seq();
                bs.insert(
                    0,
                    EBinder {
                        named: None,
                        classifier: a,
                        seq,
                    },
                );
                Ok((bs, t))
            }
            STerm::TypeKw(_) => Ok((Vec::new(), Term::Type)),
            other => {
                let t = self.elab_family_app(other)?;
                Ok((Vec::new(), t))
            }
        }
    }

    // ----- classifiers ---------------------------------------------------

    fn elab_classifier(&mut self, st: &STerm) -> Result<Term, ElabError> {
        match st {
            STerm::TypeKw(_) => Ok(Term::Type),
            STerm::Pi {
                binder,
                ann,
                body,
                span,
            } => {
                let Some(ann) = ann else {
                    return Err(ambiguous(
                        format!("binder {{{binder}}} needs a classifier annotation"),
                        *span,
                    ));
                };
                let a = self.elab_classifier(ann)?;
                let actual = self.fresh_local(binder, a.clone());
                let b = self.elab_classifier(body)?;
                self.pop_local();
                Ok(Term::pi(self.solution.apply(&a), b.close(&actual)))
            }
            STerm::Arrow(l, r) => {
                let a = self.elab_classifier(l)?;
                let b = self.elab_classifier(r)?;
                Ok(Term::arrow(a, b))
            }
            STerm::Backarrow(l, r) => {
                let head = self.elab_classifier(l)?;
                let prem = self.elab_classifier(r)?;
                Ok(Term::arrow(prem, head))
            }
            STerm::Lam { span, .. } => {
                Err(invalid("a lambda cannot appear in a classifier", *span))
            }
            STerm::Ascribe(_, _, span) => {
                Err(invalid("ascription is not allowed in a classifier", *span))
            }
            STerm::Hole(span) => Err(ambiguous(
                "holes are not inferred in classifier positions",
                *span,
            )),
            STerm::Meta(n, span) => Err(ambiguous(
                format!("hole ?{n} is not inferred in a classifier position"),
                *span,
            )),
            STerm::Ident(..) | STerm::App(..) => self.elab_family_app(st),
        }
    }

    /// An atomic classifier: a type family applied to object arguments.
    fn elab_family_app(&mut self, st: &STerm) -> Result<Term, ElabError> {
        let (head, args) = flatten_spine(st);
        let STerm::Ident(s, span) = head else {
            return Err(invalid(
                "a classifier must be headed by a type family",
                head.span(),
            ));
        };
        if self.lookup_scope(s).is_some() || self.flex_by_name(s).is_some() {
            return Err(ambiguous(
                format!("variable `{s}` cannot be used as a classifier"),
                *span,
            ));
        }
        let Some(d) = self.sig.get(&name(s)) else {
            return Err(if is_variable_name(s) {
                ambiguous(
                    format!("classifier-level variable `{s}` cannot be reconstructed"),
                    *span,
                )
            } else {
                ElabError::Undeclared {
                    name: s.clone(),
                    span: *span,
                }
            });
        };
        if !d.is_family {
            return Err(invalid(
                format!("`{s}` is an object constant, not a type family"),
                *span,
            ));
        }
        let (acc, cur) = self.const_head(d, *span)?;
        let (t, residual) = self.peel_args(acc, cur, &args)?;
        let residual = self.solution.apply(&residual);
        if residual != Term::Type {
            return Err(invalid(
                format!("family `{s}` is not fully applied in a classifier"),
                *span,
            ));
        }
        Ok(t)
    }

    // ----- objects ---------------------------------------------------

    fn elab_object(&mut self, st: &STerm, want: &Term) -> Result<Term, ElabError> {
        match st {
            STerm::Lam {
                binder,
                ann,
                body,
                span,
            } => {
                let want = self.solution.apply(want);
                let Term::Pi(a, b) = want else {
                    return Err(ambiguous(
                        format!("lambda checked against `{want}`, which is not a function classifier"),
                        *span,
                    ));
                };
                if let Some(annst) = ann {
                    let got = self.elab_classifier(annst)?;
                    self.unify_types(&got, &a, *span)?;
                }
                let a = self.solution.apply(&a);
                let actual = self.fresh_local(binder, a.clone());
                let bw = b.open(&Term::var(&actual));
                let bt = self.elab_object(body, &bw)?;
                self.pop_local();
                Ok(Term::lam(self.solution.apply(&a), bt.close(&actual)))
            }
            STerm::Hole(span) => Ok(self.fresh_hole("_", want, *span)),
            STerm::Meta(n, span) => {
                let key = format!("?{n}");
                if let Some(e) = self.flex_by_name(&key) {
                    let cl = e.classifier.clone();
                    let nm = e.name.clone();
                    self.unify_types(&cl, want, *span)?;
                    Ok(Term::var(&nm))
                } else {
                    let w = self.solution.apply(want);
                    if let Some(bad) = self.local_mentioned_in(&w) {
                        return Err(ambiguous(
                            format!("the classifier of ?{n} mentions the bound variable {bad}"),
                            *span,
                        ));
                    }
                    let nm = name(&key);
                    self.flex.push(FlexEntry {
                        name: nm.clone(),
                        surface: key,
                        classifier: w,
                        kind: FlexKind::Hole,
                        span: *span,
                    });
                    Ok(Term::var(&nm))
                }
            }
            STerm::Ascribe(m, a, span) => {
                let at = self.elab_classifier(a)?;
                let mt = self.elab_object(m, &at)?;
                self.unify_types(&at, want, *span)?;
                Ok(mt)
            }
            STerm::TypeKw(span) => Err(invalid("`type` cannot appear inside an object", *span)),
            STerm::Pi { .. } | STerm::Arrow(..) | STerm::Backarrow(..) => Err(invalid(
                "classifier syntax cannot appear inside an object",
                st.span(),
            )),
            STerm::Ident(..) | STerm::App(..) => self.elab_app(st, want),
        }
    }

    fn elab_app(&mut self, st: &STerm, want: &Term) -> Result<Term, ElabError> {
        let (head, args) = flatten_spine(st);
        let (acc, cur) = match head {
            STerm::Ident(s, span) => {
                if let Some((actual, cl)) = self.lookup_scope(s) {
                    (Term::var(&actual), cl)
                } else if let Some(e) = self.flex_by_name(s) {
                    (Term::var(&e.name), e.classifier.clone())
                } else if let Some(d) = self.sig.get(&name(s)) {
                    if d.is_family {
                        return Err(invalid(
                            format!("type family `{s}` cannot appear inside an object"),
                            *span,
                        ));
                    }
                    self.const_head(d, *span)?
                } else if is_variable_name(s) {
                    if !args.is_empty() {
                        return Err(ambiguous(
                            format!("`{s}` is applied to arguments before its classifier is known"),
                            *span,
                        ));
                    }
                    let w = self.solution.apply(want);
                    if let Some(bad) = self.local_mentioned_in(&w) {
                        return Err(ambiguous(
                            format!(
                                "implicit argument `{s}` would depend on the bound variable {bad}; bind it explicitly"
                            ),
                            *span,
                        ));
                    }
                    self.flex.push(FlexEntry {
                        name: name(s),
                        surface: s.clone(),
                        classifier: w,
                        kind: FlexKind::Implicit,
                        span: *span,
                    });
                    return Ok(Term::var(&name(s)));
                } else {
                    return Err(ElabError::Undeclared {
                        name: s.clone(),
                        span: *span,
                    });
                }
            }
            STerm::Ascribe(inner, ann, _) => {
                let at = self.elab_classifier(ann)?;
                let t = self.elab_object(inner, &at)?;
                (t, at)
            }
            other => {
                return Err(invalid(
                    "only a constant or variable can head an application",
                    other.span(),
                ))
            }
        };
        let (t, residual) = self.peel_args(acc, cur, &args)?;
        self.unify_types(&residual, want, st.span())?;
        Ok(t)
    }

    /// Prepare a constant head: insert a fresh hole for every implicit
    /// argument and return the application so far plus the residual
    /// classifier telescope.
    fn const_head(&mut self, d: &Decl, span: Span) -> Result<(Term, Term), ElabError> {
        let mut cur = d.classifier.clone();
        let mut sp = Vec::new();
        for i in 0..d.implicit {
            let Term::Pi(a, b) = cur else {
                return Err(invalid(
                    format!("constant {} has a malformed implicit prefix", d.name),
                    span,
                ));
            };
            let hint = d
                .arg_hints
                .get(i)
                .map(|h| h.to_string())
                .unwrap_or_else(|| "_".to_string());
            let m = self.fresh_hole(&hint, &a, span);
            cur = b.open(&m);
            sp.push(m);
        }
        Ok((Term::App(Head::Const(d.name.clone()), sp), cur))
    }

    fn peel_args(
        &mut self,
        mut acc: Term,
        mut cur: Term,
        args: &[&STerm],
    ) -> Result<(Term, Term), ElabError> {
        for arg in args {
            cur = self.solution.apply(&cur);
            let Term::Pi(a, b) = cur else {
                return Err(invalid("too many arguments", arg.span()));
            };
            let t = self.elab_object(arg, &a)?;
            cur = b.open(&t);
            acc = acc.apply(vec![t]);
        }
        Ok((acc, cur))
    }

    // ----- finishing -------------------------------------------------

    /// Unification may have eliminated an implicit variable in favour of a
    /// hole that was created earlier (holes for implicit arguments of the
    /// head constant predate every variable of the clause body). Re-orient
    /// such bindings so the named variable survives and the hole is solved.
    fn reorient_holes(&mut self) {
        let mut rho = Substitution::identity();
        for (x, t) in self.solution.bindings() {
            if self.flex_kind(x) != Some(FlexKind::Implicit) {
                continue;
            }
            if let Term::App(Head::Free(m), sp) = t {
                if sp.is_empty()
                    && self.flex_kind(m) == Some(FlexKind::Hole)
                    && self.solution.get(m).is_none()
                    && rho.get(m).is_none()
                {
                    rho.bind(m.clone(), Term::var(x));
                }
            }
        }
        if !rho.is_empty() {
            self.solution = self.solution.compose(&rho);
        }
    }

    /// Promote every unsolved hole to an implicit parameter, as Twelf
    /// does: the structure around the hole determined everything except
    /// the hole itself, so the declaration is schematic in it. Each gets
    /// a display name, preferring the argument hint it was inserted for.
    fn generalize_holes(&mut self) {
        let mut taken: Vec<String> = self.flex.iter().map(|e| e.name.to_string()).collect();
        taken.extend(self.locals.iter().map(|(x, _)| x.to_string()));
        let mut rho = Substitution::identity();
        for i in 0..self.flex.len() {
            if self.flex[i].kind != FlexKind::Hole || !self.unsolved(&self.flex[i].name) {
                continue;
            }
            let base = self.hole_base_name(&self.flex[i]);
            let mut cand = base.clone();
            let mut k = 0usize;
            while taken.contains(&cand) || self.sig.get(&name(&cand)).is_some() {
                k += 1;
                cand = format!("{base}{k}");
            }
            taken.push(cand.clone());
            let new = name(&cand);
            rho.bind(self.flex[i].name.clone(), Term::var(&new));
            self.flex[i].name = new;
            self.flex[i].kind = FlexKind::Promoted;
        }
        if !rho.is_empty() {
            self.solution = self.solution.compose(&rho);
        }
    }

    fn hole_base_name(&self, e: &FlexEntry) -> String {
        if is_variable_name(&e.surface) && !e.surface.starts_with('_') {
            return e.surface.clone();
        }
        match self.solution.apply(&e.classifier) {
            Term::App(Head::Const(f), _) => f
                .chars()
                .next()
                .map(|c| c.to_ascii_uppercase().to_string())
                .unwrap_or_else(|| "X".to_string()),
            _ => "X".to_string(),
        }
    }

    /// The implicit variables that survive the solution, with their final
    /// classifiers, reordered so classifiers only look backwards. Promoted
    /// holes come after the named variables, which keeps the named part of
    /// the telescope in first-occurrence order.
    fn surviving_implicits(&self, span: Span) -> Result<Vec<(Name, Term)>, ElabError> {
        let mut out = Vec::new();
        for e in &self.flex {
            if e.kind == FlexKind::Implicit && self.unsolved(&e.name) {
                out.push((e.name.clone(), self.solution.apply(&e.classifier)));
            }
        }
        for e in &self.flex {
            if e.kind == FlexKind::Promoted && self.unsolved(&e.name) {
                out.push((e.name.clone(), self.solution.apply(&e.classifier)));
            }
        }
        stable_topological(out).ok_or_else(|| {
            ambiguous(
                "circular classifier dependencies among implicit arguments",
                span,
            )
        })
    }
}

fn flatten_spine(st: &STerm) -> (&STerm, Vec<&STerm>) {
    let mut args = Vec::new();
    let mut cur = st;
    while let STerm::App(f, x) = cur {
        args.push(&**x);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

/// A display hint for an anonymous premise: derivations of indexed
/// families are conventionally called `D`, while members of a bare family
/// borrow its initial (`nat` gives `N`).
fn domain_hint(dom: &Term) -> String {
    match dom {
        Term::App(Head::Const(f), sp) if sp.is_empty() => f
            .chars()
            .next()
            .map(|c| c.to_ascii_uppercase().to_string())
            .unwrap_or_else(|| "X".to_string()),
        Term::App(..) => "D".to_string(),
        _ => "D".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_file;

    fn elab(text: &str) -> Elaborated {
        elaborate_file(&parse_file(text).expect("parse")).expect("elaborate")
    }

    #[test]
    fn implicit_arguments_are_reconstructed_for_plus() {
        let e = elab(
            "nat : type. z : nat. s : nat -> nat.\n\
             plus : nat -> nat -> nat -> type.\n\
             plus-z : plus z N N.\n\
             plus-s : plus (s M) N (s K) <- plus M N K.",
        );
        let pz = e.signature.get(&name("plus-z")).unwrap();
        assert_eq!(pz.implicit, 1);
        assert_eq!(pz.arity(), 1);
        assert!(pz.premise_order.is_empty());
        let ps = e.signature.get(&name("plus-s")).unwrap();
        assert_eq!(ps.implicit, 3);
        assert_eq!(ps.arity(), 4);
        assert_eq!(ps.premise_order, vec![3]);
        assert_eq!(
            ps.arg_hints,
            vec![name("M"), name("N"), name("K"), name("D")]
        );
    }

    #[test]
    fn named_holes_are_shared_and_solved() {
        // The second premise forces ?n to be `s z` through the classifier
        // of the shared implicit V.
        let e = elab(
            "nat : type. z : nat. s : nat -> nat.\n\
             vec : nat -> type.\n\
             elem : {N : nat} vec N -> type.\n\
             hh : elem ?n V -> elem (s z) V -> type.",
        );
        let d = e.signature.get(&name("hh")).unwrap();
        assert!(d.is_family);
        assert_eq!(d.implicit, 1);
        let Term::Pi(v_cl, _) = &d.classifier else {
            panic!("expected an implicit binder");
        };
        use totem_lf::fixtures::{capp, cnst};
        assert_eq!(
            **v_cl,
            capp("vec", vec![capp("s", vec![cnst("z")])])
        );
    }

    #[test]
    fn unsolved_holes_generalize_to_implicit_binders() {
        let e = elab(
            "nat : type. z : nat.\n\
             foo : nat -> type.\n\
             gen : foo _ -> type.",
        );
        let d = e.signature.get(&name("gen")).unwrap();
        assert_eq!(d.implicit, 1);
        assert_eq!(d.arity(), 2);
        // The hole borrowed its classifier's initial for a display name.
        assert_eq!(&*d.arg_hints[0], "N");
    }

    #[test]
    fn classifier_position_holes_are_ambiguous() {
        let text = "nat : type. z : nat.\n\
                    bad : _ -> type.";
        let err = elaborate_file(&parse_file(text).unwrap()).unwrap_err();
        assert!(matches!(err, ElabError::ReconstructionAmbiguous { .. }));
    }

    #[test]
    fn lowercase_unknowns_are_undeclared() {
        let text = "nat : type. bad : nat -> natt.";
        let err = elaborate_file(&parse_file(text).unwrap()).unwrap_err();
        assert!(matches!(err, ElabError::Undeclared { name, .. } if name == "natt"));
    }
}
