//! Printing elaborated signatures back to concrete syntax.
//!
//! The implicit style is the inverse of elaboration: implicit binders are
//! dropped (their variables appear free, to be reconstructed on re-parse)
//! and the implicit arguments of every constant application are elided.
//! The explicit style shows every binder and argument; it is meant for
//! inspection and does not round-trip, because the concrete grammar has no
//! way to mark a shown binder as implicit.

use std::fmt::Write as _;

use thiserror::Error;

use totem_lf::{Decl, Head, Name, Signature, Term};

use crate::ast::{ModeDecl, OrderSpec, Polarity, TotalDecl};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrintStyle {
    Implicit,
    Explicit,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PrintError {
    #[error("declaration `{decl}` cannot be printed: {reason}")]
    Unrepresentable { decl: Name, reason: String },
}

fn unrep(decl: &Name, reason: impl Into<String>) -> PrintError {
    PrintError::Unrepresentable {
        decl: decl.clone(),
        reason: reason.into(),
    }
}

/// Print a whole signature, followed by its directives.
pub fn print_signature(
    sig: &Signature,
    modes: &[ModeDecl],
    totals: &[TotalDecl],
    style: PrintStyle,
) -> Result<String, PrintError> {
    let mut out = String::new();
    for d in sig.decls() {
        print_decl(sig, d, style, &mut out)?;
        out.push('\n');
    }
    for m in modes {
        let _ = write!(out, "%mode {}", m.family);
        for (p, x) in &m.args {
            let tag = match p {
                Polarity::Input => '+',
                Polarity::Output => '-',
            };
            let _ = write!(out, " {tag}{x}");
        }
        out.push_str(".\n");
    }
    for t in totals {
        out.push_str("%total ");
        match &t.order {
            OrderSpec::Single(v) => {
                let _ = write!(out, "{v}");
            }
            OrderSpec::Lex(vs) => {
                let _ = write!(out, "{{{}}}", vs.join(" "));
            }
            OrderSpec::Simul(vs) => {
                let _ = write!(out, "[{}]", vs.join(" "));
            }
        }
        let _ = write!(out, " ({}", t.family);
        for a in &t.args {
            match a {
                Some(v) => {
                    let _ = write!(out, " {v}");
                }
                None => out.push_str(" _"),
            }
        }
        out.push_str(").\n");
    }
    Ok(out)
}

/// Print one term. Free variables are printed verbatim; bound variables
/// get invented names. Used for goal and derivation output.
pub fn print_term(sig: &Signature, t: &Term, style: PrintStyle) -> String {
    let mut pr = Pr {
        sig,
        style,
        scope: Vec::new(),
    };
    let mut out = String::new();
    pr.term(&t.eta_contract(), Prec::Top, &mut out);
    out
}

fn print_decl(
    sig: &Signature,
    d: &Decl,
    style: PrintStyle,
    out: &mut String,
) -> Result<(), PrintError> {
    if d.arg_hints.len() != d.arity() {
        return Err(unrep(&d.name, "argument hints do not match the telescope"));
    }
    let mut pr = Pr {
        sig,
        style,
        scope: Vec::new(),
    };
    let _ = write!(out, "{} : ", d.name);

    // Peel the implicit prefix. Stored classifiers are eta-long; contract
    // them first so function-valued arguments print as bare names.
    let mut cur = d.classifier.eta_contract();
    let mut imp_names: Vec<Name> = Vec::new();
    for i in 0..d.implicit {
        let hint = &d.arg_hints[i];
        let Term::Pi(a, b) = cur else {
            return Err(unrep(&d.name, "implicit count exceeds the telescope"));
        };
        if !is_variable_hint(hint) || sig.get(hint).is_some() || imp_names.contains(hint) {
            return Err(unrep(
                &d.name,
                format!("implicit parameter hint `{hint}` is not a usable variable name"),
            ));
        }
        if style == PrintStyle::Explicit {
            out.push('{');
            out.push_str(hint);
            out.push_str(" : ");
            pr.term(&a, Prec::Top, out);
            out.push_str("} ");
        }
        imp_names.push(hint.clone());
        cur = b.open(&Term::var(hint));
    }

    // Peel the explicit binders.
    struct Entry {
        hint: Name,
        dom: Term,
        used: bool,
        pos: usize,
    }
    let mut entries: Vec<Entry> = Vec::new();
    for i in d.implicit..d.arity() {
        let hint = d.arg_hints[i].clone();
        let Term::Pi(a, b) = cur else {
            return Err(unrep(&d.name, "arity exceeds the telescope"));
        };
        let used = b.uses_bound(0);
        if used && !is_binder_hint(&hint) {
            return Err(unrep(
                &d.name,
                format!("binder hint `{hint}` is not a usable name"),
            ));
        }
        cur = b.open(&Term::var(&hint));
        entries.push(Entry {
            hint,
            dom: a.as_ref().clone(),
            used,
            pos: i,
        });
    }
    let target = cur;

    // Premises are the binders nothing later depends on. Decide which
    // arrow direction reproduces the recorded subgoal order.
    let premise_positions: Vec<usize> = entries
        .iter()
        .filter(|e| !e.used)
        .map(|e| e.pos)
        .collect();
    let ascending = premise_positions.clone();
    let descending: Vec<usize> = premise_positions.iter().rev().cloned().collect();
    let premises_are_suffix = entries
        .iter()
        .skip_while(|e| e.used)
        .all(|e| !e.used);

    enum Dir {
        Forward,
        Backward,
    }
    let clause_target = matches!(&target, Term::App(Head::Const(_), sp) if !sp.is_empty());
    let dir = if d.is_family {
        Dir::Forward
    } else if clause_target
        && !premise_positions.is_empty()
        && premises_are_suffix
        && d.premise_order == descending
        && entries.iter().all(|e| e.used || is_default_hint(&e.hint, &e.dom))
    {
        Dir::Backward
    } else if d.premise_order == ascending || d.premise_order.is_empty() {
        Dir::Forward
    } else {
        return Err(unrep(
            &d.name,
            "the subgoal order does not correspond to either arrow direction",
        ));
    };

    match dir {
        Dir::Forward => {
            for e in &entries {
                if e.used || !is_default_hint(&e.hint, &e.dom) {
                    out.push('{');
                    out.push_str(&e.hint);
                    out.push_str(" : ");
                    pr.term(&e.dom, Prec::Top, out);
                    out.push_str("} ");
                } else {
                    pr.term(&e.dom, Prec::ArrowOperand, out);
                    out.push_str(" -> ");
                }
            }
            if target == Term::Type {
                out.push_str("type");
            } else {
                pr.term(&target, Prec::Top, out);
            }
        }
        Dir::Backward => {
            for e in entries.iter().filter(|e| e.used) {
                out.push('{');
                out.push_str(&e.hint);
                out.push_str(" : ");
                pr.term(&e.dom, Prec::Top, out);
                out.push_str("} ");
            }
            pr.term(&target, Prec::ArrowOperand, out);
            for &p in &d.premise_order {
                let e = entries.iter().find(|e| e.pos == p).unwrap();
                out.push_str(" <- ");
                pr.term(&e.dom, Prec::ArrowOperand, out);
            }
        }
    }
    out.push_str(".\n");
    Ok(())
}

/// Hints for implicit parameters must re-parse as implicit variables.
fn is_variable_hint(h: &Name) -> bool {
    is_plain_ident(h) && h.starts_with(|c: char| c.is_ascii_uppercase())
}

/// Hints for named binders only need to be valid identifiers.
fn is_binder_hint(h: &Name) -> bool {
    is_plain_ident(h)
}

fn is_plain_ident(h: &str) -> bool {
    !h.is_empty()
        && h != "type"
        && h != "_"
        && !h.contains(|c: char| {
            c.is_whitespace() || "()[]{}:.,%?/#\"".contains(c)
        })
}

/// Whether an anonymous premise would get this hint back on re-parse.
fn is_default_hint(hint: &Name, dom: &Term) -> bool {
    let default = match dom {
        Term::App(Head::Const(f), sp) if sp.is_empty() => f
            .chars()
            .next()
            .map(|c| c.to_ascii_uppercase().to_string())
            .unwrap_or_else(|| "X".to_string()),
        _ => "D".to_string(),
    };
    **hint == default
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Prec {
    /// Binders and arrows may appear bare.
    Top,
    /// Operand of an arrow: applications are fine, binders need parens.
    ArrowOperand,
    /// Argument position: everything but an atom needs parens.
    Arg,
}

struct Pr<'s> {
    sig: &'s Signature,
    style: PrintStyle,
    /// Names currently bound by enclosing printed binders.
    scope: Vec<Name>,
}

impl<'s> Pr<'s> {
    fn term(&mut self, t: &Term, prec: Prec, out: &mut String) {
        match t {
            Term::Type => out.push_str("type"),
            Term::Pi(a, b) => {
                let parens = prec != Prec::Top;
                if parens {
                    out.push('(');
                }
                if b.uses_bound(0) {
                    let x = self.invent("x");
                    out.push('{');
                    out.push_str(&x);
                    out.push_str(" : ");
                    self.term(a, Prec::Top, out);
                    out.push_str("} ");
                    self.scope.push(x.clone());
                    let body = b.open(&Term::var(&x));
                    self.term(&body, Prec::Top, out);
                    self.scope.pop();
                } else {
                    self.term(a, Prec::ArrowOperand, out);
                    out.push_str(" -> ");
                    let body = b.open(&Term::var(&totem_lf::name("_dead")));
                    self.term(&body, Prec::Top, out);
                }
                if parens {
                    out.push(')');
                }
            }
            Term::Lam(_, b) => {
                let parens = prec != Prec::Top;
                if parens {
                    out.push('(');
                }
                let x = self.invent("x");
                out.push('[');
                out.push_str(&x);
                out.push_str("] ");
                self.scope.push(x.clone());
                let body = b.open(&Term::var(&x));
                self.term(&body, Prec::Top, out);
                self.scope.pop();
                if parens {
                    out.push(')');
                }
            }
            Term::App(h, sp) => {
                let visible: Vec<&Term> = match (h, self.style) {
                    (Head::Const(c), PrintStyle::Implicit) => {
                        let skip = self.sig.get(c).map(|d| d.implicit).unwrap_or(0);
                        sp.iter().skip(skip.min(sp.len())).collect()
                    }
                    _ => sp.iter().collect(),
                };
                let head = match h {
                    Head::Const(c) => c.to_string(),
                    Head::Free(x) => x.to_string(),
                    Head::Bound(i) => self
                        .scope
                        .get(self.scope.len().wrapping_sub(1 + *i as usize))
                        .map(|n| n.to_string())
                        .unwrap_or_else(|| format!("_b{i}")),
                };
                if visible.is_empty() {
                    out.push_str(&head);
                } else {
                    let parens = prec == Prec::Arg;
                    if parens {
                        out.push('(');
                    }
                    out.push_str(&head);
                    for a in visible {
                        out.push(' ');
                        self.term(a, Prec::Arg, out);
                    }
                    if parens {
                        out.push(')');
                    }
                }
            }
            Term::Redex(f, sp) => {
                // Never produced by the kernel; printed defensively.
                let parens = prec == Prec::Arg;
                if parens {
                    out.push('(');
                }
                self.term(f, Prec::Arg, out);
                for a in sp {
                    out.push(' ');
                    self.term(a, Prec::Arg, out);
                }
                if parens {
                    out.push(')');
                }
            }
        }
    }

    /// An unused name for a printed binder: not a constant, not in scope.
    fn invent(&self, base: &str) -> Name {
        let clean = if base.is_empty() { "x" } else { base };
        let mut cand = clean.to_string();
        let mut k = 0usize;
        loop {
            let n = totem_lf::name(&cand);
            if self.sig.get(&n).is_none() && !self.scope.contains(&n) {
                return n;
            }
            k += 1;
            cand = format!("{clean}{k}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elaborate::elaborate_file;
    use crate::parse::parse_file;

    fn load(text: &str) -> crate::Elaborated {
        elaborate_file(&parse_file(text).expect("parse")).expect("elaborate")
    }

    #[test]
    fn plus_prints_in_backward_style() {
        let e = load(
            "nat : type. z : nat. s : nat -> nat.\n\
             plus : nat -> nat -> nat -> type.\n\
             plus-z : plus z N N.\n\
             plus-s : plus (s M) N (s K) <- plus M N K.",
        );
        let text = print_signature(&e.signature, &[], &[], PrintStyle::Implicit).unwrap();
        assert!(text.contains("plus-s : plus (s M) N (s K) <- plus M N K.\n"));
        assert!(text.contains("plus-z : plus z N N.\n"));
        assert!(text.contains("s : nat -> nat.\n"));
    }

    #[test]
    fn explicit_style_shows_the_implicit_binders() {
        let e = load(
            "nat : type. z : nat. s : nat -> nat.\n\
             plus : nat -> nat -> nat -> type.\n\
             plus-z : plus z N N.",
        );
        let text = print_signature(&e.signature, &[], &[], PrintStyle::Explicit).unwrap();
        assert!(text.contains("plus-z : {N : nat} plus z N N.\n"));
    }

    #[test]
    fn reparsing_the_printed_signature_is_the_identity() {
        let e = load(
            "nat : type. z : nat. s : nat -> nat.\n\
             plus : nat -> nat -> nat -> type.\n\
             plus-z : plus z N N.\n\
             plus-s : plus (s M) N (s K) <- plus M N K.",
        );
        let text = print_signature(&e.signature, &[], &[], PrintStyle::Implicit).unwrap();
        let e2 = load(&text);
        let d1: Vec<_> = e.signature.decls().cloned().collect();
        let d2: Vec<_> = e2.signature.decls().cloned().collect();
        assert_eq!(d1, d2);
    }
}
