//! Cross-validation of the kernel checker against a naive declarative
//! oracle.
//!
//! The oracle is written independently of the kernel's algorithmic
//! structure: it uses a plain (non-hereditary) substitution, normalizes by
//! repeated leftmost beta steps, and compares types by normalize-then-
//! compare-modulo-eta instead of keeping everything in canonical form.
//! Agreement is checked on the fixture derivations and on a few hundred
//! generated and mutated terms.

use totem_lf::ctx::Context;
use totem_lf::fixtures;
use totem_lf::gen::{gen_context, gen_object, XorShift};
use totem_lf::sig::Signature;
use totem_lf::syntax::{name, Head, Term};
use totem_lf::typing::check_object;

// ---------------------------------------------------------------- oracle --

/// Plain de Bruijn substitution: no reduction, redexes are left in place.
fn plain_subst(t: &Term, j: u32, arg: &Term) -> Term {
    match t {
        Term::Type => Term::Type,
        Term::Pi(a, b) => Term::pi(plain_subst(a, j, arg), plain_subst(b, j + 1, arg)),
        Term::Lam(a, b) => Term::lam(plain_subst(a, j, arg), plain_subst(b, j + 1, arg)),
        Term::App(h, sp) => {
            let sp: Vec<Term> = sp.iter().map(|u| plain_subst(u, j, arg)).collect();
            match h {
                Head::Bound(i) if *i == j => {
                    let img = arg.shift(j as i32, 0);
                    if sp.is_empty() {
                        img
                    } else {
                        Term::Redex(Box::new(img), sp)
                    }
                }
                Head::Bound(i) if *i > j => Term::App(Head::Bound(i - 1), sp),
                other => Term::App(other.clone(), sp),
            }
        }
        Term::Redex(f, sp) => Term::Redex(
            Box::new(plain_subst(f, j, arg)),
            sp.iter().map(|u| plain_subst(u, j, arg)).collect(),
        ),
    }
}

/// One leftmost-outermost reduction step, if any.
fn step(t: &Term) -> Option<Term> {
    match t {
        Term::Type => None,
        Term::Pi(a, b) => step(a)
            .map(|a| Term::pi(a, (**b).clone()))
            .or_else(|| step(b).map(|b| Term::pi((**a).clone(), b))),
        Term::Lam(a, b) => step(a)
            .map(|a| Term::lam(a, (**b).clone()))
            .or_else(|| step(b).map(|b| Term::lam((**a).clone(), b))),
        Term::App(h, sp) => {
            for (i, u) in sp.iter().enumerate() {
                if let Some(u2) = step(u) {
                    let mut sp = sp.clone();
                    sp[i] = u2;
                    return Some(Term::App(h.clone(), sp));
                }
            }
            None
        }
        Term::Redex(f, sp) => match &**f {
            Term::Lam(_, body) if !sp.is_empty() => {
                let contracted = plain_subst(body, 0, &sp[0]);
                if sp.len() == 1 {
                    Some(contracted)
                } else {
                    Some(Term::Redex(Box::new(contracted), sp[1..].to_vec()))
                }
            }
            Term::App(h, sp0) => {
                let mut all = sp0.clone();
                all.extend(sp.iter().cloned());
                Some(Term::App(h.clone(), all))
            }
            Term::Redex(g, sp0) => {
                let mut all = sp0.clone();
                all.extend(sp.iter().cloned());
                Some(Term::Redex(g.clone(), all))
            }
            _ if sp.is_empty() => Some((**f).clone()),
            _ => step(f).map(|f| Term::Redex(Box::new(f), sp.clone())),
        },
    }
}

fn nf(t: &Term) -> Term {
    let mut cur = t.clone();
    for _ in 0..10_000 {
        match step(&cur) {
            Some(next) => cur = next,
            None => return cur,
        }
    }
    panic!("oracle normalization did not terminate");
}

/// Equality of normal forms modulo eta.
fn eq_eta(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Type, Term::Type) => true,
        (Term::Pi(a1, b1), Term::Pi(a2, b2)) => eq_eta(a1, a2) && eq_eta(b1, b2),
        (Term::Lam(_, b1), Term::Lam(_, b2)) => eq_eta(b1, b2),
        (Term::Lam(_, b1), t) => eq_eta(b1, &t.shift(1, 0).apply(vec![Term::bound(0)])),
        (t, Term::Lam(_, b2)) => eq_eta(&t.shift(1, 0).apply(vec![Term::bound(0)]), b2),
        (Term::App(h1, sp1), Term::App(h2, sp2)) => {
            h1 == h2 && sp1.len() == sp2.len() && sp1.iter().zip(sp2).all(|(x, y)| eq_eta(x, y))
        }
        _ => false,
    }
}

fn beta_eta_eq(a: &Term, b: &Term) -> bool {
    eq_eta(&nf(a), &nf(b))
}

/// Declarative object typing; returns the (not necessarily canonical) type.
fn oracle_type(
    sig: &Signature,
    ctx: &Context,
    stack: &mut Vec<Term>,
    t: &Term,
) -> Result<Term, String> {
    match t {
        Term::App(h, sp) => {
            let head_ty = match h {
                Head::Const(c) => {
                    let d = sig.get(c).ok_or("unknown constant")?;
                    if d.is_family {
                        return Err("family in object position".into());
                    }
                    d.classifier.shift(stack.len() as i32, 0)
                }
                Head::Free(x) => ctx
                    .lookup(x)
                    .ok_or("unknown variable")?
                    .shift(stack.len() as i32, 0),
                Head::Bound(i) => {
                    let idx = stack
                        .len()
                        .checked_sub(1 + *i as usize)
                        .ok_or("loose bound variable")?;
                    stack[idx].shift(*i as i32 + 1, 0)
                }
            };
            fold_args(sig, ctx, stack, head_ty, sp)
        }
        Term::Redex(f, sp) => {
            let fty = oracle_type(sig, ctx, stack, f)?;
            fold_args(sig, ctx, stack, fty, sp)
        }
        Term::Lam(a, b) => {
            stack.push((**a).clone());
            let bt = oracle_type(sig, ctx, stack, b);
            stack.pop();
            Ok(Term::pi((**a).clone(), bt?))
        }
        _ => Err("not an object".into()),
    }
}

fn fold_args(
    sig: &Signature,
    ctx: &Context,
    stack: &mut Vec<Term>,
    mut ty: Term,
    sp: &[Term],
) -> Result<Term, String> {
    for arg in sp {
        match nf(&ty) {
            Term::Pi(dom, cod) => {
                let at = oracle_type(sig, ctx, stack, arg)?;
                if !beta_eta_eq(&at, &dom) {
                    return Err(format!("argument type mismatch: {at} vs {dom}"));
                }
                ty = plain_subst(&cod, 0, arg);
            }
            other => return Err(format!("not a function: {other}")),
        }
    }
    Ok(ty)
}

fn oracle_checks(sig: &Signature, ctx: &Context, t: &Term, a: &Term) -> bool {
    let mut stack = Vec::new();
    match oracle_type(sig, ctx, &mut stack, t) {
        Ok(ty) => beta_eta_eq(&ty, a),
        Err(_) => false,
    }
}

// ----------------------------------------------------------------- tests --

#[test]
fn oracle_agrees_on_the_evaluation_example() {
    let sig = fixtures::lam_signature();
    let ctx = Context::new();
    let (deriv, classifier) = fixtures::ev_example();
    assert!(oracle_checks(&sig, &ctx, &deriv, &classifier));
    assert!(check_object(&ctx, &sig, &deriv, &classifier).is_ok());

    // And both reject the derivation at a wrong result value.
    let wrong = fixtures::capp(
        "eval",
        vec![
            fixtures::capp(
                "app",
                vec![
                    fixtures::capp("abs", vec![fixtures::tm_id()]),
                    fixtures::capp("abs", vec![fixtures::tm_id()]),
                ],
            ),
            fixtures::capp(
                "app",
                vec![
                    fixtures::capp("abs", vec![fixtures::tm_id()]),
                    fixtures::capp("abs", vec![fixtures::tm_id()]),
                ],
            ),
        ],
    );
    assert!(!oracle_checks(&sig, &ctx, &deriv, &wrong));
    assert!(check_object(&ctx, &sig, &deriv, &wrong).is_err());
}

#[test]
fn oracle_agrees_on_the_subred_clause_classifiers() {
    // Every object declaration's classifier instantiated with itself:
    // check the constant eta-expanded at its own classifier, both ways.
    let sig = fixtures::subred_signature();
    let ctx = Context::new();
    for d in sig.decls().filter(|d| !d.is_family) {
        let c = Term::cnst(&d.name);
        let ok_kernel = check_object(&ctx, &sig, &c, &d.classifier).is_ok();
        let ok_oracle = oracle_checks(&sig, &ctx, &c, &d.classifier);
        assert!(ok_kernel && ok_oracle, "constant {}", d.name);
    }
}

fn mutate(t: &Term, rng: &mut XorShift) -> Term {
    // Replace the k-th node (pre-order) with a closed pseudo-random object.
    fn count(t: &Term) -> usize {
        match t {
            Term::Type => 1,
            Term::Pi(a, b) | Term::Lam(a, b) => 1 + count(a) + count(b),
            Term::App(_, sp) => 1 + sp.iter().map(count).sum::<usize>(),
            Term::Redex(f, sp) => 1 + count(f) + sp.iter().map(count).sum::<usize>(),
        }
    }
    fn replace(t: &Term, k: &mut usize, new: &Term) -> Term {
        if *k == 0 {
            *k = usize::MAX;
            return new.clone();
        }
        *k -= 1;
        match t {
            Term::Type => Term::Type,
            Term::Pi(a, b) => Term::pi(replace(a, k, new), replace(b, k, new)),
            Term::Lam(a, b) => Term::lam(replace(a, k, new), replace(b, k, new)),
            Term::App(h, sp) => Term::App(
                h.clone(),
                sp.iter().map(|u| replace(u, k, new)).collect(),
            ),
            Term::Redex(f, sp) => Term::Redex(
                Box::new(replace(f, k, new)),
                sp.iter().map(|u| replace(u, k, new)).collect(),
            ),
        }
    }
    let replacements = [
        fixtures::cnst("z"),
        fixtures::capp("abs", vec![fixtures::tm_id()]),
        fixtures::tm_id(),
        fixtures::cnst("b"),
    ];
    let new = &replacements[rng.below(replacements.len())];
    let mut k = rng.below(count(t));
    replace(t, &mut k, new)
}

#[test]
fn kernel_and_oracle_agree_on_generated_and_mutated_terms() {
    let sig = fixtures::subred_signature();
    let tm = fixtures::cnst("tm");
    let ty = fixtures::cnst("ty");
    let tmtm = Term::arrow(tm.clone(), tm.clone());
    let pool = [tm.clone(), ty.clone(), tmtm.clone()];
    let mut rng = XorShift::new(20240811);
    let mut checked = 0;
    let mut rejected = 0;
    for round in 0..300 {
        let ctx = gen_context("g", &pool, rng.below(4), &mut rng);
        let classifier = pool[rng.below(pool.len())].clone();
        let Some(t) = gen_object(&sig, &ctx, &classifier, 3, &mut rng) else {
            continue;
        };
        // Well-typed by construction: both must accept.
        assert!(
            check_object(&ctx, &sig, &t, &classifier).is_ok(),
            "round {round}: kernel rejects generated term {t}"
        );
        assert!(
            oracle_checks(&sig, &ctx, &t, &classifier),
            "round {round}: oracle rejects generated term {t}"
        );
        // A mutant may or may not stay well-typed; the verdicts must agree.
        let m = mutate(&t, &mut rng);
        let kernel = check_object(&ctx, &sig, &m, &classifier).is_ok();
        let oracle = oracle_checks(&sig, &ctx, &m, &classifier);
        assert_eq!(
            kernel, oracle,
            "round {round}: verdicts diverge on mutant {m} at {classifier}"
        );
        checked += 1;
        if !kernel {
            rejected += 1;
        }
    }
    assert!(checked >= 250, "enough rounds exercised ({checked})");
    assert!(rejected >= 50, "mutations produced ill-typed terms ({rejected})");
}

#[test]
fn canonical_forms_are_frozen_for_the_fixture_decls() {
    // Hand-computed canonical classifiers, pinned as strings: the kernel's
    // eta-expansion and de Bruijn bookkeeping must not drift.
    let sig = fixtures::subred_signature();
    let plus_sig = fixtures::nat_signature();
    let plus_s = plus_sig.get(&name("plus-s")).unwrap();
    assert_eq!(
        plus_s.classifier.to_string(),
        "{_ : nat} {_ : nat} {_ : nat} {_ : (plus #2 #1 #0)} (plus (s #3) #2 (s #1))"
    );
    let ev_abs = sig.get(&name("ev-abs")).unwrap();
    assert_eq!(
        ev_abs.classifier.to_string(),
        "{_ : {_ : tm} tm} (eval (abs [_ : tm] (#1 #0)) (abs [_ : tm] (#1 #0)))"
    );
}
