//! Hand-built signatures used across the workspace's tests and examples:
//! natural numbers with addition, a call-by-name evaluator for the untyped
//! lambda calculus together with simple typing, and the subject-reduction
//! relation connecting them.
//!
//! Everything here is constructed with a named-binder helper and then run
//! through the kernel checker, so the returned signatures are canonical.

use crate::sig::{Decl, Signature};
use crate::syntax::{name, Head, Name, Term};
use crate::typing::check_signature;

/// Build a Pi-telescope from named binders. Domains and the target may refer
/// to earlier binders by name; the names are closed into de Bruijn indices.
pub fn pi_named(binders: &[(&str, Term)], target: Term) -> Term {
    let mut t = target;
    for (x, a) in binders.iter().rev() {
        t = Term::pi(a.clone(), t.close(&name(x)));
    }
    t
}

/// Build a lambda-telescope from named binders, closing names like
/// [`pi_named`].
pub fn lam_named(binders: &[(&str, Term)], body: Term) -> Term {
    let mut t = body;
    for (x, a) in binders.iter().rev() {
        t = Term::lam(a.clone(), t.close(&name(x)));
    }
    t
}

/// Constant applied to a spine.
pub fn capp(c: &str, args: Vec<Term>) -> Term {
    Term::App(Head::Const(name(c)), args)
}

/// Free variable applied to a spine.
pub fn vapp(x: &str, args: Vec<Term>) -> Term {
    Term::App(Head::Free(name(x)), args)
}

pub fn cnst(c: &str) -> Term {
    Term::cnst(&name(c))
}

pub fn var(x: &str) -> Term {
    Term::var(&name(x))
}

fn hints(hs: &[&str]) -> Vec<Name> {
    hs.iter().map(|h| name(h)).collect()
}

fn decl(
    sig: &mut Signature,
    nm: &str,
    classifier: Term,
    is_family: bool,
    implicit: usize,
    arg_hints: &[&str],
    premise_order: &[usize],
) {
    sig.push(Decl {
        name: name(nm),
        classifier,
        is_family,
        implicit,
        arg_hints: hints(arg_hints),
        premise_order: premise_order.to_vec(),
    })
    .expect("fixture names are distinct");
}

fn seal(sig: Signature) -> Signature {
    check_signature(&sig).expect("fixture signature is well-formed")
}

/// nat, z, s, plus and its two clauses.
pub fn nat_signature() -> Signature {
    let mut sig = Signature::new();
    let nat = cnst("nat");
    decl(&mut sig, "nat", Term::Type, true, 0, &[], &[]);
    decl(&mut sig, "z", nat.clone(), false, 0, &[], &[]);
    decl(
        &mut sig,
        "s",
        Term::arrow(nat.clone(), nat.clone()),
        false,
        0,
        &["N"],
        &[],
    );
    decl(
        &mut sig,
        "plus",
        pi_named(
            &[("M", nat.clone()), ("N", nat.clone()), ("K", nat.clone())],
            Term::Type,
        ),
        true,
        0,
        &["M", "N", "K"],
        &[],
    );
    // plus-z : plus z N N.
    decl(
        &mut sig,
        "plus-z",
        pi_named(
            &[("N", nat.clone())],
            capp("plus", vec![cnst("z"), var("N"), var("N")]),
        ),
        false,
        1,
        &["N"],
        &[],
    );
    // plus-s : plus (s M) N (s K) <- plus M N K.
    decl(
        &mut sig,
        "plus-s",
        pi_named(
            &[
                ("M", nat.clone()),
                ("N", nat.clone()),
                ("K", nat.clone()),
                ("D", capp("plus", vec![var("M"), var("N"), var("K")])),
            ],
            capp(
                "plus",
                vec![
                    capp("s", vec![var("M")]),
                    var("N"),
                    capp("s", vec![var("K")]),
                ],
            ),
        ),
        false,
        3,
        &["M", "N", "K", "D"],
        &[3],
    );
    seal(sig)
}

/// The untyped lambda calculus with call-by-name evaluation and simple
/// typing, all binders explicit.
pub fn lam_signature() -> Signature {
    let mut sig = Signature::new();
    let tm = cnst("tm");
    let tmtm = Term::arrow(tm.clone(), tm.clone());
    decl(&mut sig, "tm", Term::Type, true, 0, &[], &[]);
    decl(
        &mut sig,
        "app",
        Term::arrow(tm.clone(), Term::arrow(tm.clone(), tm.clone())),
        false,
        0,
        &["M", "N"],
        &[],
    );
    decl(
        &mut sig,
        "abs",
        Term::arrow(tmtm.clone(), tm.clone()),
        false,
        0,
        &["M"],
        &[],
    );
    decl(
        &mut sig,
        "eval",
        pi_named(&[("E", tm.clone()), ("V", tm.clone())], Term::Type),
        true,
        0,
        &["E", "V"],
        &[],
    );
    // ev-app : {M}{M'}{N}{V} eval M (abs M') -> eval (M' N) V -> eval (app M N) V.
    decl(
        &mut sig,
        "ev-app",
        pi_named(
            &[
                ("M", tm.clone()),
                ("M'", tmtm.clone()),
                ("N", tm.clone()),
                ("V", tm.clone()),
                ("D1", capp("eval", vec![var("M"), capp("abs", vec![var("M'")])])),
                ("D2", capp("eval", vec![vapp("M'", vec![var("N")]), var("V")])),
            ],
            capp(
                "eval",
                vec![capp("app", vec![var("M"), var("N")]), var("V")],
            ),
        ),
        false,
        0,
        &["M", "M'", "N", "V", "D1", "D2"],
        &[4, 5],
    );
    // ev-abs : {M} eval (abs M) (abs M).
    decl(
        &mut sig,
        "ev-abs",
        pi_named(
            &[("M", tmtm.clone())],
            capp(
                "eval",
                vec![capp("abs", vec![var("M")]), capp("abs", vec![var("M")])],
            ),
        ),
        false,
        0,
        &["M"],
        &[],
    );
    let ty = cnst("ty");
    decl(&mut sig, "ty", Term::Type, true, 0, &[], &[]);
    decl(
        &mut sig,
        "arr",
        Term::arrow(ty.clone(), Term::arrow(ty.clone(), ty.clone())),
        false,
        0,
        &["T1", "T2"],
        &[],
    );
    decl(
        &mut sig,
        "of",
        pi_named(&[("E", tm.clone()), ("T", ty.clone())], Term::Type),
        true,
        0,
        &["E", "T"],
        &[],
    );
    // of-app : {M}{N}{T1}{T} of M (arr T1 T) -> of N T1 -> of (app M N) T.
    decl(
        &mut sig,
        "of-app",
        pi_named(
            &[
                ("M", tm.clone()),
                ("N", tm.clone()),
                ("T1", ty.clone()),
                ("T", ty.clone()),
                (
                    "D1",
                    capp(
                        "of",
                        vec![var("M"), capp("arr", vec![var("T1"), var("T")])],
                    ),
                ),
                ("D2", capp("of", vec![var("N"), var("T1")])),
            ],
            capp("of", vec![capp("app", vec![var("M"), var("N")]), var("T")]),
        ),
        false,
        0,
        &["M", "N", "T1", "T", "D1", "D2"],
        &[4, 5],
    );
    // of-abs : {M}{T1}{T} ({x : tm} of x T1 -> of (M x) T) -> of (abs M) (arr T1 T).
    decl(
        &mut sig,
        "of-abs",
        pi_named(
            &[
                ("M", tmtm.clone()),
                ("T1", ty.clone()),
                ("T", ty.clone()),
                (
                    "D",
                    pi_named(
                        &[
                            ("x", tm.clone()),
                            ("dx", capp("of", vec![var("x"), var("T1")])),
                        ],
                        capp("of", vec![vapp("M", vec![var("x")]), var("T")]),
                    ),
                ),
            ],
            capp(
                "of",
                vec![
                    capp("abs", vec![var("M")]),
                    capp("arr", vec![var("T1"), var("T")]),
                ],
            ),
        ),
        false,
        0,
        &["M", "T1", "T", "D"],
        &[3],
    );
    seal(sig)
}

/// The lambda signature extended with a base type (so closed typing
/// derivations exist) and the subject-reduction family with its two clauses.
pub fn subred_signature() -> Signature {
    let sig0 = lam_signature();
    let mut sig = Signature::new();
    for d in sig0.decls() {
        sig.push(d.clone()).unwrap();
    }
    let tm = cnst("tm");
    let tmtm = Term::arrow(tm.clone(), tm.clone());
    let ty = cnst("ty");
    decl(&mut sig, "b", ty.clone(), false, 0, &[], &[]);
    // subred : eval E V -> of E T -> of V T -> type  (E, V, T implicit).
    decl(
        &mut sig,
        "subred",
        pi_named(
            &[
                ("E", tm.clone()),
                ("V", tm.clone()),
                ("T", ty.clone()),
                ("D1", capp("eval", vec![var("E"), var("V")])),
                ("D2", capp("of", vec![var("E"), var("T")])),
                ("D3", capp("of", vec![var("V"), var("T")])),
            ],
            Term::Type,
        ),
        true,
        3,
        &["E", "V", "T", "D1", "D2", "D3"],
        &[],
    );
    // sr-app, premises in operational order:
    //   A1 = subred M (abs M') (arr T1 T) Dev1 Dty1 (of-abs M' T1 T Dty3)
    //   A2 = subred (M' N) V T Dev2 (Dty3 N Dty2) Dty
    // with head subred (app M N) V T (ev-app ...) (of-app ...) Dty.
    // Written with <-, so the binders carry A2 before A1 and the operational
    // order is [13, 12].
    let a1 = capp(
        "subred",
        vec![
            var("M"),
            capp("abs", vec![var("M'")]),
            capp("arr", vec![var("T1"), var("T")]),
            var("Dev1"),
            var("Dty1"),
            capp(
                "of-abs",
                vec![var("M'"), var("T1"), var("T"), var("Dty3")],
            ),
        ],
    );
    let a2 = capp(
        "subred",
        vec![
            vapp("M'", vec![var("N")]),
            var("V"),
            var("T"),
            var("Dev2"),
            vapp("Dty3", vec![var("N"), var("Dty2")]),
            var("Dty"),
        ],
    );
    let sr_app_head = capp(
        "subred",
        vec![
            capp("app", vec![var("M"), var("N")]),
            var("V"),
            var("T"),
            capp(
                "ev-app",
                vec![
                    var("M"),
                    var("M'"),
                    var("N"),
                    var("V"),
                    var("Dev1"),
                    var("Dev2"),
                ],
            ),
            capp(
                "of-app",
                vec![
                    var("M"),
                    var("N"),
                    var("T1"),
                    var("T"),
                    var("Dty1"),
                    var("Dty2"),
                ],
            ),
            var("Dty"),
        ],
    );
    decl(
        &mut sig,
        "sr-app",
        pi_named(
            &[
                ("M", tm.clone()),
                ("M'", tmtm.clone()),
                ("N", tm.clone()),
                ("V", tm.clone()),
                ("T1", ty.clone()),
                ("T", ty.clone()),
                ("Dev1", capp("eval", vec![var("M"), capp("abs", vec![var("M'")])])),
                (
                    "Dev2",
                    capp("eval", vec![vapp("M'", vec![var("N")]), var("V")]),
                ),
                (
                    "Dty1",
                    capp(
                        "of",
                        vec![var("M"), capp("arr", vec![var("T1"), var("T")])],
                    ),
                ),
                ("Dty2", capp("of", vec![var("N"), var("T1")])),
                (
                    "Dty3",
                    pi_named(
                        &[
                            ("x", tm.clone()),
                            ("dx", capp("of", vec![var("x"), var("T1")])),
                        ],
                        capp("of", vec![vapp("M'", vec![var("x")]), var("T")]),
                    ),
                ),
                ("Dty", capp("of", vec![var("V"), var("T")])),
                ("A2", a2),
                ("A1", a1),
            ],
            sr_app_head,
        ),
        false,
        12,
        &[
            "M", "M'", "N", "V", "T1", "T", "Dev1", "Dev2", "Dty1", "Dty2", "Dty3", "Dty", "D",
            "D",
        ],
        &[13, 12],
    );
    // sr-abs : subred (abs M) (abs M) T (ev-abs M) Dty Dty.
    decl(
        &mut sig,
        "sr-abs",
        pi_named(
            &[
                ("M", tmtm),
                ("T", ty),
                ("Dty", capp("of", vec![capp("abs", vec![var("M")]), var("T")])),
            ],
            capp(
                "subred",
                vec![
                    capp("abs", vec![var("M")]),
                    capp("abs", vec![var("M")]),
                    var("T"),
                    capp("ev-abs", vec![var("M")]),
                    var("Dty"),
                    var("Dty"),
                ],
            ),
        ),
        false,
        3,
        &["M", "T", "Dty"],
        &[],
    );
    seal(sig)
}

/// The identity `[x : tm] x`.
pub fn tm_id() -> Term {
    Term::lam(cnst("tm"), Term::bound(0))
}

/// The worked evaluation example: `(\x. x) (\y. y)` steps to `\y. y`, with
/// its derivation
/// `ev-app (abs [x] x) ([x] x) (abs [y] y) (abs [y] y) (ev-abs [x] x) (ev-abs [y] y)`.
/// Returns the derivation and its classifier.
pub fn ev_example() -> (Term, Term) {
    let id = tm_id();
    let abs_id = capp("abs", vec![id.clone()]);
    let deriv = capp(
        "ev-app",
        vec![
            abs_id.clone(),
            id.clone(),
            abs_id.clone(),
            abs_id.clone(),
            capp("ev-abs", vec![id.clone()]),
            capp("ev-abs", vec![id]),
        ],
    );
    let classifier = capp(
        "eval",
        vec![
            capp("app", vec![abs_id.clone(), abs_id.clone()]),
            abs_id,
        ],
    );
    (deriv, classifier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctx::Context;
    use crate::typing::{check_object, target_of};

    #[test]
    fn fixture_signatures_check() {
        // `seal` already ran the checker; make sure the interesting shapes
        // came out as expected.
        let sig = subred_signature();
        let sr_app = sig.get(&name("sr-app")).unwrap();
        assert_eq!(sr_app.arity(), 14);
        assert_eq!(sr_app.implicit, 12);
        assert_eq!(sr_app.premise_order, vec![13, 12]);
        assert_eq!(sr_app.target_family(), Some(&name("subred")));
        let subred = sig.get(&name("subred")).unwrap();
        assert!(subred.is_family);
        assert_eq!(subred.arity(), 6);
        assert!(matches!(target_of(&subred.classifier), Term::Type));
    }

    #[test]
    fn ev_example_checks_at_its_classifier() {
        let sig = lam_signature();
        let (deriv, classifier) = ev_example();
        let ctx = Context::new();
        let canon = check_object(&ctx, &sig, &deriv, &classifier).unwrap();
        assert_eq!(canon, deriv, "the example derivation is already canonical");
    }

    #[test]
    fn plus_clauses_target_plus() {
        let sig = nat_signature();
        let cs = sig.constants_for(&name("plus"));
        let names: Vec<&str> = cs.iter().map(|d| &*d.name as &str).collect();
        assert_eq!(names, vec!["plus-z", "plus-s"]);
    }
}
