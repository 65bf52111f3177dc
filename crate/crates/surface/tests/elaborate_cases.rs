//! The corpus files elaborate to the same declarations as the hand-built
//! signatures. Clause declarations are compared in full (hints and subgoal
//! order included); data constructors are compared up to display hints and
//! the operational reading of their argument positions, which the
//! hand-built signatures leave empty.

use std::collections::BTreeMap;

use totem_lf::fixtures::{lam_signature, nat_signature, subred_signature};
use totem_lf::{name, Decl, Name, Signature, Term};
use totem_surface::load_signature;

fn corpus(file: &str) -> String {
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(file);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn load(file: &str) -> totem_surface::Elaborated {
    load_signature(&corpus(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

/// Equality on everything except display hints and subgoal order.
fn assert_core_eq(got: &Signature, want: &Signature, c: &str) {
    let g = got.get(&name(c)).unwrap_or_else(|| panic!("{c} missing"));
    let w = want.get(&name(c)).unwrap_or_else(|| panic!("{c} missing in fixture"));
    assert_eq!(g.classifier, w.classifier, "classifier of {c}");
    assert_eq!(g.is_family, w.is_family, "level of {c}");
    assert_eq!(g.implicit, w.implicit, "implicit count of {c}");
}

fn assert_full_eq(got: &Signature, want: &Signature, c: &str) {
    assert_eq!(
        got.get(&name(c)),
        want.get(&name(c)),
        "declaration {c} differs"
    );
}

#[test]
fn nat_corpus_matches_the_hand_built_signature() {
    let e = load("nat.elf");
    let hand = nat_signature();
    for c in ["plus-z", "plus-s"] {
        assert_full_eq(&e.signature, &hand, c);
    }
    for c in ["nat", "z", "s", "plus"] {
        assert_core_eq(&e.signature, &hand, c);
    }
    // Constructors get the operational reading of their arguments: solving
    // a `nat` goal through `s` has the argument as a subgoal.
    assert_eq!(e.signature.get(&name("s")).unwrap().premise_order, vec![0]);
    assert_eq!(e.modes.len(), 1);
    assert_eq!(e.modes[0].family, "plus");
    assert_eq!(e.totals.len(), 1);
    assert_eq!(e.totals[0].family, "plus");
}

#[test]
fn eval_corpus_matches_the_hand_built_signature() {
    let e = load("eval.elf");
    let hand = lam_signature();
    for c in ["eval", "ev-app", "ev-abs"] {
        assert_full_eq(&e.signature, &hand, c);
    }
    for c in ["tm", "app", "abs"] {
        assert_core_eq(&e.signature, &hand, c);
    }
    assert_eq!(e.modes.len(), 1);
    assert!(e.totals.is_empty());
}

#[test]
fn subred_corpus_matches_the_hand_built_signature() {
    let e = load("subred.elf");
    let hand = subred_signature();
    for c in ["eval", "ev-app", "ev-abs", "ty", "b", "of", "of-app", "of-abs", "sr-abs"] {
        assert_full_eq(&e.signature, &hand, c);
    }
    for c in ["tm", "app", "abs", "arr", "subred"] {
        assert_core_eq(&e.signature, &hand, c);
    }
}

/// Open a declaration's telescope with its own hint names, returning the
/// named binder classifiers and the named target.
fn open_with_hints(d: &Decl) -> (Vec<(Name, Term)>, Term) {
    let mut cur = d.classifier.clone();
    let mut out = Vec::new();
    for h in &d.arg_hints {
        let Term::Pi(a, b) = cur else {
            panic!("telescope shorter than the hints")
        };
        out.push((h.clone(), (*a).clone()));
        cur = b.open(&Term::var(h));
    }
    (out, cur)
}

/// sr-app reconstructs with a different order of implicit parameters than
/// the hand-built declaration (first textual occurrence instead of the
/// fixture's grouping), so the two classifiers differ as terms. Everything
/// meaningful agrees: arity, implicit count, subgoal order, and — once both
/// telescopes are opened with their own variable names — the target and
/// every premise and parameter classifier.
#[test]
fn sr_app_matches_the_fixture_up_to_implicit_permutation() {
    let e = load("subred.elf");
    let hand = subred_signature();
    let got = e.signature.get(&name("sr-app")).unwrap();
    let want = hand.get(&name("sr-app")).unwrap();

    assert_eq!(got.arity(), 14);
    assert_eq!(got.implicit, 12);
    assert_eq!(got.premise_order, want.premise_order);
    assert_eq!(got.premise_order, vec![13, 12]);

    let (gb, gt) = open_with_hints(got);
    let (wb, wt) = open_with_hints(want);
    assert_eq!(gt, wt, "targets differ once named");
    // Positions 12 and 13 are the two subgoals in both declarations.
    assert_eq!(gb[12].1, wb[12].1, "second subgoal differs");
    assert_eq!(gb[13].1, wb[13].1, "first subgoal differs");
    // The implicit parameters carry the same names and classifiers,
    // merely in a different order.
    let gmap: BTreeMap<_, _> = gb[..12].iter().cloned().collect();
    let wmap: BTreeMap<_, _> = wb[..12].iter().cloned().collect();
    assert_eq!(gmap, wmap);
}

/// The ascription in sr-abs only documents what reconstruction infers:
/// removing it generalizes the typing hole to the same implicit binder.
#[test]
fn sr_abs_elaborates_identically_without_the_ascription() {
    let with = load("subred.elf");
    let stripped = corpus("subred.elf").replace(
        "sr-abs : subred (ev-abs M) Dty (Dty : of (abs M) T).",
        "sr-abs : subred (ev-abs M) Dty Dty.",
    );
    assert_ne!(stripped, corpus("subred.elf"), "replacement must apply");
    let without = load_signature(&stripped).expect("stripped corpus");
    assert_eq!(
        with.signature.get(&name("sr-abs")),
        without.signature.get(&name("sr-abs"))
    );
}

#[test]
fn unit_corpus_elaborates() {
    let e = load("unit.elf");
    assert!(e.signature.get(&name("triv")).unwrap().is_family);
    let tt = e.signature.get(&name("triv-tt")).unwrap();
    assert_eq!(tt.implicit, 0);
    assert!(tt.premise_order.is_empty());
    assert_eq!(e.totals.len(), 1);
}
