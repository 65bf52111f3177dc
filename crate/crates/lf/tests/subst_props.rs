//! Property tests for substitution: the composition law, associativity,
//! identity laws, and preservation of substitution typing under
//! composition. All inputs are generated deterministically.

use totem_lf::ctx::Context;
use totem_lf::fixtures;
use totem_lf::gen::{gen_context, gen_object, gen_subst, XorShift};
use totem_lf::subst::Substitution;
use totem_lf::syntax::Term;
use totem_lf::typing::check_subst_typing;

fn pool() -> Vec<Term> {
    let tm = fixtures::cnst("tm");
    let ty = fixtures::cnst("ty");
    vec![tm.clone(), ty, Term::arrow(tm.clone(), tm)]
}

#[test]
fn composition_law_and_associativity() {
    let sig = fixtures::subred_signature();
    let pool = pool();
    let mut rng = XorShift::new(99);
    let mut rounds = 0;
    while rounds < 500 {
        let g1 = gen_context("a", &pool, 1 + rng.below(3), &mut rng);
        let g2 = gen_context("b", &pool, 1 + rng.below(3), &mut rng);
        let g3 = gen_context("c", &pool, 1 + rng.below(3), &mut rng);
        let (Some(s1), Some(s2), Some(s3)) = (
            gen_subst(&sig, &g2, &g1, 2, &mut rng),
            gen_subst(&sig, &g3, &g2, 2, &mut rng),
            gen_subst(&sig, &g3, &g3, 2, &mut rng),
        ) else {
            continue;
        };
        // A term over the union of the domains, so both halves get exercised.
        let mixed = g1.extended(&g2);
        let classifier = &pool[rng.below(pool.len())];
        let Some(t) = gen_object(&sig, &mixed, classifier, 3, &mut rng) else {
            continue;
        };
        let s12 = s1.compose(&s2);
        assert_eq!(
            s12.apply(&t),
            s2.apply(&s1.apply(&t)),
            "composition law failed for t = {t}, s1 = {s1}, s2 = {s2}"
        );
        assert_eq!(
            s12.compose(&s3),
            s1.compose(&s2.compose(&s3)),
            "associativity failed for s1 = {s1}, s2 = {s2}, s3 = {s3}"
        );
        let id = Substitution::identity();
        assert_eq!(id.compose(&s1), s1);
        assert_eq!(s1.compose(&id), s1);
        rounds += 1;
    }
}

#[test]
fn composition_preserves_substitution_typing() {
    // If g2 |- s1 : g1 and g3 |- s2 : g2 then g3 |- s1 . s2 : g1.
    let sig = fixtures::subred_signature();
    let pool = pool();
    let mut rng = XorShift::new(7777);
    let mut rounds = 0;
    while rounds < 200 {
        let g1 = gen_context("x", &pool, 1 + rng.below(3), &mut rng);
        let g2 = gen_context("y", &pool, 1 + rng.below(3), &mut rng);
        let g3 = gen_context("z", &pool, 1 + rng.below(3), &mut rng);
        let (Some(s1), Some(s2)) = (
            gen_subst(&sig, &g2, &g1, 2, &mut rng),
            gen_subst(&sig, &g3, &g2, 2, &mut rng),
        ) else {
            continue;
        };
        check_subst_typing(&g2, &sig, &s1, &g1).expect("s1 is typed by construction");
        check_subst_typing(&g3, &sig, &s2, &g2).expect("s2 is typed by construction");
        check_subst_typing(&g3, &sig, &s1.compose(&s2), &g1)
            .unwrap_or_else(|e| panic!("composite not typed: {e}; s1 = {s1}, s2 = {s2}"));
        rounds += 1;
    }
}

#[test]
fn empty_composition_is_the_other_substitution() {
    // The composition domain is the union of both domains; composing with
    // the empty substitution on either side changes nothing.
    let theta = Substitution::from_pairs([(totem_lf::name("x"), fixtures::cnst("z"))]);
    assert_eq!(Substitution::identity().compose(&theta), theta);
    assert_eq!(theta.compose(&Substitution::identity()), theta);
}

#[test]
fn minimal_domain_is_minimal_and_sufficient() {
    let sig = fixtures::subred_signature();
    let pool = pool();
    let mut rng = XorShift::new(31337);
    let mut rounds = 0;
    while rounds < 100 {
        let g1 = gen_context("p", &pool, 1 + rng.below(3), &mut rng);
        let gamma = gen_context("q", &pool, 2 + rng.below(3), &mut rng);
        let Some(s) = gen_subst(&sig, &gamma, &g1, 2, &mut rng) else {
            continue;
        };
        let min = totem_lf::minimal_domain_context(&gamma, &sig, &s, &g1).unwrap();
        // Sufficient: typing holds over the minimal context (checked inside),
        // and minimal: dropping any remaining entry breaks typing or was
        // never needed.
        for (x, _) in min.iter() {
            let without: Context = min.iter().filter(|(y, _)| y != x).cloned().collect();
            assert!(
                check_subst_typing(&without, &sig, &s, &g1).is_err(),
                "entry {x} was not needed"
            );
        }
        rounds += 1;
    }
}
