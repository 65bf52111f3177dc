//! Matching recovers the substitution that built the instance.
//!
//! For a generated pattern `p` and substitution `s` whose images avoid the
//! pattern variables, matching `p` against `p[s]` must succeed and agree
//! with `s` on every pattern variable that actually occurs. Matching `p`
//! against itself must come back as a renaming.

use totem_lf::fixtures::{capp, cnst, lam_named, subred_signature, var, vapp};
use totem_lf::gen::{gen_object, gen_subst, XorShift};
use totem_lf::{name, Context, Substitution, Supply, Term};
use totem_unify::match_terms;

fn tm() -> Term {
    cnst("tm")
}

fn ty() -> Term {
    cnst("ty")
}

fn rigid_ctx() -> Context {
    let mut ctx = Context::new();
    ctx.push(name("x"), tm());
    ctx.push(name("y"), tm());
    ctx.push(name("f"), Term::arrow(tm(), tm()));
    ctx
}

fn flex_ctx() -> Context {
    let mut ctx = Context::new();
    ctx.push(name("A"), tm());
    ctx.push(name("B"), tm());
    ctx.push(name("C"), ty());
    ctx
}

#[test]
fn matching_a_built_instance_recovers_the_substitution() {
    let sig = subred_signature();
    let rigid = rigid_ctx();
    let flex = flex_ctx();
    let mut pattern_ctx = rigid.clone();
    for (x, a) in flex.iter() {
        pattern_ctx.push(x.clone(), a.clone());
    }

    let mut rng = XorShift::new(2024);
    let mut srng = XorShift::new(777);
    let mut rounds = 0usize;
    let mut nontrivial = 0usize;
    for i in 0..500 {
        let want = if i % 5 == 0 { ty() } else { tm() };
        let Some(p) = gen_object(&sig, &pattern_ctx, &want, 3, &mut rng) else {
            continue;
        };
        let Some(s) = gen_subst(&sig, &rigid, &flex, 2, &mut srng) else {
            continue;
        };
        let instance = s.apply(&p);
        let mut supply = Supply::starting_at(5000);
        let got = match_terms(&flex, &p, &instance, &mut supply)
            .expect("generated patterns stay in the fragment")
            .unwrap_or_else(|| panic!("match failed on its own instance: {p} vs {instance}"));
        assert_eq!(got.apply(&p), instance);
        let mut used_flex = false;
        for v in p.free_vars() {
            if flex.contains(&v) {
                used_flex = true;
                assert_eq!(
                    got.get(&v),
                    s.get(&v),
                    "matching disagrees with the instantiation on {v}"
                );
            }
        }
        rounds += 1;
        if used_flex {
            nontrivial += 1;
        }
    }
    assert!(rounds >= 400, "generators mostly succeed ({rounds} rounds)");
    assert!(
        nontrivial >= 150,
        "enough patterns mention a unification variable ({nontrivial})"
    );
}

#[test]
fn matching_a_goal_against_itself_is_a_renaming() {
    let sig = subred_signature();
    let rigid = rigid_ctx();
    let flex = flex_ctx();
    let mut pattern_ctx = rigid.clone();
    for (x, a) in flex.iter() {
        pattern_ctx.push(x.clone(), a.clone());
    }
    let mut rng = XorShift::new(4096);
    for i in 0..100 {
        let want = if i % 5 == 0 { ty() } else { tm() };
        let Some(p) = gen_object(&sig, &pattern_ctx, &want, 3, &mut rng) else {
            continue;
        };
        let mut supply = Supply::starting_at(5000);
        let s = match_terms(&flex, &p, &p, &mut supply)
            .expect("self-match stays in the fragment")
            .expect("a goal covers itself");
        assert!(s.is_renaming(), "self-match binds variables to variables");
        assert_eq!(s.apply(&p), p);
    }
}

#[test]
fn typing_rule_conclusion_matches_the_identity_instance() {
    // of (abs M') (arr T1 T2) against of (abs [x] x) (arr b b):
    // M' goes to the identity, both type variables go to the base type.
    let mut flex = Context::new();
    flex.push(name("M'"), Term::arrow(tm(), tm()));
    flex.push(name("T1"), ty());
    flex.push(name("T2"), ty());
    let pattern = capp(
        "of",
        vec![
            capp("abs", vec![lam_named(&[("u", tm())], vapp("M'", vec![var("u")]))]),
            capp("arr", vec![var("T1"), var("T2")]),
        ],
    );
    let id = Term::lam(tm(), Term::bound(0));
    let target = capp(
        "of",
        vec![
            capp("abs", vec![id.clone()]),
            capp("arr", vec![cnst("b"), cnst("b")]),
        ],
    );
    let mut supply = Supply::new();
    let s = match_terms(&flex, &pattern, &target, &mut supply)
        .unwrap()
        .expect("the instance matches");
    let mut expect = Substitution::identity();
    expect.bind(name("M'"), id);
    expect.bind(name("T1"), cnst("b"));
    expect.bind(name("T2"), cnst("b"));
    for v in ["M'", "T1", "T2"] {
        assert_eq!(s.get(&name(v)), expect.get(&name(v)));
    }
    assert_eq!(s.apply(&pattern), target);
}
