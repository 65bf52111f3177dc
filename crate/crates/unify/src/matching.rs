//! One-sided unification (matching) between a pattern with metavariables
//! and a target without any. Coverage checking needs slightly more than a
//! yes/no answer: when a pattern fails only because the target still has a
//! variable where the pattern demands structure, the match is *blocked* on
//! that variable, and splitting it may let the pattern apply after all.

use std::collections::VecDeque;

use thiserror::Error;
use totem_lf::{Context, Head, Name, Substitution, Supply, Term};

use crate::shared::{lambda_solution, spine_as_distinct_vars};

/// The pattern steps outside the fragment that matching can decide.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("outside the pattern fragment: {0}")]
pub struct FragmentError(pub String);

#[derive(Clone, Debug, PartialEq)]
pub enum MatchVerdict {
    /// The pattern matches; the substitution sends pattern variables that
    /// occur in the pattern to the corresponding target subterms.
    Covered(Substitution),
    /// No match, but only because the listed target variables are still
    /// uninstantiated where the pattern has rigid structure.
    Blocked(Vec<Name>),
    /// No refinement of the target can ever match this pattern.
    Incompatible,
}

struct Eq {
    locals: Context,
    pat: Term,
    tgt: Term,
}

/// Match `pattern` against `target`. `flex` lists the pattern's
/// metavariables; `splittable` lists the target-side variables that the
/// caller could still refine (anything else free in the target is rigid).
pub fn match_or_block(
    flex: &Context,
    splittable: &[Name],
    pattern: &Term,
    target: &Term,
    supply: &mut Supply,
) -> Result<MatchVerdict, FragmentError> {
    let mut queue: VecDeque<Eq> = VecDeque::new();
    queue.push_back(Eq {
        locals: Context::new(),
        pat: pattern.clone(),
        tgt: target.clone(),
    });
    let mut bindings = Substitution::identity();
    let mut blocked: Vec<Name> = Vec::new();
    let block = |xs: &mut Vec<Name>, x: &Name| {
        if !xs.contains(x) {
            xs.push(x.clone());
        }
    };
    while let Some(Eq { locals, pat, tgt }) = queue.pop_front() {
        let pat = bindings.apply(&pat);
        if pat == tgt {
            continue;
        }
        match (pat, tgt) {
            (Term::Redex(..), _) | (_, Term::Redex(..)) => {
                return Err(FragmentError("non-canonical term in a match".to_string()))
            }
            (Term::Lam(a1, b1), Term::Lam(a2, b2)) => {
                let z = supply.fresh("u");
                let mut inner = locals.clone();
                // The target side is ground, so its domain classifies the
                // opened local.
                inner.push(z.clone(), (*a2).clone());
                queue.push_back(Eq {
                    locals,
                    pat: *a1,
                    tgt: *a2,
                });
                queue.push_back(Eq {
                    locals: inner,
                    pat: b1.open(&Term::var(&z)),
                    tgt: b2.open(&Term::var(&z)),
                });
            }
            (Term::Pi(a1, b1), Term::Pi(a2, b2)) => {
                let z = supply.fresh("u");
                let mut inner = locals.clone();
                inner.push(z.clone(), (*a2).clone());
                queue.push_back(Eq {
                    locals,
                    pat: *a1,
                    tgt: *a2,
                });
                queue.push_back(Eq {
                    locals: inner,
                    pat: b1.open(&Term::var(&z)),
                    tgt: b2.open(&Term::var(&z)),
                });
            }
            (Term::Lam(a, b), t @ Term::App(..)) => {
                let z = supply.fresh("u");
                let mut inner = locals.clone();
                inner.push(z.clone(), (*a).clone());
                queue.push_back(Eq {
                    locals: inner,
                    pat: b.open(&Term::var(&z)),
                    tgt: t.apply(vec![Term::var(&z)]),
                });
            }
            (p @ Term::App(..), Term::Lam(a, b)) => {
                let z = supply.fresh("u");
                let mut inner = locals.clone();
                inner.push(z.clone(), (*a).clone());
                queue.push_back(Eq {
                    locals: inner,
                    pat: p.apply(vec![Term::var(&z)]),
                    tgt: b.open(&Term::var(&z)),
                });
            }
            (Term::App(ph, psp), tgt) => {
                let flex_head = match &ph {
                    Head::Free(x) if flex.contains(x) && !locals.contains(x) => Some(x.clone()),
                    _ => None,
                };
                if let Some(x) = flex_head {
                    let Some(spine) = spine_as_distinct_vars(&psp) else {
                        return Err(FragmentError(format!(
                            "pattern variable {x} applied to a non-variable spine"
                        )));
                    };
                    if let Some(bad) = spine.iter().find(|z| !locals.contains(z)) {
                        return Err(FragmentError(format!(
                            "pattern variable {x} applied to {bad}, which is not locally bound"
                        )));
                    }
                    // A target local outside the spine can never be matched
                    // away: the pattern is dead here.
                    let escaped = tgt
                        .free_vars()
                        .into_iter()
                        .any(|y| locals.contains(&y) && !spine.contains(&y));
                    if escaped {
                        return Ok(MatchVerdict::Incompatible);
                    }
                    let value = lambda_solution(&spine, &tgt, &locals, &|y| locals.contains(y))
                        .map_err(FragmentError)?;
                    // Repeated occurrences of x were already replaced by the
                    // first value when this equation was popped, so x is
                    // still unbound here; nonlinear conflicts surface later
                    // as rigid comparisons between the two values.
                    bindings.bind(x, value);
                } else {
                    match tgt {
                        Term::App(th, tsp) => {
                            if ph == th {
                                if psp.len() != tsp.len() {
                                    return Ok(MatchVerdict::Incompatible);
                                }
                                for (p, t) in psp.into_iter().zip(tsp) {
                                    queue.push_back(Eq {
                                        locals: locals.clone(),
                                        pat: p,
                                        tgt: t,
                                    });
                                }
                            } else if let Head::Free(g) = &th {
                                if splittable.contains(g) {
                                    block(&mut blocked, g);
                                } else {
                                    return Ok(MatchVerdict::Incompatible);
                                }
                            } else {
                                return Ok(MatchVerdict::Incompatible);
                            }
                        }
                        _ => return Ok(MatchVerdict::Incompatible),
                    }
                }
            }
            (Term::Pi(..) | Term::Type, Term::App(th, _)) => {
                // Pattern-side Pi or Type against a target application: only
                // a refinable variable head leaves any hope.
                if let Head::Free(g) = &th {
                    if splittable.contains(g) {
                        block(&mut blocked, g);
                        continue;
                    }
                }
                return Ok(MatchVerdict::Incompatible);
            }
            _ => return Ok(MatchVerdict::Incompatible),
        }
    }
    if blocked.is_empty() {
        Ok(MatchVerdict::Covered(bindings))
    } else {
        Ok(MatchVerdict::Blocked(blocked))
    }
}

/// Plain matching: most general `σ` with `pattern[σ] ≡ target`, or `None`.
pub fn match_terms(
    flex: &Context,
    pattern: &Term,
    target: &Term,
    supply: &mut Supply,
) -> Result<Option<Substitution>, FragmentError> {
    match match_or_block(flex, &[], pattern, target, supply)? {
        MatchVerdict::Covered(s) => Ok(Some(s)),
        MatchVerdict::Blocked(_) | MatchVerdict::Incompatible => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use totem_lf::fixtures::{capp, cnst, lam_named, var};
    use totem_lf::name;

    fn flex(entries: &[(&str, Term)]) -> Context {
        let mut ctx = Context::new();
        for (x, a) in entries {
            ctx.push(name(x), a.clone());
        }
        ctx
    }

    #[test]
    fn first_order_match_and_nonlinear_failure() {
        let mut supply = Supply::new();
        let fx = flex(&[("E", cnst("tm")), ("V", cnst("tm"))]);
        let s = match_terms(
            &fx,
            &capp("eval", vec![var("E"), var("V")]),
            &capp("eval", vec![var("x"), var("y")]),
            &mut supply,
        )
        .unwrap()
        .unwrap();
        assert_eq!(s.get(&name("E")), Some(&var("x")));
        assert_eq!(s.get(&name("V")), Some(&var("y")));

        let fx = flex(&[("M", cnst("tm"))]);
        let got = match_terms(
            &fx,
            &capp("app", vec![var("M"), var("M")]),
            &capp("app", vec![var("x"), var("y")]),
            &mut supply,
        )
        .unwrap();
        assert!(got.is_none(), "nonlinear pattern must not match distinct rigids");
    }

    #[test]
    fn higher_order_pattern_match() {
        let mut supply = Supply::new();
        // abs ([x] M' x) against abs ([x] app x x).
        let fx = flex(&[("M'", Term::arrow(cnst("tm"), cnst("tm")))]);
        let pat = capp(
            "abs",
            vec![lam_named(
                &[("x", cnst("tm"))],
                Term::App(Head::Free(name("M'")), vec![var("x")]),
            )],
        );
        let tgt = capp(
            "abs",
            vec![lam_named(
                &[("x", cnst("tm"))],
                capp("app", vec![var("x"), var("x")]),
            )],
        );
        let s = match_terms(&fx, &pat, &tgt, &mut supply).unwrap().unwrap();
        assert_eq!(
            s.get(&name("M'")),
            Some(&lam_named(
                &[("x", cnst("tm"))],
                capp("app", vec![var("x"), var("x")])
            ))
        );
    }

    #[test]
    fn blocked_positions_are_reported() {
        let mut supply = Supply::new();
        let fx = flex(&[("M", Term::arrow(cnst("tm"), cnst("tm")))]);
        // Pattern eval (abs M) (abs M) against goal eval E V: both argument
        // positions put rigid structure against a goal variable.
        let pat = capp(
            "eval",
            vec![capp("abs", vec![var("M")]), capp("abs", vec![var("M")])],
        );
        let tgt = capp("eval", vec![var("E"), var("V")]);
        let got = match_or_block(&fx, &[name("E"), name("V")], &pat, &tgt, &mut supply).unwrap();
        assert_eq!(got, MatchVerdict::Blocked(vec![name("E"), name("V")]));
        // Same pattern against eval (app x y) V: the app head clashes.
        let tgt = capp(
            "eval",
            vec![capp("app", vec![var("x"), var("y")]), var("V")],
        );
        let got = match_or_block(&fx, &[name("V")], &pat, &tgt, &mut supply).unwrap();
        assert_eq!(got, MatchVerdict::Incompatible);
    }
}
