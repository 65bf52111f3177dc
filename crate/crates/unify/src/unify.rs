//! Unification for canonical terms, restricted to the fragment the
//! totality checks need: first-order equations plus metavariables applied
//! to distinct (locally) bound variables. Anything beyond that is refused
//! with `OutsideFragment` rather than answered incorrectly; the callers all
//! treat refusal as a side-condition failure.

use std::collections::VecDeque;

use totem_lf::{Context, Head, Name, Signature, Substitution, Supply, Term};

use crate::shared::{classify_occurrence, lambda_solution, spine_as_distinct_vars, Occ};

/// A unification problem: equations over terms whose free variables are
/// split into the rigid ambient context and the unifiable `flex` context
/// (listed in dependency order; later entries are considered fresher).
#[derive(Clone, Debug)]
pub struct UnifProblem {
    pub ctx: Context,
    pub flex: Context,
    pub eqs: Vec<(Term, Term)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum UnifOutcome {
    /// Most general unifier together with the unsolved flex variables, in
    /// their original order with instantiated classifiers.
    Mgu(Substitution, Context),
    NoSolution,
    OutsideFragment(String),
}

impl UnifOutcome {
    pub fn is_mgu(&self) -> bool {
        matches!(self, UnifOutcome::Mgu(..))
    }
}

/// An equation, carrying the local variables opened while decomposing
/// binders (with their classifiers, for rebuilding lambda solutions).
struct Eq {
    locals: Context,
    lhs: Term,
    rhs: Term,
}

enum Step {
    Done,
    Fail,
    Refuse(String),
}

pub fn unify(sig: &Signature, p: &UnifProblem, supply: &mut Supply) -> UnifOutcome {
    for (l, r) in &p.eqs {
        for t in [l, r] {
            if let Some(c) = undeclared_constant(t, sig) {
                return UnifOutcome::OutsideFragment(format!(
                    "constant {c} is not declared in the signature"
                ));
            }
        }
    }
    let mut st = Solver {
        flex: p.flex.clone(),
        sigma: Substitution::identity(),
        queue: p
            .eqs
            .iter()
            .map(|(l, r)| Eq {
                locals: Context::new(),
                lhs: l.clone(),
                rhs: r.clone(),
            })
            .collect(),
    };
    let mut fuse = 1_000_000u64;
    while let Some(eq) = st.queue.pop_front() {
        fuse -= 1;
        if fuse == 0 {
            panic!("unification failed to terminate on a fragment problem");
        }
        match st.step(eq, supply) {
            Step::Done => {}
            Step::Fail => return UnifOutcome::NoSolution,
            Step::Refuse(why) => return UnifOutcome::OutsideFragment(why),
        }
    }
    let mut out = Context::new();
    for (y, a) in p.flex.iter() {
        if st.sigma.get(y).is_none() {
            out.push(y.clone(), st.sigma.apply(a));
        }
    }
    UnifOutcome::Mgu(st.sigma, out)
}

fn undeclared_constant(t: &Term, sig: &Signature) -> Option<Name> {
    match t {
        Term::Type => None,
        Term::Pi(a, b) | Term::Lam(a, b) => {
            undeclared_constant(a, sig).or_else(|| undeclared_constant(b, sig))
        }
        Term::Redex(f, sp) => undeclared_constant(f, sig)
            .or_else(|| sp.iter().find_map(|a| undeclared_constant(a, sig))),
        Term::App(h, sp) => {
            if let Head::Const(c) = h {
                if sig.get(c).is_none() {
                    return Some(c.clone());
                }
            }
            sp.iter().find_map(|a| undeclared_constant(a, sig))
        }
    }
}

struct Solver {
    flex: Context,
    sigma: Substitution,
    queue: VecDeque<Eq>,
}

impl Solver {
    fn rank(&self, x: &Name) -> Option<usize> {
        self.flex.position(x)
    }

    fn is_flex(&self, x: &Name) -> bool {
        self.rank(x).is_some() && self.sigma.get(x).is_none()
    }

    fn commit(&mut self, x: &Name, u: Term) {
        let mut single = Substitution::identity();
        single.bind(x.clone(), u);
        self.sigma = self.sigma.compose(&single);
        for eq in self.queue.iter_mut() {
            eq.lhs = single.apply(&eq.lhs);
            eq.rhs = single.apply(&eq.rhs);
            eq.locals = eq.locals.apply_subst(&single);
        }
    }

    /// Bind the pattern `x spine = rhs`, after the occurs check and the
    /// check that `rhs` stays inside the variables `x` may depend on.
    fn solve_pattern(
        &mut self,
        locals: &Context,
        x: &Name,
        spine: &[Term],
        rhs: &Term,
    ) -> Step {
        let Some(spine_vars) = spine_as_distinct_vars(spine) else {
            return Step::Refuse(format!(
                "variable {x} is applied to a spine that is not distinct bound variables"
            ));
        };
        if let Some(bad) = spine_vars.iter().find(|z| !locals.contains(z)) {
            return Step::Refuse(format!(
                "variable {x} is applied to {bad}, which is not locally bound"
            ));
        }
        let is_flex = |y: &Name| self.is_flex(y);
        match classify_occurrence(rhs, &is_flex, &|y| y == x, false) {
            Occ::Rigid => return Step::Fail,
            Occ::FlexGuarded => {
                return Step::Refuse(format!(
                    "occurs check for {x} blocked under a metavariable argument"
                ))
            }
            Occ::Absent => {}
        }
        let escapes = |y: &Name| locals.contains(y) && !spine_vars.contains(y);
        match classify_occurrence(rhs, &is_flex, &escapes, false) {
            Occ::Rigid => return Step::Fail,
            Occ::FlexGuarded => {
                return Step::Refuse(format!(
                    "a local variable outside the spine of {x} is blocked under a metavariable"
                ))
            }
            Occ::Absent => {}
        }
        match lambda_solution(&spine_vars, rhs, locals, &|y| locals.contains(y)) {
            Ok(u) => {
                self.commit(x, u);
                Step::Done
            }
            Err(reason) => Step::Refuse(reason),
        }
    }

    fn step(&mut self, eq: Eq, supply: &mut Supply) -> Step {
        let Eq { locals, lhs, rhs } = eq;
        if lhs == rhs {
            return Step::Done;
        }
        match (lhs, rhs) {
            (Term::Redex(..), _) | (_, Term::Redex(..)) => {
                Step::Refuse("non-canonical term in an equation".to_string())
            }
            (Term::Lam(a1, b1), Term::Lam(a2, b2)) => {
                let z = supply.fresh("u");
                let mut inner = locals.clone();
                inner.push(z.clone(), (*a1).clone());
                self.queue.push_back(Eq {
                    locals,
                    lhs: *a1,
                    rhs: *a2,
                });
                self.queue.push_back(Eq {
                    locals: inner,
                    lhs: b1.open(&Term::var(&z)),
                    rhs: b2.open(&Term::var(&z)),
                });
                Step::Done
            }
            (Term::Pi(a1, b1), Term::Pi(a2, b2)) => {
                let z = supply.fresh("u");
                let mut inner = locals.clone();
                inner.push(z.clone(), (*a1).clone());
                self.queue.push_back(Eq {
                    locals,
                    lhs: *a1,
                    rhs: *a2,
                });
                self.queue.push_back(Eq {
                    locals: inner,
                    lhs: b1.open(&Term::var(&z)),
                    rhs: b2.open(&Term::var(&z)),
                });
                Step::Done
            }
            // Eta: a lambda against an application of a (flex or rigid)
            // head. Both sides are applied to a fresh local.
            (Term::Lam(a, b), r @ Term::App(..)) | (r @ Term::App(..), Term::Lam(a, b)) => {
                let z = supply.fresh("u");
                let mut inner = locals.clone();
                inner.push(z.clone(), (*a).clone());
                self.queue.push_back(Eq {
                    locals: inner,
                    lhs: b.open(&Term::var(&z)),
                    rhs: r.apply(vec![Term::var(&z)]),
                });
                Step::Done
            }
            (Term::App(h1, sp1), Term::App(h2, sp2)) => {
                let f1 = head_flex(&h1, self);
                let f2 = head_flex(&h2, self);
                match (f1, f2) {
                    (Some(x), Some(y)) => {
                        if x == y {
                            Step::Refuse(format!(
                                "flex-flex equation on {x} with differing spines"
                            ))
                        } else {
                            self.solve_flex_flex(&locals, &x, sp1, &y, sp2)
                        }
                    }
                    (Some(x), None) => {
                        self.solve_pattern(&locals, &x, &sp1, &Term::App(h2, sp2))
                    }
                    (None, Some(y)) => {
                        self.solve_pattern(&locals, &y, &sp2, &Term::App(h1, sp1))
                    }
                    (None, None) => {
                        if h1 != h2 || sp1.len() != sp2.len() {
                            return Step::Fail;
                        }
                        for (l, r) in sp1.into_iter().zip(sp2) {
                            self.queue.push_back(Eq {
                                locals: locals.clone(),
                                lhs: l,
                                rhs: r,
                            });
                        }
                        Step::Done
                    }
                }
            }
            (Term::App(h, _), _) | (_, Term::App(h, _)) => match head_flex(&h, self) {
                Some(x) => Step::Refuse(format!(
                    "cannot bind {x} to a classifier-level term"
                )),
                None => Step::Fail,
            },
            _ => Step::Fail,
        }
    }

    /// Flex-flex with distinct heads: orient so the fresher variable is
    /// defined in terms of the older one, which keeps the older (typically
    /// caller-named) variables alive in the solution context.
    fn solve_flex_flex(
        &mut self,
        locals: &Context,
        x: &Name,
        sp_x: Vec<Term>,
        y: &Name,
        sp_y: Vec<Term>,
    ) -> Step {
        if sp_x.is_empty() && sp_y.is_empty() {
            let (rx, ry) = (self.rank(x).unwrap(), self.rank(y).unwrap());
            let (keep, solve) = if rx < ry { (x, y) } else { (y, x) };
            let rhs = Term::var(keep);
            return self.solve_pattern(locals, solve, &[], &rhs);
        }
        // One bare variable against an applied one: the bare side can
        // absorb the whole application as its solution. The other flex
        // variables stay free inside it, which is still most general.
        if sp_x.is_empty() {
            return self.solve_pattern(locals, x, &[], &Term::App(Head::Free(y.clone()), sp_y));
        }
        if sp_y.is_empty() {
            return self.solve_pattern(locals, y, &[], &Term::App(Head::Free(x.clone()), sp_x));
        }
        let ((keep, sp_keep), (solve, sp_solve)) = {
            let (rx, ry) = (self.rank(x).unwrap(), self.rank(y).unwrap());
            if rx < ry {
                ((x, sp_x), (y, sp_y))
            } else {
                ((y, sp_y), (x, sp_x))
            }
        };
        let (Some(vars_keep), Some(vars_solve)) = (
            spine_as_distinct_vars(&sp_keep),
            spine_as_distinct_vars(&sp_solve),
        ) else {
            return Step::Refuse(format!(
                "flex-flex equation between {x} and {y} outside the pattern fragment"
            ));
        };
        if vars_keep == vars_solve {
            let rhs = Term::App(Head::Free(keep.clone()), sp_keep);
            self.solve_pattern(locals, solve, &sp_solve, &rhs)
        } else {
            Step::Refuse(format!(
                "flex-flex equation between {x} and {y} with different spines"
            ))
        }
    }
}

fn head_flex(h: &Head, st: &Solver) -> Option<Name> {
    match h {
        Head::Free(x) if st.is_flex(x) => Some(x.clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use totem_lf::fixtures::{capp, cnst, subred_signature, var};
    use totem_lf::name;

    fn flex(entries: &[(&str, Term)]) -> Context {
        let mut ctx = Context::new();
        for (x, a) in entries {
            ctx.push(name(x), a.clone());
        }
        ctx
    }

    #[test]
    fn first_order_decomposition() {
        let sig = subred_signature();
        let mut supply = Supply::new();
        let p = UnifProblem {
            ctx: Context::new(),
            flex: flex(&[
                ("E", cnst("tm")),
                ("V", cnst("tm")),
                ("M", Term::arrow(cnst("tm"), cnst("tm"))),
            ]),
            eqs: vec![(
                capp("eval", vec![var("E"), var("V")]),
                capp("eval", vec![capp("abs", vec![var("M")]), capp("abs", vec![var("M")])]),
            )],
        };
        let UnifOutcome::Mgu(sigma, out) = unify(&sig, &p, &mut supply) else {
            panic!("expected an mgu");
        };
        assert_eq!(sigma.get(&name("E")), Some(&capp("abs", vec![var("M")])));
        assert_eq!(sigma.get(&name("V")), Some(&capp("abs", vec![var("M")])));
        assert_eq!(out.names().cloned().collect::<Vec<_>>(), vec![name("M")]);
    }

    #[test]
    fn rigid_clash_and_occurs_check() {
        let sig = subred_signature();
        let mut supply = Supply::new();
        let p = UnifProblem {
            ctx: Context::new(),
            flex: Context::new(),
            eqs: vec![(cnst("tm"), cnst("ty"))],
        };
        assert_eq!(unify(&sig, &p, &mut supply), UnifOutcome::NoSolution);
        let p = UnifProblem {
            ctx: Context::new(),
            flex: flex(&[("X", cnst("tm"))]),
            eqs: vec![(var("X"), capp("app", vec![var("X"), var("X")]))],
        };
        assert_eq!(unify(&sig, &p, &mut supply), UnifOutcome::NoSolution);
    }

    #[test]
    fn flex_flex_orients_fresher_to_older() {
        let sig = subred_signature();
        let mut supply = Supply::new();
        let p = UnifProblem {
            ctx: Context::new(),
            flex: flex(&[("X", cnst("tm")), ("Y", cnst("tm"))]),
            eqs: vec![(var("X"), var("Y"))],
        };
        let UnifOutcome::Mgu(sigma, out) = unify(&sig, &p, &mut supply) else {
            panic!("expected an mgu");
        };
        assert_eq!(sigma.get(&name("Y")), Some(&var("X")));
        assert_eq!(out.names().cloned().collect::<Vec<_>>(), vec![name("X")]);
    }
}
