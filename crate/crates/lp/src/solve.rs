//! Depth-first backchaining. Clauses are tried in signature order and
//! premises in their recorded order; every choice point is kept so the
//! stream of solutions can be resumed after each answer.
//!
//! Search state is persistent: the pending-goal stack and the trail of
//! unifiers are immutable lists shared between choice points, so keeping a
//! thousand alternatives costs a thousand list nodes, not a thousand
//! copies of the substitution. Terms are resolved against the trail only
//! when a goal is taken up or an answer is emitted.

use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use totem_lf::{Context, Head, Name, Signature, Substitution, Supply, Term};
use totem_unify::{unify, UnifOutcome, UnifProblem};

/// Default backchaining budget.
pub const DEFAULT_DEPTH: usize = 10_000;

/// A goal `a M₁ … M_n` over a context of logic variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Goal {
    pub target: Term,
    pub ctx: Context,
    /// Backchaining budget: the number of clause applications the whole
    /// solution stream may perform.
    pub depth: usize,
}

impl Goal {
    pub fn new(ctx: Context, target: Term) -> Goal {
        Goal {
            target,
            ctx,
            depth: DEFAULT_DEPTH,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Goal {
        self.depth = depth;
        self
    }
}

/// One answer: an inhabiting derivation for the goal, the bindings of the
/// goal's own variables, and the variables the answer leaves undetermined
/// (in creation order, with instantiated classifiers).
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub proof: Term,
    pub answer: Substitution,
    pub residual: Context,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SolveError {
    /// The budget ran out with choice points still open. Distinct from the
    /// stream simply ending, which means the finite search space is spent.
    #[error("backchaining budget exhausted after {0} steps")]
    BudgetExhausted(usize),
    /// A subgoal of Π type was reached; search handles atomic goals only.
    #[error("subgoal `{0}` is not an atomic family application")]
    NonAtomicSubgoal(Term),
    /// The goal's head is not a declared type family.
    #[error("`{0}` is not a declared type family")]
    NotAFamily(Name),
    /// Unification between a clause head and a goal left the decidable
    /// fragment. Reported rather than skipped: pruning here would silently
    /// lose answers.
    #[error("unification left the decidable fragment: {0}")]
    OutsideFragment(String),
}

/// Solve `goal` against `sig`, lazily. The iterator yields each answer as
/// it is found; an `Err` item is final.
pub fn solve<'s>(sig: &'s Signature, goal: &Goal) -> Solve<'s> {
    let mut supply = Supply::new();
    let root = supply.fresh("D");
    let mut vars = VarTable::default();
    for (x, a) in goal.ctx.iter() {
        vars.declare(x.clone(), a.clone());
    }
    vars.declare(root.clone(), goal.target.clone());
    Solve {
        sig,
        supply,
        root: root.clone(),
        query: goal.ctx.names().cloned().collect(),
        budget: goal.depth,
        steps: 0,
        clauses: HashMap::new(),
        vars,
        stack: vec![Branch {
            goals: push_goal(None, root, goal.target.clone()),
            trail: None,
            next_clause: 0,
        }],
        done: false,
    }
}

type Goals = Option<Rc<GoalNode>>;

struct GoalNode {
    /// The variable standing for the missing derivation.
    pv: Name,
    /// Its classifier, uninstantiated; resolved against the trail on use.
    target: Term,
    rest: Goals,
}

fn push_goal(rest: Goals, pv: Name, target: Term) -> Goals {
    Some(Rc::new(GoalNode { pv, target, rest }))
}

type Trail = Option<Rc<Frame>>;

struct Frame {
    sigma: Substitution,
    prev: Trail,
}

/// A suspended alternative: about to try clause number `next_clause` on
/// the first pending goal.
#[derive(Clone)]
struct Branch {
    goals: Goals,
    trail: Trail,
    next_clause: usize,
}

/// Every logic variable ever created, with its creation rank and its raw
/// (creation-time) classifier.
#[derive(Default)]
struct VarTable {
    info: HashMap<Name, (usize, Term)>,
}

impl VarTable {
    fn declare(&mut self, x: Name, classifier: Term) {
        let rank = self.info.len();
        self.info.insert(x, (rank, classifier));
    }

    fn rank(&self, x: &Name) -> Option<usize> {
        self.info.get(x).map(|(r, _)| *r)
    }

    fn classifier(&self, x: &Name) -> Option<&Term> {
        self.info.get(x).map(|(_, a)| a)
    }
}

pub struct Solve<'s> {
    sig: &'s Signature,
    supply: Supply,
    root: Name,
    query: Vec<Name>,
    budget: usize,
    steps: usize,
    clauses: HashMap<Name, Rc<Vec<Name>>>,
    vars: VarTable,
    stack: Vec<Branch>,
    done: bool,
}

impl<'s> Solve<'s> {
    /// Steps consumed so far, for reporting.
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn clause_heads(&mut self, a: &Name) -> Rc<Vec<Name>> {
        if let Some(cs) = self.clauses.get(a) {
            return cs.clone();
        }
        let cs: Rc<Vec<Name>> = Rc::new(
            self.sig
                .decls()
                .filter(|d| !d.is_family && d.target_family() == Some(a))
                .map(|d| d.name.clone())
                .collect(),
        );
        self.clauses.insert(a.clone(), cs.clone());
        cs
    }

    /// Apply the trail's unifiers oldest-first; by the composition law this
    /// equals applying their eager composition.
    fn resolve(trail: &Trail, t: &Term) -> Term {
        let mut frames = Vec::new();
        let mut cur = trail;
        while let Some(f) = cur {
            frames.push(&f.sigma);
            cur = &f.prev;
        }
        let mut out = t.clone();
        for s in frames.into_iter().rev() {
            out = s.apply(&out);
        }
        out
    }

    /// The unification context for one backchaining step: every free
    /// variable of the equations, in creation order, with its classifier
    /// resolved against the trail. Search has no rigid ambient variables,
    /// so free means flexible.
    fn flex_of(&self, trail: &Trail, eqs: &[(Term, Term)]) -> Context {
        let mut names: Vec<Name> = Vec::new();
        for (l, r) in eqs {
            for t in [l, r] {
                for x in t.free_vars() {
                    if !names.contains(&x) {
                        names.push(x);
                    }
                }
            }
        }
        names.sort_by_key(|x| self.vars.rank(x).expect("free variables are registered"));
        Context::from_pairs(names.into_iter().map(|x| {
            let a = self.vars.classifier(&x).unwrap().clone();
            let a = Self::resolve(trail, &a);
            (x, a)
        }))
    }

    fn finish(&mut self, e: SolveError) -> Option<Result<Solution, SolveError>> {
        self.done = true;
        self.stack.clear();
        Some(Err(e))
    }

    fn emit(&self, br: &Branch) -> Solution {
        let proof = Self::resolve(&br.trail, &Term::var(&self.root));
        let mut answer = Substitution::identity();
        let mut pending: Vec<Name> = proof.free_vars();
        for q in &self.query {
            let v = Self::resolve(&br.trail, &Term::var(q));
            if v == Term::var(q) {
                pending.push(q.clone());
                continue;
            }
            pending.extend(v.free_vars());
            answer.bind(q.clone(), v);
        }
        // Undetermined variables reachable from the answer, closed under
        // their classifiers' dependencies.
        let mut residual: Vec<(Name, Term)> = Vec::new();
        while let Some(x) = pending.pop() {
            if residual.iter().any(|(y, _)| *y == x) {
                continue;
            }
            let Some(a) = self.vars.classifier(&x) else {
                continue;
            };
            let a = Self::resolve(&br.trail, a);
            pending.extend(a.free_vars());
            residual.push((x, a));
        }
        residual.sort_by_key(|(x, _)| self.vars.rank(x).unwrap());
        Solution {
            proof,
            answer,
            residual: Context::from_pairs(residual),
        }
    }
}

impl<'s> Iterator for Solve<'s> {
    type Item = Result<Solution, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        while let Some(br) = self.stack.pop() {
            let Some(goal) = br.goals.clone() else {
                return Some(Ok(self.emit(&br)));
            };
            let target = Self::resolve(&br.trail, &goal.target);
            let fam = match &target {
                Term::App(Head::Const(a), _) => match self.sig.get(a) {
                    Some(d) if d.is_family => a.clone(),
                    _ => return self.finish(SolveError::NotAFamily(a.clone())),
                },
                _ => return self.finish(SolveError::NonAtomicSubgoal(target.clone())),
            };
            let heads = self.clause_heads(&fam);
            let pv_val = Self::resolve(&br.trail, &Term::var(&goal.pv));
            let mut k = br.next_clause;
            while k < heads.len() {
                if self.steps >= self.budget {
                    return self.finish(SolveError::BudgetExhausted(self.steps));
                }
                let d = self.sig.get(&heads[k]).expect("clause constants are declared");
                let (params, head) = d.open_prefix(&mut self.supply);
                for (m, a) in params.iter() {
                    self.vars.declare(m.clone(), a.clone());
                }
                // The second equation both records the derivation and, if
                // an index unification already forced this derivation, pins
                // the clause against it. Function-typed parameters enter
                // the spine eta-long to keep every equated term canonical.
                let spine: Vec<Term> = params
                    .iter()
                    .map(|(m, a)| Term::var(m).eta_expand_at(a))
                    .collect();
                let derivation = Term::cnst(&heads[k]).apply(spine);
                let eqs = vec![(head, target.clone()), (pv_val.clone(), derivation)];
                let problem = UnifProblem {
                    ctx: Context::new(),
                    flex: self.flex_of(&br.trail, &eqs),
                    eqs,
                };
                match unify(self.sig, &problem, &mut self.supply) {
                    UnifOutcome::NoSolution => {
                        k += 1;
                        continue;
                    }
                    UnifOutcome::OutsideFragment(m) => {
                        return self.finish(SolveError::OutsideFragment(m));
                    }
                    UnifOutcome::Mgu(sigma, _) => {
                        self.steps += 1;
                        if k + 1 < heads.len() {
                            self.stack.push(Branch {
                                goals: br.goals.clone(),
                                trail: br.trail.clone(),
                                next_clause: k + 1,
                            });
                        }
                        let mut goals = goal.rest.clone();
                        for &p in d.premise_order.iter().rev() {
                            let (m, a) = params.get(p).expect("premise indices are in range");
                            goals = push_goal(goals, m.clone(), a.clone());
                        }
                        self.stack.push(Branch {
                            goals,
                            trail: Some(Rc::new(Frame {
                                sigma,
                                prev: br.trail.clone(),
                            })),
                            next_clause: 0,
                        });
                        break;
                    }
                }
            }
            // If no clause applied the branch dies here and the loop pops
            // the most recent alternative.
        }
        self.done = true;
        None
    }
}
