//! Splitting a context variable by the constants of its family.
//!
//! Splitting is shared infrastructure: the coverage checker uses it to
//! refine goals, and the proof checker re-runs it to validate case
//! analyses, so both sides agree on the children by construction.

use thiserror::Error;
use totem_lf::{
    check_context, check_object, Context, Head, Name, Signature, Substitution, Supply, Term,
};

use crate::shared::stable_topological;
use crate::unify::{unify, UnifOutcome, UnifProblem};

/// One child of a split: the constant, the unifier that refines the goal,
/// and the child's context pieces.
#[derive(Clone, Debug)]
pub struct SplitChild {
    /// The signature constant this child commits to.
    pub constant: Name,
    /// The fresh copy of the constant's parameter context used in the
    /// unification problem.
    pub gamma_c: Context,
    /// Most general unifier of `A_x = A_c` and `x = c Γ_c`, over the
    /// dependencies of `A_x`, `x` itself, and `Γ_c`.
    pub sigma: Substitution,
    /// The surviving unification variables, reordered so classifiers only
    /// look backwards.
    pub arm_ctx: Context,
    /// The rest of the original context, with `sigma` applied to its
    /// classifiers.
    pub residual: Context,
    /// What `x` became: the constant applied to its (instantiated)
    /// parameters.
    pub pattern: Term,
    /// `arm_ctx` followed by `residual`: the context of the child goal.
    pub full_ctx: Context,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("cannot split {0}: not declared in the goal context")]
    UnknownVariable(Name),
    #[error("cannot split {variable}: classifier {classifier} is not an atomic family application")]
    FunctionTypeSplit { variable: Name, classifier: String },
    #[error("splitting {variable} against {constant} is undecided: {reason}")]
    Undecided {
        variable: Name,
        constant: Name,
        reason: String,
    },
    #[error("splitting invariant violated: {0}")]
    Internal(String),
}

/// Permute a context around `x`: the dependency closure of `x`'s
/// classifier (in declaration order), the classifier itself, and the rest.
pub fn split_context(ctx: &Context, x: &Name) -> Result<(Context, Term, Context), SplitError> {
    let ax = ctx
        .lookup(x)
        .ok_or_else(|| SplitError::UnknownVariable(x.clone()))?
        .clone();
    let mut needed: Vec<Name> = ax
        .free_vars()
        .into_iter()
        .filter(|y| ctx.contains(y))
        .collect();
    loop {
        let mut changed = false;
        let snapshot = needed.clone();
        for y in snapshot {
            let b = ctx.lookup(&y).expect("closure variables come from ctx");
            for z in b.free_vars() {
                if ctx.contains(&z) && !needed.contains(&z) {
                    needed.push(z);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut gamma1 = Context::new();
    let mut gamma2 = Context::new();
    for (y, b) in ctx.iter() {
        if y == x {
            continue;
        }
        if needed.contains(y) {
            gamma1.push(y.clone(), b.clone());
        } else {
            gamma2.push(y.clone(), b.clone());
        }
    }
    Ok((gamma1, ax, gamma2))
}

/// Split `x` by every constant of its family. Children appear in signature
/// order; constants whose conclusion does not unify contribute nothing.
pub fn split_var(
    sig: &Signature,
    ctx: &Context,
    x: &Name,
    supply: &mut Supply,
) -> Result<Vec<SplitChild>, SplitError> {
    let (gamma1, ax, gamma2) = split_context(ctx, x)?;
    let family = match &ax {
        Term::App(Head::Const(f), _) if sig.get(f).is_some_and(|d| d.is_family) => f.clone(),
        _ => {
            return Err(SplitError::FunctionTypeSplit {
                variable: x.clone(),
                classifier: ax.to_string(),
            })
        }
    };
    let mut children = Vec::new();
    for d in sig.decls() {
        if d.is_family || d.target_family() != Some(&family) {
            continue;
        }
        let (gamma_c, target) = d.open_prefix(supply);
        let applied = Term::App(
            Head::Const(d.name.clone()),
            gamma_c
                .iter()
                .map(|(y, b)| Term::var(y).eta_expand_at(b))
                .collect(),
        );
        let mut flex = gamma1.clone();
        flex.push(x.clone(), ax.clone());
        for (y, b) in gamma_c.iter() {
            flex.push(y.clone(), b.clone());
        }
        let problem = UnifProblem {
            ctx: gamma2.clone(),
            flex,
            eqs: vec![(ax.clone(), target), (Term::var(x), applied)],
        };
        match unify(sig, &problem, supply) {
            UnifOutcome::NoSolution => continue,
            UnifOutcome::OutsideFragment(reason) => {
                return Err(SplitError::Undecided {
                    variable: x.clone(),
                    constant: d.name.clone(),
                    reason,
                })
            }
            UnifOutcome::Mgu(sigma, _) => {
                let pattern = sigma
                    .get(x)
                    .cloned()
                    .ok_or_else(|| {
                        SplitError::Internal(format!("split on {x} left {x} uninstantiated"))
                    })?;
                let mut survivors: Vec<(Name, Term)> = Vec::new();
                for (y, b) in gamma1.iter().chain(gamma_c.iter()) {
                    if sigma.get(y).is_none() {
                        survivors.push((y.clone(), sigma.apply(b)));
                    }
                }
                let arm_entries = stable_topological(survivors).ok_or_else(|| {
                    SplitError::Internal(format!(
                        "cyclic dependencies among split survivors for {x} at {}",
                        d.name
                    ))
                })?;
                let arm_ctx: Context = arm_entries.into_iter().collect();
                let residual = gamma2.apply_subst(&sigma);
                let mut full_ctx = arm_ctx.clone();
                for (y, b) in residual.iter() {
                    full_ctx.push(y.clone(), b.clone());
                }
                check_context(sig, &full_ctx).map_err(|e| {
                    SplitError::Internal(format!(
                        "child context for {x} at {} fails to check: {e}",
                        d.name
                    ))
                })?;
                let ax_inst = sigma.apply(&ax);
                let canon = check_object(&full_ctx, sig, &pattern, &ax_inst).map_err(|e| {
                    SplitError::Internal(format!(
                        "child pattern for {x} at {} fails to check: {e}",
                        d.name
                    ))
                })?;
                if canon != pattern {
                    return Err(SplitError::Internal(format!(
                        "child pattern for {x} at {} is not canonical",
                        d.name
                    )));
                }
                children.push(SplitChild {
                    constant: d.name.clone(),
                    gamma_c,
                    sigma,
                    arm_ctx,
                    residual,
                    pattern,
                    full_ctx,
                });
            }
        }
    }
    Ok(children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use totem_lf::fixtures::{capp, cnst, nat_signature, subred_signature, var};
    use totem_lf::name;

    #[test]
    fn nat_split_produces_zero_and_successor() {
        let sig = nat_signature();
        let mut supply = Supply::new();
        let mut ctx = Context::new();
        ctx.push(name("M"), cnst("nat"));
        let children = split_var(&sig, &ctx, &name("M"), &mut supply).unwrap();
        assert_eq!(children.len(), 2);
        assert_eq!(children[0].constant, name("z"));
        assert_eq!(children[0].pattern, cnst("z"));
        assert!(children[0].arm_ctx.is_empty());
        assert_eq!(children[1].constant, name("s"));
        assert_eq!(children[1].arm_ctx.len(), 1);
        let n = children[1].arm_ctx.names().next().unwrap().clone();
        assert_eq!(children[1].pattern, capp("s", vec![var(n.as_ref())]));
    }

    #[test]
    fn splitting_a_function_classifier_is_rejected() {
        let sig = subred_signature();
        let mut supply = Supply::new();
        let mut ctx = Context::new();
        ctx.push(name("F"), Term::arrow(cnst("tm"), cnst("tm")));
        let got = split_var(&sig, &ctx, &name("F"), &mut supply);
        assert!(matches!(got, Err(SplitError::FunctionTypeSplit { .. })));
        let got = split_var(&sig, &ctx, &name("nope"), &mut supply);
        assert!(matches!(got, Err(SplitError::UnknownVariable(_))));
    }
}
