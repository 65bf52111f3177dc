//! Deterministic generation of well-typed objects at simple classifiers.
//!
//! "Simple" means the atomic families involved have kind `type` (no
//! indices), so candidate heads can be chosen by comparing target families
//! without unification. This is all the property tests and examples need;
//! it is not part of the kernel proper.

use crate::ctx::Context;
use crate::sig::Signature;
use crate::subst::Substitution;
use crate::syntax::{Head, Name, Supply, Term};
use crate::typing::target_of;

/// Small xorshift* generator so the kernel crate stays dependency-free.
/// Sequences are stable across platforms.
#[derive(Clone, Debug)]
pub struct XorShift {
    state: u64,
}

impl XorShift {
    pub fn new(seed: u64) -> XorShift {
        XorShift {
            state: seed.wrapping_mul(2685821657736338717).max(1),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(2685821657736338717)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n.max(1) as u64) as usize
    }
}

fn head_candidates(sig: &Signature, ctx: &Context, family: &Name) -> Vec<(Head, Term)> {
    let mut out = Vec::new();
    for d in sig.decls() {
        if !d.is_family && d.target_family() == Some(family) {
            out.push((Head::Const(d.name.clone()), d.classifier.clone()));
        }
    }
    for (x, a) in ctx.iter() {
        if matches!(target_of(a), Term::App(Head::Const(c), _) if c == family) {
            out.push((Head::Free(x.clone()), a.clone()));
        }
    }
    out
}

fn gen_at(
    sig: &Signature,
    ctx: &Context,
    classifier: &Term,
    depth: usize,
    fuel: &mut u32,
    supply: &mut Supply,
    rng: &mut XorShift,
) -> Option<Term> {
    if *fuel == 0 {
        return None;
    }
    *fuel -= 1;
    match classifier {
        Term::Pi(a, b) => {
            let x = supply.fresh("v");
            let mut inner = ctx.clone();
            inner.push(x.clone(), (**a).clone());
            let body = gen_at(sig, &inner, &b.open(&Term::var(&x)), depth, fuel, supply, rng)?;
            Some(Term::lam((**a).clone(), body.close(&x)))
        }
        Term::App(Head::Const(f), sp) if sp.is_empty() => {
            let mut cands = head_candidates(sig, ctx, f);
            if cands.is_empty() {
                return None;
            }
            // Depth is a hard bound: at zero only nullary heads are allowed,
            // otherwise backtracking on fuel can build terms of unbounded
            // size (and applying substitutions to those blows up).
            if depth == 0 {
                cands.retain(|(_, c)| !matches!(c, Term::Pi(..)));
                if cands.is_empty() {
                    return None;
                }
            }
            // Try candidates in a random rotation until one pans out.
            let start = rng.below(cands.len());
            for k in 0..cands.len() {
                let (h, mut c) = cands[(start + k) % cands.len()].clone();
                let mut args = Vec::new();
                let mut ok = true;
                while let Term::Pi(dom, cod) = c {
                    match gen_at(
                        sig,
                        ctx,
                        &dom,
                        depth.saturating_sub(1),
                        fuel,
                        supply,
                        rng,
                    ) {
                        Some(arg) => {
                            c = cod.open(&arg);
                            args.push(arg);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return Some(Term::App(h, args));
                }
            }
            None
        }
        _ => None,
    }
}

/// Generate a well-typed canonical object at `classifier` (which must be
/// built from 0-ary atomic families and products of them). Deterministic in
/// the rng state.
pub fn gen_object(
    sig: &Signature,
    ctx: &Context,
    classifier: &Term,
    depth: usize,
    rng: &mut XorShift,
) -> Option<Term> {
    let mut supply = Supply::new();
    let mut fuel = 400 + 200 * depth as u32;
    gen_at(sig, ctx, classifier, depth, &mut fuel, &mut supply, rng)
}

/// A context of `n` variables with classifiers drawn from `pool`.
pub fn gen_context(prefix: &str, pool: &[Term], n: usize, rng: &mut XorShift) -> Context {
    let mut ctx = Context::new();
    for i in 0..n {
        let a = pool[rng.below(pool.len())].clone();
        ctx.push(crate::syntax::name(&format!("{prefix}{i}")), a);
    }
    ctx
}

/// A substitution typed `gamma |- s : target`, for targets with closed
/// (non-dependent) classifiers. A variable is occasionally left to the
/// identity padding, but only when `gamma` declares it at the same
/// classifier, so the result always passes `check_subst_typing`.
pub fn gen_subst(
    sig: &Signature,
    gamma: &Context,
    target: &Context,
    depth: usize,
    rng: &mut XorShift,
) -> Option<Substitution> {
    let mut s = Substitution::identity();
    for (x, a) in target.iter() {
        if gamma.lookup(x) == Some(a) && rng.below(4) == 0 {
            continue; // leave x to the identity padding
        }
        let img = gen_object(sig, gamma, a, depth, rng)?;
        s.bind(x.clone(), img);
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::typing::check_object;

    #[test]
    fn generated_terms_check() {
        let sig = fixtures::lam_signature();
        let ctx = Context::new();
        let tm = Term::cnst(&crate::syntax::name("tm"));
        let mut rng = XorShift::new(7);
        let mut produced = 0;
        for _ in 0..50 {
            if let Some(t) = gen_object(&sig, &ctx, &tm, 3, &mut rng) {
                produced += 1;
                let canon = check_object(&ctx, &sig, &t, &tm).unwrap();
                assert_eq!(canon, t, "generator output is canonical");
            }
        }
        assert!(produced >= 40, "generator mostly succeeds at tm");
    }
}
