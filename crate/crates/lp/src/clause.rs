//! Decomposing object constants into clauses: a Π-prefix of parameters, a
//! head (the family application concluded), and the subset of parameters
//! that act as subgoals.

use totem_lf::{Context, Decl, Name, Signature, Term};

/// One object constant read as a clause.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub constant: Name,
    /// The constant's Π-prefix, opened with (freshened) argument hints.
    /// Implicit and explicit parameters are not distinguished here; search
    /// instantiates all of them.
    pub params: Context,
    /// The family application this clause concludes.
    pub head: Term,
    /// Indices into `params` of the subgoals, in the order search attempts
    /// them. For relation constants these are the premises as written; for
    /// data constructors, the constructor arguments.
    pub premises: Vec<usize>,
}

impl Clause {
    /// Classifiers of the subgoal parameters, in attempt order.
    pub fn premise_classifiers(&self) -> impl Iterator<Item = &Term> {
        self.premises.iter().map(|&p| &self.params.get(p).unwrap().1)
    }
}

/// All clauses concluding the family `a`, in signature order. Constructors
/// count: a zero-premise constant is a clause that closes a goal outright.
pub fn clauses_for(sig: &Signature, a: &Name) -> Vec<Clause> {
    sig.decls()
        .filter(|d| !d.is_family && d.target_family() == Some(a))
        .map(decompose)
        .collect()
}

fn decompose(d: &Decl) -> Clause {
    let (params, head) = d.open_named();
    Clause {
        constant: d.name.clone(),
        params,
        head,
        premises: d.premise_order.clone(),
    }
}
