//! Scratch dump of fixture clause decompositions (throwaway).

use totem_lf::fixtures::{lam_signature, nat_signature, subred_signature};
use totem_lf::name;
use totem_lp::clauses_for;

fn main() {
    for (label, sig, fam) in [
        ("nat/plus", nat_signature(), "plus"),
        ("lam/eval", lam_signature(), "eval"),
        ("subred/subred", subred_signature(), "subred"),
        ("subred/of", subred_signature(), "of"),
        ("subred/eval", subred_signature(), "eval"),
    ] {
        println!("== {label} ==");
        let fam_decl = sig.get(&name(fam)).unwrap();
        let (fctx, ftarget) = fam_decl.open_named();
        println!(
            "family {} implicit={} hints={:?}",
            fam, fam_decl.implicit, fam_decl.arg_hints
        );
        for (x, a) in fctx.iter() {
            println!("  fam-param {x} : {a:?}");
        }
        println!("  fam-target {ftarget:?}");
        for c in clauses_for(&sig, &name(fam)) {
            println!("clause {} premises={:?}", c.constant, c.premises);
            for (i, (x, a)) in c.params.iter().enumerate() {
                println!("  [{i}] {x} : {a:?}");
            }
            println!("  head {:?}", c.head);
        }
        println!();
    }
}
