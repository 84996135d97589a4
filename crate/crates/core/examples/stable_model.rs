//! Bottom-up evaluation of a stratified program with negation and comparisons.

use fold_core::engine::stable_model;
use fold_core::logic::{parse_program, stratify};

const PROGRAM: &str = "
edge(a,b). edge(b,c). edge(c,d). node(a). node(b). node(c). node(d). node(e).
reach(X,Y) :- edge(X,Y).
reach(X,Z) :- reach(X,Y), edge(Y,Z).
isolated(X) :- node(X), not linked(X).
linked(X) :- edge(X,Y).
linked(Y) :- edge(X,Y).
weight(a, 3). weight(b, 12).
heavy(X) :- weight(X, W), W > 10.
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = parse_program(PROGRAM)?;
    for (pred, level) in stratify(&p)?.strata.unwrap_or_default() {
        println!("stratum {level}: {pred}");
    }
    for atom in stable_model(&p)?
        .atoms()
        .filter(|a| ["reach", "isolated", "heavy"].contains(&a.predicate.as_str()))
    {
        println!("{atom}");
    }
    Ok(())
}
