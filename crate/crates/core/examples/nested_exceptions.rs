//! Exceptions to exceptions: penguins don't fly, superpenguins do, damaged planes don't.

use std::collections::BTreeSet;

use fold_core::engine::{covers, ExampleSet};
use fold_core::golden::NESTED;
use fold_core::learner::fold;
use fold_core::logic::{parse_atom, parse_program, print_program};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = parse_program(NESTED)?;
    let pos: BTreeSet<_> = ["fly(a)", "fly(b)", "fly(e)", "fly(f)", "fly(g)", "fly(h)"]
        .iter()
        .map(|s| parse_atom(s))
        .collect::<Result<_, _>>()?;
    let ex = ExampleSet::with_cwa(pos, &b)?;
    let h = fold(&b, &ex)?.program();
    println!("{}", print_program(&h));
    let wrong = covers(&h, &ex.negatives, &b)?;
    println!("\ncovered negatives: {}", wrong.len());
    Ok(())
}
