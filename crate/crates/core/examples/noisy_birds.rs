//! A positive example with no explaining pattern ends up in a membership clause.

use std::collections::BTreeSet;

use fold_core::engine::ExampleSet;
use fold_core::golden::BIRDS;
use fold_core::learner::fold;
use fold_core::logic::{parse_atom, parse_program, print_program};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = parse_program(BIRDS)?;
    let pos: BTreeSet<_> = ["fly(tweety)", "fly(jet)", "fly(et)"]
        .iter()
        .map(|s| parse_atom(s))
        .collect::<Result<_, _>>()?;
    let h = fold(&b, &ExampleSet::with_cwa(pos, &b)?)?;
    println!("{}", print_program(&h.program()));
    Ok(())
}
