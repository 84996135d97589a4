//! Birds fly unless they are penguins.

use std::collections::BTreeSet;

use fold_core::engine::ExampleSet;
use fold_core::golden::BIRDS;
use fold_core::learner::fold;
use fold_core::logic::{parse_atom, parse_program, print_program};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = parse_program(BIRDS)?;
    let pos: BTreeSet<_> = ["fly(tweety)", "fly(et)"].iter().map(|s| parse_atom(s)).collect::<Result<_, _>>()?;
    let examples = ExampleSet::with_cwa(pos, &b)?;
    println!(
        "negatives by closed world: {:?}",
        examples.negatives.iter().map(ToString::to_string).collect::<Vec<_>>()
    );
    let h = fold(&b, &examples)?;
    println!("{}", print_program(&h.program()));
    Ok(())
}
