//! Scoring a single refinement step directly, categorical against numeric.

use std::collections::BTreeSet;

use fold_core::engine::ExampleSet;
use fold_core::learner::{LearnerConfig, Space};
use fold_core::logic::{parse_atom, parse_program, Atom, Clause};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = parse_program("age(a,23). age(b,31). age(c,45). age(d,52). age(e,61). smoker(c). smoker(e). smoker(b).")?;
    let atoms = |xs: &[&str]| xs.iter().map(|s| parse_atom(s)).collect::<Result<BTreeSet<Atom>, _>>();
    let pos = atoms(&["risk(c)", "risk(d)", "risk(e)"])?;
    let neg = atoms(&["risk(a)", "risk(b)"])?;
    let space = Space::new(&b, &ExampleSet::new(pos.clone(), neg.clone())?)?;
    let c = Clause::new(parse_atom("risk(X)")?, vec![]);
    let config = LearnerConfig::fold_r();
    let (cat, g1) = space.test_categorical(&c, &pos, &neg, config.scorer)?;
    let (num, g2) = space.test_numeric(&c, &pos, &neg, config.scorer)?;
    println!("categorical: {cat}  gain {g1:.4}");
    println!("numeric:     {num}  gain {g2:.4}");
    let (best, _) = space.add_best_literal(&c, &pos, &neg, &config)?;
    println!("chosen:      {best}");
    Ok(())
}
