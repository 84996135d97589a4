//! Parsing and printing round-trip, plus a rejected unstratified program.

use fold_core::logic::{parse_program, print_program, stratify};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "fly(X) :- bird(X), not ab0(X). ab0(X) :- penguin(X). p(X) :- member(X,[a,b]). t(X) :- temp(X,A), A =< 75.";
    let p = parse_program(text)?;
    let printed = print_program(&p);
    println!("{printed}");
    assert_eq!(parse_program(&printed)?, p);

    let bad = parse_program("p(X) :- d(X), not q(X). q(X) :- d(X), not p(X). d(a).")?;
    match stratify(&bad) {
        Ok(_) => println!("unexpectedly stratified"),
        Err(e) => println!("\nrejected: {e}"),
    }
    Ok(())
}
