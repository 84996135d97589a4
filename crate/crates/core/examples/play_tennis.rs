//! FOLD-R on a small table with numeric columns.

use fold_core::dataset::{propositionalize, read_csv, LoadOptions};
use fold_core::golden::PLAY_TENNIS_CSV;
use fold_core::learner::{learn, LearnerConfig};
use fold_core::logic::print_program;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = read_csv(PLAY_TENNIS_CSV.as_bytes(), "play_tennis", &LoadOptions::default())?;
    let p = propositionalize(&d, "play")?;
    let config = LearnerConfig {
        compat_ge_print: true,
        ..LearnerConfig::fold_r()
    };
    let h = learn(&p.background, &p.examples()?, &config)?;
    println!("{}", print_program(&h.program()));
    Ok(())
}
