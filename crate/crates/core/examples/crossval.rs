//! 10-fold cross-validation on Iris (virginica against the rest).

use fold_core::cli::crossval;
use fold_core::dataset::{load_csv, LoadOptions};
use fold_core::learner::LearnerConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/uci/iris.csv");
    let d = load_csv(path, &LoadOptions::default())?;
    let report = crossval(&d, "virginica", 10, 1, &LearnerConfig::fold_r())?;
    println!("{report}");
    Ok(())
}
