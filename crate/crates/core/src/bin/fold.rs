use clap::Parser;
use fold_core::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
