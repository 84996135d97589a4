pub mod cli;
pub mod dataset;
pub mod engine;
pub mod golden;
pub mod learner;
pub mod logic;
