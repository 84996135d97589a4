//! Command-line surface: learn, eval, crossval and golden.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::dataset::{load_csv, normalize, propositionalize, split_folds, DataError, Dataset, LoadOptions, Schema};
use crate::engine::{covers, parse_examples, EngineError, ExampleSet};
use crate::golden::{registry, run_golden, Verdict};
use crate::learner::{information_gain, learn, LearnError, LearnerConfig};
use crate::logic::{parse_program, print_program, stratify, Program};

#[derive(Debug, Parser)]
#[command(name = "fold", version, about = "Learn default rules with exceptions from examples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a model and write it as a logic program.
    Learn(LearnArgs),
    /// Report the accuracy of a model on labelled data.
    Eval(EvalArgs),
    /// k-fold cross-validation over a CSV dataset.
    Crossval(CrossvalArgs),
    /// Re-run the embedded worked examples.
    Golden,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// CSV with a typed header.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Column declarations, one per line, overriding the header types.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Background program.
    #[arg(long)]
    pub bg: Option<PathBuf>,
    /// Example file with `+ atom.` and `- atom.` lines.
    #[arg(long)]
    pub examples: Option<PathBuf>,
    /// Goal predicate; defaults to the CSV label column.
    #[arg(long)]
    pub goal: Option<String>,
    #[arg(long)]
    pub positive_label: Option<String>,
    #[arg(long)]
    pub drop_missing_rows: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LearnFlags {
    #[arg(long)]
    pub allow_recursion: bool,
    /// Print `A > v` inside exceptions as `A >= next observed value`.
    #[arg(long)]
    pub compat_ge_print: bool,
    /// Recorded in the model header.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct LearnArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub flags: LearnFlags,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Model file written by `learn`.
    pub model: PathBuf,
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CrossvalArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub flags: LearnFlags,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Append the machine-readable report line to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Learn(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Learn(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Learn(m) => write!(f, "learner error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        CliError::Learn(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Learn(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Background program plus labelled examples, from either a CSV or
/// knowledge files.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub background: Program,
    pub examples: ExampleSet,
}

pub fn load_dataset(source: &SourceArgs) -> Result<Dataset, CliError> {
    let path = source.data.as_ref().ok_or_else(|| CliError::Usage("--data is required".into()))?;
    let schema = match &source.schema {
        Some(p) => Some(Schema::from_declarations(&read(p)?)?),
        None => None,
    };
    let options = LoadOptions {
        schema,
        positive_label: source.positive_label.clone(),
        drop_missing_rows: source.drop_missing_rows,
    };
    load_csv(path, &options).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn dataset_goal(d: &Dataset, source: &SourceArgs) -> String {
    source
        .goal
        .as_deref()
        .map(normalize)
        .unwrap_or_else(|| d.schema.target().name.clone())
}

fn dataset_problem(d: &Dataset, goal: &str) -> Result<Problem, CliError> {
    let p = propositionalize(d, goal)?;
    let examples = p.examples()?;
    Ok(Problem {
        name: d.name.clone(),
        background: p.background,
        examples,
    })
}

/// Negatives default to the closed world when the example file lists none.
pub fn load_problem(source: &SourceArgs) -> Result<Problem, CliError> {
    match (&source.data, &source.bg, &source.examples) {
        (Some(_), None, None) => {
            let d = load_dataset(source)?;
            let goal = dataset_goal(&d, source);
            dataset_problem(&d, &goal)
        }
        (None, Some(bg), Some(ex)) => {
            let background = parse_program(&read(bg)?).map_err(|e| CliError::Data(format!("{}: {e}", bg.display())))?;
            let (pos, neg) = parse_examples(&read(ex)?).map_err(|e| CliError::Data(format!("{}: {e}", ex.display())))?;
            let examples = if neg.is_empty() {
                ExampleSet::with_cwa(pos, &background).map_err(|e| CliError::Data(e.to_string()))?
            } else {
                ExampleSet::new(pos, neg).map_err(|e| CliError::Data(e.to_string()))?
            };
            if let Some(goal) = &source.goal {
                if normalize(goal) != examples.goal.name {
                    return Err(CliError::Usage(format!(
                        "--goal {goal} does not match the examples' goal {}",
                        examples.goal.name
                    )));
                }
            }
            let name = bg.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(Problem {
                name,
                background,
                examples,
            })
        }
        _ => Err(CliError::Usage("give either --data, or --bg together with --examples".into())),
    }
}

fn learner_config(flags: &LearnFlags) -> LearnerConfig {
    LearnerConfig {
        allow_recursion: flags.allow_recursion,
        compat_ge_print: flags.compat_ge_print,
        ..LearnerConfig::fold_r()
    }
}

/// Correctly classified examples: covered positives plus uncovered negatives.
pub fn accuracy(model: &Program, background: &Program, examples: &ExampleSet) -> Result<(usize, usize), EngineError> {
    let all: BTreeSet<_> = examples.positives.union(&examples.negatives).cloned().collect();
    let covered = covers(model, &all, background)?;
    let tp = examples.positives.iter().filter(|a| covered.contains(*a)).count();
    let tn = examples.negatives.iter().filter(|a| !covered.contains(*a)).count();
    Ok((tp + tn, all.len()))
}

#[derive(Debug, Clone)]
pub struct LearnSummary {
    pub model: Program,
    pub text: String,
    pub clauses: usize,
    pub ab_predicates: usize,
}

pub fn cmd_learn(args: &LearnArgs) -> Result<LearnSummary, CliError> {
    let problem = load_problem(&args.source)?;
    let h = learn(&problem.background, &problem.examples, &learner_config(&args.flags))?;
    let model = h.program();
    let mut flags = Vec::new();
    if args.flags.allow_recursion {
        flags.push("--allow-recursion");
    }
    if args.flags.compat_ge_print {
        flags.push("--compat-ge-print");
    }
    let text = format!(
        "% fold {}\n% dataset: {}\n% goal: {}\n% seed: {}\n% flags: {}\n{}\n",
        env!("CARGO_PKG_VERSION"),
        problem.name,
        problem.examples.goal.name,
        args.flags.seed,
        if flags.is_empty() { "none".to_string() } else { flags.join(" ") },
        print_program(&model)
    );
    if let Some(path) = &args.output {
        std::fs::write(path, &text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(LearnSummary {
        clauses: h.clause_count(),
        ab_predicates: h.ab_predicates(),
        model,
        text,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub correct: usize,
    pub total: usize,
    /// Body predicates neither defined by the model nor present in the data.
    pub unknown: Vec<String>,
}

impl EvalReport {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

pub fn cmd_eval(args: &EvalArgs) -> Result<EvalReport, CliError> {
    let model = parse_program(&read(&args.model)?).map_err(|e| CliError::Data(format!("{}: {e}", args.model.display())))?;
    stratify(&model).map_err(|e| CliError::Learn(e.to_string()))?;
    let problem = load_problem(&args.source)?;
    let known: BTreeSet<String> = problem
        .background
        .predicates()
        .into_iter()
        .chain(model.clauses.iter().map(|c| c.head.pred()))
        .map(|p| p.name)
        .collect();
    let unknown: BTreeSet<String> = model
        .clauses
        .iter()
        .flat_map(|c| c.body.iter().filter_map(|l| l.atom()))
        .map(|a| a.predicate.clone())
        .filter(|p| !known.contains(p))
        .collect();
    let (correct, total) = accuracy(&model, &problem.background, &problem.examples)?;
    Ok(EvalReport {
        correct,
        total,
        unknown: unknown.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub dataset: String,
    pub folds: usize,
    pub seed: u64,
    pub fold_accuracy: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over folds.
    pub std: f64,
    pub seconds: f64,
    /// Per-fold clause and invented-predicate counts.
    pub clauses: Vec<usize>,
    pub ab_predicates: Vec<usize>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, std)
}

fn mean_count(xs: &[usize]) -> f64 {
    xs.iter().sum::<usize>() as f64 / xs.len().max(1) as f64
}

impl RunReport {
    pub fn csv_header() -> &'static str {
        "dataset,folds,seed,mean_acc,std_acc,seconds,clauses,ab_preds"
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.4},{:.4},{:.3},{:.1},{:.1}",
            self.dataset,
            self.folds,
            self.seed,
            self.mean,
            self.std,
            self.seconds,
            mean_count(&self.clauses),
            mean_count(&self.ab_predicates)
        )
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dataset {} ({} folds, seed {})", self.dataset, self.folds, self.seed)?;
        for (i, acc) in self.fold_accuracy.iter().enumerate() {
            writeln!(
                f,
                "  fold {:>2}: accuracy {:6.2}%  clauses {:>3}  ab {:>3}",
                i + 1,
                100.0 * acc,
                self.clauses[i],
                self.ab_predicates[i]
            )?;
        }
        writeln!(f, "mean accuracy {:.2}% (std {:.2})", 100.0 * self.mean, 100.0 * self.std)?;
        write!(f, "wall clock {:.2}s", self.seconds)
    }
}

pub fn crossval(d: &Dataset, goal: &str, folds: usize, seed: u64, config: &LearnerConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let splits = split_folds(d, folds, seed)?;
    let results: Vec<Result<(f64, usize, usize), CliError>> = splits
        .par_iter()
        .map(|(train, test)| {
            let train = dataset_problem(train, goal)?;
            let h = learn(&train.background, &train.examples, config)?;
            let test = dataset_problem(test, goal)?;
            let (correct, total) = accuracy(&h.program(), &test.background, &test.examples)?;
            Ok((correct as f64 / total as f64, h.clause_count(), h.ab_predicates()))
        })
        .collect();
    let mut fold_accuracy = Vec::with_capacity(folds);
    let mut clauses = Vec::with_capacity(folds);
    let mut ab_predicates = Vec::with_capacity(folds);
    for r in results {
        let (acc, c, ab) = r?;
        fold_accuracy.push(acc);
        clauses.push(c);
        ab_predicates.push(ab);
    }
    let (mean, std) = mean_std(&fold_accuracy);
    Ok(RunReport {
        dataset: d.name.clone(),
        folds,
        seed,
        fold_accuracy,
        mean,
        std,
        seconds: start.elapsed().as_secs_f64(),
        clauses,
        ab_predicates,
    })
}

pub fn cmd_crossval(args: &CrossvalArgs) -> Result<RunReport, CliError> {
    if args.source.data.is_none() {
        return Err(CliError::Usage("crossval needs --data".into()));
    }
    let d = load_dataset(&args.source)?;
    let goal = dataset_goal(&d, &args.source);
    let report = crossval(&d, &goal, args.folds, args.flags.seed, &learner_config(&args.flags))?;
    if let Some(path) = &args.output {
        use std::io::Write;
        let fresh = !path.exists();
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let header = if fresh {
            format!("{}\n", RunReport::csv_header())
        } else {
            String::new()
        };
        writeln!(f, "{header}{}", report.csv_line()).map_err(|e| CliError::Data(e.to_string()))?;
    }
    Ok(report)
}

pub fn cmd_golden() -> Vec<Verdict> {
    run_golden(&registry(), information_gain)
}

/// Runs a parsed command line, printing results; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Learn(args) => cmd_learn(&args).map(|s| {
            if args.output.is_none() {
                print!("{}", s.text);
            }
            eprintln!("learned {} clauses ({} abnormality predicates)", s.clauses, s.ab_predicates);
        }),
        Command::Eval(args) => cmd_eval(&args).map(|r| {
            for p in &r.unknown {
                eprintln!("warning: `{p}` is not defined by the model or the data; it is false everywhere");
            }
            println!("accuracy {:.4} ({}/{})", r.accuracy(), r.correct, r.total);
        }),
        Command::Crossval(args) => cmd_crossval(&args).map(|r| {
            println!("{r}");
            println!("{}", RunReport::csv_header());
            println!("{}", r.csv_line());
        }),
        Command::Golden => {
            let verdicts = cmd_golden();
            for v in &verdicts {
                println!("{} {}", if v.passed { "PASS" } else { "FAIL" }, v.name);
                if !v.passed {
                    for line in v.learned.lines() {
                        println!("    learned: {line}");
                    }
                    for line in v.detail.lines() {
                        println!("    {line}");
                    }
                }
            }
            let passed = verdicts.iter().filter(|v| v.passed).count();
            println!("{passed}/{} passed", verdicts.len());
            return if passed == verdicts.len() { 0 } else { 3 };
        }
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(rows: &str) -> Dataset {
        crate::dataset::read_csv(
            format!("a:cat,v:num,y:label=yes\n{rows}").as_bytes(),
            "toy",
            &LoadOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn two_row_crossval_has_two_folds() {
        let d = toy("p,1,yes\nq,2,no\n");
        let r = crossval(&d, "y", 2, 7, &LearnerConfig::fold_r()).unwrap();
        assert_eq!(r.fold_accuracy.len(), 2);
        assert_eq!(r.clauses.len(), 2);
    }

    #[test]
    fn report_statistics() {
        let (m, s) = mean_std(&[1.0, 0.5, 0.75]);
        assert!((m - 0.75).abs() < 1e-12);
        assert!((s - 0.25).abs() < 1e-12);
        assert_eq!(mean_std(&[0.9]).1, 0.0);
    }

    #[test]
    fn crossval_is_deterministic() {
        let d = toy("p,1,yes\nq,2,no\np,3,yes\nq,4,no\nr,5,yes\nr,6,no\np,7,no\nq,8,yes\n");
        let a = crossval(&d, "y", 4, 11, &LearnerConfig::fold_r()).unwrap();
        let b = crossval(&d, "y", 4, 11, &LearnerConfig::fold_r()).unwrap();
        assert_eq!((a.fold_accuracy, a.clauses), (b.fold_accuracy, b.clauses));
    }

    #[test]
    fn empty_model_on_negative_data() {
        let p = dataset_problem(&toy("p,1,no\nq,2,no\n"), "y").unwrap();
        assert_eq!(accuracy(&Program::default(), &p.background, &p.examples).unwrap(), (2, 2));
    }

    #[test]
    fn usage_errors() {
        let e = load_problem(&SourceArgs::default()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = load_problem(&SourceArgs {
            data: Some("/nonexistent/x.csv".into()),
            ..Default::default()
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
