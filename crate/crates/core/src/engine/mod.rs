//! Stable-model computation for stratified normal programs.
//!
//! A stratified program has exactly one stable model, its perfect model, so
//! evaluation proceeds bottom-up one stratum at a time.

mod eval;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::{parse_atom, Atom, NotStratifiedError, ParseError, Predicate, Program, Term};

pub const DEFAULT_MAX_ATOMS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    SemiNaive,
    Naive,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub max_atoms: usize,
    pub strategy: Strategy,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_atoms: DEFAULT_MAX_ATOMS,
            strategy: Strategy::SemiNaive,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    NotStratified(NotStratifiedError),
    Unsafe { clause: String, vars: Vec<String> },
    GroundingBlowup { limit: usize },
    UnsupportedArity(Predicate),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::NotStratified(e) => e.fmt(f),
            EngineError::Unsafe { clause, vars } => {
                write!(
                    f,
                    "unsafe clause `{clause}`: variables {} are not bound by a positive body literal",
                    vars.join(", ")
                )
            }
            EngineError::GroundingBlowup { limit } => write!(f, "grounding exceeded {limit} atoms"),
            EngineError::UnsupportedArity(p) => write!(f, "goal predicate {p} must be unary"),
        }
    }
}

impl std::error::Error for EngineError {}

/// The unique stable model of a stratified program.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StableModel {
    facts: BTreeMap<Predicate, BTreeSet<Vec<Term>>>,
    domain: BTreeSet<String>,
}

impl StableModel {
    pub fn contains(&self, atom: &Atom) -> bool {
        self.facts.get(&atom.pred()).is_some_and(|s| s.contains(&atom.args))
    }

    pub fn tuples(&self, predicate: &Predicate) -> impl Iterator<Item = &Vec<Term>> {
        self.facts.get(predicate).into_iter().flatten()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.facts.keys()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.facts.iter().flat_map(|(p, set)| {
            set.iter().map(move |args| Atom {
                predicate: p.name.clone(),
                args: args.clone(),
            })
        })
    }

    pub fn len(&self) -> usize {
        self.facts.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Constants of the program, the range of variables in bodyless rules.
    pub fn domain(&self) -> &BTreeSet<String> {
        &self.domain
    }
}

pub fn stable_model(program: &Program) -> Result<StableModel, EngineError> {
    stable_model_with(program, &EngineConfig::default())
}

pub fn stable_model_with(program: &Program, config: &EngineConfig) -> Result<StableModel, EngineError> {
    let evaluation = eval::evaluate(program, config)?;
    let domain = program.constants();
    Ok(StableModel {
        facts: evaluation.into_facts(),
        domain,
    })
}

/// The examples of `e` that hold in the stable model of `b ∪ h`.
pub fn covers(h: &Program, e: &BTreeSet<Atom>, b: &Program) -> Result<BTreeSet<Atom>, EngineError> {
    let model = stable_model(&b.union(h))?;
    Ok(e.iter().filter(|a| model.contains(a)).cloned().collect())
}

/// Closed-world negatives for a unary goal: every subject mentioned in `b`
/// that is not a positive example.
pub fn cwa_negatives(goal: &Predicate, b: &Program, positives: &BTreeSet<Atom>) -> Result<BTreeSet<Atom>, EngineError> {
    if goal.arity != 1 {
        return Err(EngineError::UnsupportedArity(goal.clone()));
    }
    let mut subjects = BTreeSet::new();
    for clause in b.clauses.iter().filter(|c| c.is_fact()) {
        let args = &clause.head.args;
        let subject = match args.as_slice() {
            [Term::Const(s)] => s,
            [Term::Const(s), Term::Num(_)] => s,
            _ => continue,
        };
        subjects.insert(subject.clone());
    }
    Ok(subjects
        .into_iter()
        .map(|s| Atom::unary(goal.name.clone(), s))
        .filter(|a| !positives.contains(a))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExampleError {
    NotGround(Atom),
    Overlap(Atom),
    MixedGoals(Predicate, Predicate),
    Empty,
    Parse { line: usize, message: String },
}

impl fmt::Display for ExampleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleError::NotGround(a) => write!(f, "example {a} is not ground"),
            ExampleError::Overlap(a) => write!(f, "{a} is both a positive and a negative example"),
            ExampleError::MixedGoals(p, q) => write!(f, "examples mix goal predicates {p} and {q}"),
            ExampleError::Empty => f.write_str("no examples"),
            ExampleError::Parse { line, message } => write!(f, "examples line {line}: {message}"),
        }
    }
}

impl std::error::Error for ExampleError {}

/// Positive and negative ground examples of a single goal predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSet {
    pub goal: Predicate,
    pub positives: BTreeSet<Atom>,
    pub negatives: BTreeSet<Atom>,
}

impl ExampleSet {
    /// The goal is read off the examples; at least one is needed.
    pub fn new(positives: BTreeSet<Atom>, negatives: BTreeSet<Atom>) -> Result<Self, ExampleError> {
        let goal = positives.iter().chain(&negatives).next().ok_or(ExampleError::Empty)?.pred();
        for a in positives.iter().chain(&negatives) {
            if !a.is_ground() {
                return Err(ExampleError::NotGround(a.clone()));
            }
            if a.pred() != goal {
                return Err(ExampleError::MixedGoals(goal, a.pred()));
            }
        }
        if let Some(a) = positives.intersection(&negatives).next() {
            return Err(ExampleError::Overlap(a.clone()));
        }
        Ok(ExampleSet {
            goal,
            positives,
            negatives,
        })
    }

    /// Uses the closed-world assumption over `b` for the negatives.
    pub fn with_cwa(positives: BTreeSet<Atom>, b: &Program) -> Result<Self, Box<dyn std::error::Error>> {
        let goal = positives.iter().next().ok_or(ExampleError::Empty)?.pred();
        let negatives = cwa_negatives(&goal, b, &positives)?;
        Ok(Self::new(positives, negatives)?)
    }
}

/// Reads lines of the form `+ atom.` and `- atom.`; `%` starts a comment.
pub fn parse_examples(text: &str) -> Result<(BTreeSet<Atom>, BTreeSet<Atom>), ExampleError> {
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (target, rest) = if let Some(rest) = line.strip_prefix('+') {
            (&mut pos, rest)
        } else if let Some(rest) = line.strip_prefix('-') {
            (&mut neg, rest)
        } else {
            return Err(ExampleError::Parse {
                line: i + 1,
                message: "expected `+` or `-`".into(),
            });
        };
        let atom = parse_atom(rest.trim()).map_err(|e: ParseError| ExampleError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        target.insert(atom);
    }
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_program;

    fn model(src: &str) -> StableModel {
        stable_model(&parse_program(src).unwrap()).unwrap()
    }

    fn atom(s: &str) -> Atom {
        parse_atom(s).unwrap()
    }

    #[test]
    fn birds() {
        let m = model(
            "bird(tweety). bird(et). cat(kitty). penguin(polly). bird(X) :- penguin(X).
             fly(X) :- bird(X), not ab(X). ab(X) :- penguin(X).",
        );
        assert!(m.contains(&atom("fly(tweety)")));
        assert!(m.contains(&atom("fly(et)")));
        assert!(!m.contains(&atom("fly(polly)")));
        assert!(!m.contains(&atom("fly(kitty)")));
        assert!(m.contains(&atom("bird(polly)")));
    }

    #[test]
    fn transitive_closure() {
        let m = model("e(a,b). e(b,c). e(c,d). t(X,Y) :- e(X,Y). t(X,Z) :- e(X,Y), t(Y,Z).");
        assert_eq!(m.tuples(&Predicate::new("t", 2)).count(), 6);
        assert!(m.contains(&atom("t(a,d)")));
    }

    #[test]
    fn naive_agrees() {
        let p = parse_program(
            "e(a,b). e(b,c). e(c,a). e(c,d). t(X,Y) :- e(X,Y). t(X,Z) :- t(X,Y), t(Y,Z).
             n(X) :- e(X,Y), not t(X,X).",
        )
        .unwrap();
        let semi = stable_model(&p).unwrap();
        let naive = stable_model_with(
            &p,
            &EngineConfig {
                strategy: Strategy::Naive,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(semi, naive);
        assert!(!semi.contains(&atom("n(a)")));
    }

    #[test]
    fn constraints_and_member() {
        let m = model(
            "temp(d1,75.0). temp(d2,80.5). temp(d3,60). hot(X) :- temp(X,A), A > 75.
             pick(X) :- member(X,[d1,d3]). cool(X) :- temp(X,A), A =< 75.",
        );
        assert!(m.contains(&atom("hot(d2)")));
        assert!(!m.contains(&atom("hot(d1)")));
        assert!(m.contains(&atom("cool(d1)")));
        assert!(m.contains(&atom("cool(d3)")));
        assert!(m.contains(&atom("pick(d3)")));
        assert_eq!(m.tuples(&Predicate::new("pick", 1)).count(), 2);
    }

    #[test]
    fn bodyless_rule_ranges_over_domain() {
        let m = model("q(a). r(b). p(X) :- true.");
        assert_eq!(m.tuples(&Predicate::new("p", 1)).count(), 2);
    }

    #[test]
    fn propositional() {
        let m = model("a. b :- a, not c. d :- not b.");
        assert!(m.contains(&atom("b")));
        assert!(!m.contains(&atom("d")));
    }

    #[test]
    fn errors() {
        let odd = parse_program("p :- not p.").unwrap();
        assert!(matches!(stable_model(&odd), Err(EngineError::NotStratified(_))));
        let unsafe_ = parse_program("p(X) :- not q(X). q(a).").unwrap();
        assert!(matches!(stable_model(&unsafe_), Err(EngineError::Unsafe { .. })));
        let big = parse_program("d(a). d(b). d(c). p(X,Y,Z) :- d(X), d(Y), d(Z).").unwrap();
        let r = stable_model_with(
            &big,
            &EngineConfig {
                max_atoms: 10,
                ..Default::default()
            },
        );
        assert_eq!(r, Err(EngineError::GroundingBlowup { limit: 10 }));
    }

    #[test]
    fn covers_and_cwa() {
        let b = parse_program("bird(a). bird(b). penguin(b). cat(c). weight(d, 3).").unwrap();
        let h = parse_program("fly(X) :- bird(X), not penguin(X).").unwrap();
        let e: BTreeSet<Atom> = ["fly(a)", "fly(b)", "fly(c)"].into_iter().map(atom).collect();
        let covered = covers(&h, &e, &b).unwrap();
        assert_eq!(covered, BTreeSet::from([atom("fly(a)")]));

        let pos = BTreeSet::from([atom("fly(a)")]);
        let neg = cwa_negatives(&Predicate::new("fly", 1), &b, &pos).unwrap();
        let expected: BTreeSet<Atom> = ["fly(b)", "fly(c)", "fly(d)"].into_iter().map(atom).collect();
        assert_eq!(neg, expected);
        assert!(cwa_negatives(&Predicate::new("f", 2), &b, &pos).is_err());
    }

    #[test]
    fn example_sets() {
        let (pos, neg) = parse_examples("% birds\n+ fly(a).\n- fly(b).\n\n").unwrap();
        let set = ExampleSet::new(pos.clone(), neg).unwrap();
        assert_eq!(set.goal, Predicate::new("fly", 1));
        assert!(ExampleSet::new(pos.clone(), pos.clone()).is_err());
        let mixed = BTreeSet::from([atom("walk(b)")]);
        assert!(matches!(ExampleSet::new(pos, mixed), Err(ExampleError::MixedGoals(..))));
        assert!(parse_examples("fly(a).").is_err());
    }
}
