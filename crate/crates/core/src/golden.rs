//! Worked examples with known outputs, used as a regression harness.

use std::collections::{BTreeMap, BTreeSet};
use std::error::Error;

use crate::dataset::{propositionalize, read_csv, LoadOptions};
use crate::engine::ExampleSet;
use crate::learner::{learn, LearnerConfig, Scorer};
use crate::logic::{parse_atom, parse_program, print_program, Atom, Clause, Literal, Program};

pub const PLAY_TENNIS_CSV: &str = include_str!("../data/play_tennis.csv");

pub const BIRDS: &str = "bird(X) :- penguin(X).
bird(tweety). bird(et).
cat(kitty). penguin(polly).";

pub const NESTED: &str = "bird(X) :- penguin(X).
penguin(X) :- superpenguin(X).
bird(a). bird(b). penguin(c). penguin(d).
superpenguin(e). superpenguin(f). cat(c1).
plane(g). plane(h). plane(k). plane(m).
damaged(k). damaged(m).";

pub const REDUNDANT: &str = "bird(X) :- penguin(X).
bird(tweety). bird(et).
bear(teddy). crippled(et).
cat(kitty). penguin(polly).";

#[derive(Debug, Clone)]
pub enum Source {
    /// Background program and positive examples; negatives by closed world.
    Knowledge {
        background: &'static str,
        positives: &'static [&'static str],
    },
    Csv {
        text: &'static str,
        goal: &'static str,
    },
}

#[derive(Debug, Clone)]
pub enum Expect {
    /// Equal up to renaming of invented predicates and body order.
    Program(&'static str),
    /// No literal of the learned program uses these predicates.
    Avoids(&'static [&'static str]),
}

#[derive(Debug, Clone)]
pub struct GoldenCase {
    pub name: &'static str,
    pub source: Source,
    pub config: LearnerConfig,
    pub expect: Expect,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: &'static str,
    pub passed: bool,
    pub learned: String,
    pub detail: String,
}

pub fn registry() -> Vec<GoldenCase> {
    let compat = LearnerConfig {
        compat_ge_print: true,
        ..LearnerConfig::fold_r()
    };
    vec![
        GoldenCase {
            name: "birds",
            source: Source::Knowledge {
                background: BIRDS,
                positives: &["fly(tweety)", "fly(et)"],
            },
            config: LearnerConfig::fold(),
            expect: Expect::Program("fly(X) :- bird(X), not ab0(X). ab0(X) :- penguin(X)."),
        },
        GoldenCase {
            name: "noisy birds",
            source: Source::Knowledge {
                background: BIRDS,
                positives: &["fly(tweety)", "fly(jet)", "fly(et)"],
            },
            config: LearnerConfig::fold(),
            expect: Expect::Program("fly(X) :- bird(X), not ab0(X). fly(X) :- member(X,[jet]). ab0(X) :- penguin(X)."),
        },
        GoldenCase {
            name: "nested exceptions",
            source: Source::Knowledge {
                background: NESTED,
                positives: &["fly(a)", "fly(b)", "fly(e)", "fly(f)", "fly(g)", "fly(h)"],
            },
            config: LearnerConfig::fold(),
            expect: Expect::Program(
                "fly(X) :- plane(X), not ab0(X). fly(X) :- bird(X), not ab1(X). fly(X) :- superpenguin(X).
                 ab0(X) :- damaged(X). ab1(X) :- penguin(X).",
            ),
        },
        GoldenCase {
            name: "play tennis",
            source: Source::Csv {
                text: PLAY_TENNIS_CSV,
                goal: "play",
            },
            config: compat,
            expect: Expect::Program(
                "play(X) :- overcast(X). play(X) :- temperature(X,A), A =< 75, not ab0(X).
                 ab0(X) :- windy(X), rainy(X). ab0(X) :- humidity(X,A), A >= 95, sunny(X).",
            ),
        },
        GoldenCase {
            name: "no redundant negations",
            source: Source::Knowledge {
                background: REDUNDANT,
                positives: &["fly(tweety)"],
            },
            config: LearnerConfig::fold(),
            expect: Expect::Avoids(&["bear", "cat"]),
        },
    ]
}

/// Background and examples of a case.
pub fn inputs(source: &Source) -> Result<(Program, ExampleSet), Box<dyn Error>> {
    match source {
        Source::Knowledge { background, positives } => {
            let b = parse_program(background)?;
            let pos = positives.iter().map(|s| parse_atom(s)).collect::<Result<BTreeSet<Atom>, _>>()?;
            let ex = ExampleSet::with_cwa(pos, &b)?;
            Ok((b, ex))
        }
        Source::Csv { text, goal } => {
            let d = read_csv(text.as_bytes(), goal, &LoadOptions::default())?;
            let p = propositionalize(&d, goal)?;
            let ex = p.examples()?;
            Ok((p.background, ex))
        }
    }
}

pub fn run_case(case: &GoldenCase, scorer: Scorer) -> Verdict {
    let config = LearnerConfig {
        scorer,
        ..case.config.clone()
    };
    let learned = inputs(&case.source).and_then(|(b, ex)| Ok(learn(&b, &ex, &config)?.program()));
    let learned = match learned {
        Ok(p) => p,
        Err(e) => {
            return Verdict {
                name: case.name,
                passed: false,
                learned: String::new(),
                detail: e.to_string(),
            }
        }
    };
    let (passed, detail) = match &case.expect {
        Expect::Program(text) => {
            let expected = parse_program(text).expect("golden program parses");
            let ok = equivalent_modulo_invented(&learned, &expected);
            (
                ok,
                if ok {
                    String::new()
                } else {
                    format!("expected:\n{}", print_program(&expected))
                },
            )
        }
        Expect::Avoids(names) => {
            let used: Vec<&str> = learned
                .clauses
                .iter()
                .flat_map(|c| c.body.iter().filter_map(Literal::atom))
                .map(|a| a.predicate.as_str())
                .filter(|p| names.contains(p))
                .collect();
            (
                used.is_empty(),
                if used.is_empty() { String::new() } else { format!("uses {used:?}") },
            )
        }
    };
    Verdict {
        name: case.name,
        passed,
        learned: print_program(&learned),
        detail,
    }
}

pub fn run_golden(cases: &[GoldenCase], scorer: Scorer) -> Vec<Verdict> {
    cases.iter().map(|c| run_case(c, scorer)).collect()
}

fn invented(p: &Program) -> Vec<String> {
    let names: BTreeSet<String> = p
        .clauses
        .iter()
        .map(|c| c.head.predicate.clone())
        .filter(|n| {
            n.strip_prefix("ab")
                .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        })
        .collect();
    names.into_iter().collect()
}

fn canonical(p: &Program, rename: &BTreeMap<&str, &str>) -> Vec<String> {
    let mut out: Vec<String> = p
        .clauses
        .iter()
        .map(|c| {
            let c = rename_clause(c, rename);
            let mut body: Vec<String> = c.body.iter().map(ToString::to_string).collect();
            body.sort();
            format!("{} :- {}", c.head, body.join(", "))
        })
        .collect();
    out.sort();
    out
}

fn rename_clause(c: &Clause, rename: &BTreeMap<&str, &str>) -> Clause {
    let r = |a: &Atom| {
        let mut a = a.clone();
        if let Some(n) = rename.get(a.predicate.as_str()) {
            a.predicate = n.to_string();
        }
        a
    };
    Clause::new(
        r(&c.head),
        c.body
            .iter()
            .map(|l| match l {
                Literal::Pos(a) => Literal::Pos(r(a)),
                Literal::Neg(a) => Literal::Neg(r(a)),
                other => other.clone(),
            })
            .collect(),
    )
}

/// Equality up to a bijective renaming of `abN` predicates and the order of
/// clauses and body literals.
pub fn equivalent_modulo_invented(a: &Program, b: &Program) -> bool {
    let (na, nb) = (invented(a), invented(b));
    if na.len() != nb.len() || a.clauses.len() != b.clauses.len() {
        return false;
    }
    let target = canonical(b, &BTreeMap::new());
    let mut perm: Vec<usize> = (0..nb.len()).collect();
    loop {
        let rename: BTreeMap<&str, &str> = na.iter().zip(&perm).map(|(x, &i)| (x.as_str(), nb[i].as_str())).collect();
        if canonical(a, &rename) == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
