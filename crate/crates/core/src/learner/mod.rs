//! FOLD and FOLD-R: sequential covering with default rules, invented
//! abnormality predicates and enumeration of unexplained positives.

mod numeric;
mod space;

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::engine::{EngineError, ExampleSet};
use crate::logic::{stratify, Atom, Clause, CmpOp, Literal, NotStratifiedError, Predicate, Program, Term};
use numeric::best_split;
pub use space::Space;
use space::{value_vars, Draft, Lit};

/// Example counts before (`p0`, `n0`) and after (`p1`, `n1`) adding a literal;
/// `t` positives covered by both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GainCounts {
    pub p0: usize,
    pub n0: usize,
    pub p1: usize,
    pub n1: usize,
    pub t: usize,
}

pub type Scorer = fn(GainCounts) -> f64;

/// FOIL information gain; zero when nothing positive stays covered.
pub fn information_gain(c: GainCounts) -> f64 {
    if c.t == 0 || c.p1 == 0 {
        return 0.0;
    }
    let after = (c.p1 as f64 / (c.p1 + c.n1) as f64).log2();
    let before = (c.p0 as f64 / (c.p0 + c.n0) as f64).log2();
    c.t as f64 * (after - before)
}

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    /// Search numeric constraints as well (FOLD-R).
    pub numeric: bool,
    pub allow_recursion: bool,
    /// Inside exceptions, print a winning `A > v` as `A >= v'` with `v'` the
    /// next observed value.
    pub compat_ge_print: bool,
    pub scorer: Scorer,
}

impl LearnerConfig {
    pub fn fold() -> Self {
        LearnerConfig {
            numeric: false,
            ..Self::fold_r()
        }
    }

    pub fn fold_r() -> Self {
        LearnerConfig {
            numeric: true,
            allow_recursion: false,
            compat_ge_print: false,
            scorer: information_gain,
        }
    }
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self::fold_r()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LearnError {
    Engine(EngineError),
    UnsupportedGoal(Predicate),
    BadExample(Atom),
    NonTermination(String),
    NotStratified(NotStratifiedError),
}

impl fmt::Display for LearnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnError::Engine(e) => e.fmt(f),
            LearnError::UnsupportedGoal(p) => write!(f, "goal {p} must be unary"),
            LearnError::BadExample(a) => write!(f, "example {a} does not name a known subject"),
            LearnError::NonTermination(msg) => write!(f, "termination check failed: {msg}"),
            LearnError::NotStratified(e) => write!(f, "learned program: {e}"),
        }
    }
}

impl std::error::Error for LearnError {}

impl From<EngineError> for LearnError {
    fn from(e: EngineError) -> Self {
        LearnError::Engine(e)
    }
}

/// Learned default clauses and the definitions of the abnormality predicates
/// they use.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub defaults: Vec<Clause>,
    pub abnormals: Vec<Clause>,
}

impl Hypothesis {
    pub fn program(&self) -> Program {
        Program::new(self.defaults.iter().chain(&self.abnormals).cloned().collect())
    }

    pub fn clause_count(&self) -> usize {
        self.defaults.len() + self.abnormals.len()
    }

    pub fn ab_predicates(&self) -> usize {
        self.abnormals.iter().map(|c| &c.head.predicate).collect::<BTreeSet<_>>().len()
    }
}

/// FOLD over the categorical bias only.
pub fn fold(b: &Program, examples: &ExampleSet) -> Result<Hypothesis, LearnError> {
    learn(b, examples, &LearnerConfig::fold())
}

/// FOLD-R: categorical literals compete with numeric constraints.
pub fn fold_r(b: &Program, examples: &ExampleSet) -> Result<Hypothesis, LearnError> {
    learn(b, examples, &LearnerConfig::fold_r())
}

pub fn learn(b: &Program, examples: &ExampleSet, config: &LearnerConfig) -> Result<Hypothesis, LearnError> {
    let space = Space::new(b, examples)?;
    learn_in(&space, examples, config)
}

/// Runs the learner against an already compiled background.
pub fn learn_in(space: &Space, examples: &ExampleSet, config: &LearnerConfig) -> Result<Hypothesis, LearnError> {
    let mut learner = Learner::new(space, config);
    let pos = space.bits(&examples.positives)?;
    let neg = space.bits(&examples.negatives)?;
    let defaults = learner.fold(pos, neg, 0)?;
    let hypothesis = learner.hypothesis(&defaults);
    stratify(&hypothesis.program()).map_err(LearnError::NotStratified)?;
    Ok(hypothesis)
}

struct Candidate {
    lit: Lit,
    ext: FixedBitSet,
    gain: f64,
}

struct AbPred {
    name: String,
    bodies: Vec<Vec<Lit>>,
}

fn counts(pos: &FixedBitSet, neg: &FixedBitSet, ext: &FixedBitSet) -> GainCounts {
    let p1 = pos.intersection_count(ext);
    GainCounts {
        p0: pos.count_ones(..),
        n0: neg.count_ones(..),
        p1,
        n1: neg.intersection_count(ext),
        t: p1,
    }
}

impl Space {
    fn best_categorical(
        &self,
        body: &[Lit],
        pos: &FixedBitSet,
        neg: &FixedBitSet,
        scorer: Scorer,
        goal: Option<&FixedBitSet>,
    ) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        let cats = self.categorical.iter().enumerate().map(|(i, (_, ext))| (Lit::Cat(i), ext));
        for (lit, ext) in cats.chain(goal.map(|g| (Lit::Goal, g))) {
            if body.contains(&lit) {
                continue;
            }
            let gain = scorer(counts(pos, neg, ext));
            if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                best = Some(Candidate {
                    lit,
                    ext: ext.clone(),
                    gain,
                });
            }
        }
        best
    }

    fn best_numeric(&self, pos: &FixedBitSet, neg: &FixedBitSet, scorer: Scorer, compat_ge: bool) -> Option<Candidate> {
        let split = best_split(&self.numeric, pos, neg, scorer)?;
        let feature = &self.numeric[split.feature];
        let shown = match (compat_ge, split.op, split.successor) {
            (true, CmpOp::Gt, Some(next)) => (CmpOp::Ge, next),
            _ => (split.op, split.threshold),
        };
        Some(Candidate {
            ext: feature.extension(split.op, split.threshold),
            lit: Lit::Num {
                feature: split.feature,
                op: split.op,
                threshold: split.threshold,
                shown,
            },
            gain: split.gain,
        })
    }

    /// Categorical body literals of `c` as bias indices.
    fn body_lits(&self, c: &Clause) -> Vec<Lit> {
        c.body
            .iter()
            .filter_map(|l| match l {
                Literal::Pos(a) if a.args.len() == 1 => self.categorical.iter().position(|(n, _)| *n == a.predicate).map(Lit::Cat),
                _ => None,
            })
            .collect()
    }

    fn refine(&self, c: &Clause, lit: &Lit) -> Clause {
        let used: BTreeSet<&str> = c
            .body
            .iter()
            .flat_map(|l| match l {
                Literal::Pos(a) | Literal::Neg(a) => a.vars().collect::<Vec<_>>(),
                Literal::Constraint { var, .. } => vec![var.as_str()],
                Literal::Member { .. } => vec![],
            })
            .collect();
        let fresh = value_vars().find(|v| !used.contains(v.as_str())).expect("fresh variable");
        let rendered = self.render(&self.goal.name, std::slice::from_ref(lit), &[]);
        let mut out = c.clone();
        for l in rendered.body {
            out.body.push(match l {
                Literal::Pos(mut a) if a.args.len() == 2 => {
                    a.args[1] = Term::var(fresh.clone());
                    Literal::Pos(a)
                }
                Literal::Constraint { op, threshold, .. } => Literal::Constraint {
                    var: fresh.clone(),
                    op,
                    threshold,
                },
                other => other,
            });
        }
        out
    }

    /// Best categorical refinement of `c`. `pos` and `neg` are the examples
    /// `c` currently covers.
    pub fn test_categorical(
        &self,
        c: &Clause,
        pos: &BTreeSet<Atom>,
        neg: &BTreeSet<Atom>,
        scorer: Scorer,
    ) -> Result<(Clause, f64), LearnError> {
        let (p, n) = (self.bits(pos)?, self.bits(neg)?);
        Ok(match self.best_categorical(&self.body_lits(c), &p, &n, scorer, None) {
            Some(best) => (self.refine(c, &best.lit), best.gain),
            None => (c.clone(), 0.0),
        })
    }

    /// Best `f(X,A), A op v` refinement of `c` over all numeric features.
    pub fn test_numeric(
        &self,
        c: &Clause,
        pos: &BTreeSet<Atom>,
        neg: &BTreeSet<Atom>,
        scorer: Scorer,
    ) -> Result<(Clause, f64), LearnError> {
        let (p, n) = (self.bits(pos)?, self.bits(neg)?);
        Ok(match self.best_numeric(&p, &n, scorer, false) {
            Some(best) => (self.refine(c, &best.lit), best.gain),
            None => (c.clone(), 0.0),
        })
    }

    /// The refinement the learner would pick: categorical only for FOLD,
    /// categorical against numeric (categorical wins ties) for FOLD-R.
    pub fn add_best_literal(
        &self,
        c: &Clause,
        pos: &BTreeSet<Atom>,
        neg: &BTreeSet<Atom>,
        config: &LearnerConfig,
    ) -> Result<(Clause, f64), LearnError> {
        let (cat, g1) = self.test_categorical(c, pos, neg, config.scorer)?;
        if !config.numeric {
            return Ok((cat, g1));
        }
        let (num, g2) = self.test_numeric(c, pos, neg, config.scorer)?;
        Ok(if g1 >= g2 { (cat, g1) } else { (num, g2) })
    }
}

struct Learner<'a> {
    space: &'a Space,
    config: &'a LearnerConfig,
    abs: Vec<AbPred>,
    ab_counter: usize,
    /// Subjects covered by the top-level defaults learned so far.
    goal_ext: FixedBitSet,
    /// |E+| + |E-| at entry of each active FOLD call.
    measures: Vec<usize>,
}

impl<'a> Learner<'a> {
    fn new(space: &'a Space, config: &'a LearnerConfig) -> Self {
        Learner {
            space,
            config,
            abs: Vec::new(),
            ab_counter: 0,
            goal_ext: FixedBitSet::with_capacity(space.len()),
            measures: Vec::new(),
        }
    }

    fn best(&self, c: &Draft, pos: &FixedBitSet, neg: &FixedBitSet, depth: usize) -> Option<Candidate> {
        let goal = (self.config.allow_recursion && depth == 0).then_some(&self.goal_ext);
        let cat = self.space.best_categorical(&c.body, pos, neg, self.config.scorer, goal);
        if !self.config.numeric {
            return cat;
        }
        let num = self
            .space
            .best_numeric(pos, neg, self.config.scorer, self.config.compat_ge_print && depth > 0);
        match (cat, num) {
            (Some(c), Some(n)) => Some(if c.gain >= n.gain { c } else { n }),
            (c, n) => c.or(n),
        }
    }

    fn fold(&mut self, mut pos: FixedBitSet, neg: FixedBitSet, depth: usize) -> Result<Vec<Draft>, LearnError> {
        let measure = pos.count_ones(..) + neg.count_ones(..);
        if let Some(&outer) = self.measures.last() {
            if measure >= outer {
                return Err(LearnError::NonTermination(format!(
                    "nested call at depth {depth} has {measure} examples, caller had {outer}"
                )));
            }
        }
        self.measures.push(measure);
        let mut defaults = Vec::new();
        while !pos.is_clear() {
            let before = pos.count_ones(..);
            let top = Draft {
                body: Vec::new(),
                ext: self.space.full(),
            };
            let c = self.specialize(top, pos.clone(), neg.clone(), depth)?;
            pos.difference_with(&c.ext);
            if pos.count_ones(..) >= before {
                return Err(LearnError::NonTermination(format!(
                    "clause at depth {depth} covers no remaining positive"
                )));
            }
            if depth == 0 {
                self.goal_ext.union_with(&c.ext);
            }
            defaults.push(c);
        }
        self.measures.pop();
        Ok(defaults)
    }

    fn specialize(&mut self, mut c: Draft, mut pos: FixedBitSet, mut neg: FixedBitSet, depth: usize) -> Result<Draft, LearnError> {
        let mut just_started = true;
        while !neg.is_clear() {
            let before = neg.count_ones(..);
            let next = match self.best(&c, &pos, &neg, depth) {
                Some(best) => {
                    let mut body = c.body.clone();
                    body.push(best.lit);
                    let mut ext = c.ext.clone();
                    ext.intersect_with(&best.ext);
                    Draft { body, ext }
                }
                None if just_started => self.enumerate(&pos),
                None => match self.exception(&c, neg.clone(), pos.clone(), depth)? {
                    Some(d) => d,
                    None => self.enumerate(&pos),
                },
            };
            just_started = false;
            pos.intersect_with(&next.ext);
            neg.intersect_with(&next.ext);
            c = next;
            if neg.count_ones(..) >= before {
                return Err(LearnError::NonTermination(format!(
                    "refinement at depth {depth} rules out no negative"
                )));
            }
        }
        Ok(c)
    }

    fn enumerate(&self, pos: &FixedBitSet) -> Draft {
        Draft {
            body: vec![Lit::Member(pos.ones().collect())],
            ext: pos.clone(),
        }
    }

    /// `pos` and `neg` arrive swapped: the caller's negatives are the
    /// examples to explain.
    fn exception(&mut self, c: &Draft, pos: FixedBitSet, neg: FixedBitSet, depth: usize) -> Result<Option<Draft>, LearnError> {
        if self.best(c, &pos, &neg, depth + 1).is_none() {
            return Ok(None);
        }
        let learned = self.fold(pos, neg, depth + 1)?;
        let mut ab_ext = FixedBitSet::with_capacity(self.space.len());
        for d in &learned {
            ab_ext.union_with(&d.ext);
        }
        let k = self.abs.len();
        let name = self.next_ab_name();
        self.abs.push(AbPred {
            name,
            bodies: learned.into_iter().map(|d| d.body).collect(),
        });
        let mut body = c.body.clone();
        body.push(Lit::NotAb(k));
        let mut ext = c.ext.clone();
        ext.difference_with(&ab_ext);
        Ok(Some(Draft { body, ext }))
    }

    fn next_ab_name(&mut self) -> String {
        loop {
            let name = format!("ab{}", self.ab_counter);
            self.ab_counter += 1;
            if !self.space.reserved.contains(&name) {
                return name;
            }
        }
    }

    fn hypothesis(&self, defaults: &[Draft]) -> Hypothesis {
        let names: Vec<String> = self.abs.iter().map(|a| a.name.clone()).collect();
        let goal = &self.space.goal.name;
        Hypothesis {
            defaults: defaults.iter().map(|d| self.space.render(goal, &d.body, &names)).collect(),
            abnormals: self
                .abs
                .iter()
                .flat_map(|a| a.bodies.iter().map(|b| self.space.render(&a.name, b, &names)))
                .collect(),
        }
    }
}
