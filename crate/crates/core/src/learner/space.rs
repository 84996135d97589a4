//! Extensional view of the background model: every candidate literal is a
//! bitset over subject constants.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use super::numeric::NumericFeature;
use super::LearnError;
use crate::engine::{stable_model, ExampleSet};
use crate::logic::{Atom, Clause, CmpOp, Literal, Predicate, Program, Term};

pub(crate) const SUBJECT_VAR: &str = "X";

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Lit {
    Cat(usize),
    Num {
        feature: usize,
        op: CmpOp,
        threshold: f64,
        /// Operator and threshold as printed.
        shown: (CmpOp, f64),
    },
    NotAb(usize),
    Member(Vec<usize>),
    Goal,
}

/// A clause under construction together with its extension over all subjects.
#[derive(Debug, Clone)]
pub(crate) struct Draft {
    pub body: Vec<Lit>,
    pub ext: FixedBitSet,
}

/// Background knowledge compiled once per learning run.
#[derive(Debug, Clone)]
pub struct Space {
    pub(crate) goal: Predicate,
    pub(crate) subjects: Vec<String>,
    index: HashMap<String, usize>,
    pub(crate) categorical: Vec<(String, FixedBitSet)>,
    pub(crate) numeric: Vec<NumericFeature>,
    pub(crate) reserved: BTreeSet<String>,
}

impl Space {
    /// Computes the stable model of `b` and the extensions of the bias: unary
    /// predicates of `b` (categorical) and binary predicates whose second
    /// argument is always a number (numeric), in first-occurrence order.
    pub fn new(b: &Program, examples: &ExampleSet) -> Result<Space, LearnError> {
        let goal = examples.goal.clone();
        if goal.arity != 1 {
            return Err(LearnError::UnsupportedGoal(goal));
        }
        let model = stable_model(b)?;

        let mut names: BTreeSet<String> = BTreeSet::new();
        for a in examples.positives.iter().chain(&examples.negatives) {
            match &a.args[0] {
                Term::Const(c) => {
                    names.insert(c.clone());
                }
                _ => return Err(LearnError::BadExample(a.clone())),
            }
        }
        let predicates = b.predicates();
        let numeric_preds: Vec<&Predicate> = predicates
            .iter()
            .filter(|p| p.arity == 2 && p.name != goal.name)
            .filter(|p| {
                let mut tuples = model.tuples(p).peekable();
                tuples.peek().is_some() && tuples.all(|t| matches!((&t[0], &t[1]), (Term::Const(_), Term::Num(_))))
            })
            .collect();
        for p in predicates.iter().filter(|p| p.arity == 1) {
            for t in model.tuples(p) {
                if let Term::Const(c) = &t[0] {
                    names.insert(c.clone());
                }
            }
        }
        for p in &numeric_preds {
            for t in model.tuples(p) {
                if let Term::Const(c) = &t[0] {
                    names.insert(c.clone());
                }
            }
        }
        let subjects: Vec<String> = names.into_iter().collect();
        let index: HashMap<String, usize> = subjects.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let n = subjects.len();

        let mut categorical = Vec::new();
        for p in predicates.iter().filter(|p| p.arity == 1 && *p != &goal) {
            let mut ext = FixedBitSet::with_capacity(n);
            for t in model.tuples(p) {
                if let Some(&i) = t[0].as_const().and_then(|c| index.get(c)) {
                    ext.insert(i);
                }
            }
            categorical.push((p.name.clone(), ext));
        }

        let mut numeric = Vec::new();
        for p in numeric_preds {
            let mut values = vec![Vec::new(); n];
            for t in model.tuples(p) {
                if let (Some(c), Some(v)) = (t[0].as_const(), t[1].as_num()) {
                    values[index[c]].push(v);
                }
            }
            numeric.push(NumericFeature::new(p.name.clone(), values));
        }

        let reserved = predicates.iter().map(|p| p.name.clone()).collect();
        Ok(Space {
            goal,
            subjects,
            index,
            categorical,
            numeric,
            reserved,
        })
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn goal(&self) -> &Predicate {
        &self.goal
    }

    /// Names of the categorical bias predicates, in declaration order.
    pub fn categorical_bias(&self) -> impl Iterator<Item = &str> {
        self.categorical.iter().map(|(n, _)| n.as_str())
    }

    pub fn numeric_bias(&self) -> impl Iterator<Item = &str> {
        self.numeric.iter().map(|f| f.name.as_str())
    }

    pub(crate) fn len(&self) -> usize {
        self.subjects.len()
    }

    pub(crate) fn bits<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Result<FixedBitSet, LearnError> {
        let mut b = FixedBitSet::with_capacity(self.len());
        for a in atoms {
            let i = a.args[0]
                .as_const()
                .and_then(|c| self.index.get(c))
                .ok_or_else(|| LearnError::BadExample(a.clone()))?;
            b.insert(*i);
        }
        Ok(b)
    }

    pub(crate) fn full(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.len());
        b.insert_range(..);
        b
    }

    /// Renders a draft as a clause with head `head(X)`; `ab_names` maps
    /// abnormality indices to predicate names.
    pub(crate) fn render(&self, head: &str, body: &[Lit], ab_names: &[String]) -> Clause {
        let x = || Term::var(SUBJECT_VAR);
        let mut vars = value_vars();
        let mut lits = Vec::new();
        for lit in body {
            match lit {
                Lit::Cat(i) => lits.push(Literal::Pos(Atom::new(self.categorical[*i].0.clone(), vec![x()]))),
                Lit::Goal => lits.push(Literal::Pos(Atom::new(self.goal.name.clone(), vec![x()]))),
                Lit::Num { feature, shown, .. } => {
                    let v = vars.next().expect("unbounded variable supply");
                    lits.push(Literal::Pos(Atom::new(
                        self.numeric[*feature].name.clone(),
                        vec![x(), Term::var(v.clone())],
                    )));
                    lits.push(Literal::constraint(v, shown.0, shown.1));
                }
                Lit::NotAb(k) => lits.push(Literal::Neg(Atom::new(ab_names[*k].clone(), vec![x()]))),
                Lit::Member(items) => lits.push(Literal::Member {
                    term: x(),
                    items: items.iter().map(|&s| Term::constant(self.subjects[s].clone())).collect(),
                }),
            }
        }
        Clause::new(Atom::new(head, vec![x()]), lits)
    }
}

/// A, B, C, ... skipping the subject variable, then A1, B1, ...
pub(crate) fn value_vars() -> impl Iterator<Item = String> {
    (0..).flat_map(|round: usize| {
        ('A'..='Z')
            .filter(|c| c.to_string() != SUBJECT_VAR)
            .map(move |c| if round == 0 { c.to_string() } else { format!("{c}{round}") })
    })
}
