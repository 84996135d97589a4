//! Clause language: terms, atoms, literals, clauses and programs.
//!
//! The surface syntax is Prolog-like:
//!
//! ```text
//! % comment
//! bird(tweety).
//! fly(X) :- bird(X), not ab0(X).
//! play(X) :- temperature(X,A), A =< 75.0, not ab0(X).
//! fly(X) :- member(X,[jet]).
//! ```
//!
//! Identifiers starting with an uppercase letter (or `_`) are variables,
//! everything else is a constant.

mod parser;
mod stratify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ordered_float::OrderedFloat;

pub use parser::{parse_atom, parse_program, ParseError};
pub use stratify::{is_valid_stratification, stratify, NotStratifiedError};

/// Name of the built-in membership predicate.
pub const MEMBER: &str = "member";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
    Num(OrderedFloat<f64>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    /// Panics on non-finite input; numbers in the language are finite reals.
    pub fn num(value: f64) -> Self {
        assert!(value.is_finite(), "numeric terms must be finite");
        // -0.0 and 0.0 must compare equal after a print/parse cycle
        Term::Num(OrderedFloat(if value == 0.0 { 0.0 } else { value }))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Term::Num(n) => Some(n.0),
            _ => None,
        }
    }
}

/// Predicate identity: name plus arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Predicate { name: name.into(), arity }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// `pred(subject)` with a constant subject.
    pub fn unary(predicate: impl Into<String>, subject: impl Into<String>) -> Self {
        Atom::new(predicate, vec![Term::constant(subject)])
    }

    pub fn pred(&self) -> Predicate {
        Predicate::new(self.predicate.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "=<",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Pos(Atom),
    /// Negation as failure.
    Neg(Atom),
    /// `Var op threshold`; the variable must be bound by an earlier positive literal.
    Constraint {
        var: String,
        op: CmpOp,
        threshold: OrderedFloat<f64>,
    },
    /// Built-in `member(T, [c1,...,ck])`.
    Member {
        term: Term,
        items: Vec<Term>,
    },
}

impl Literal {
    pub fn constraint(var: impl Into<String>, op: CmpOp, threshold: f64) -> Self {
        assert!(threshold.is_finite(), "thresholds must be finite");
        Literal::Constraint {
            var: var.into(),
            op,
            threshold: OrderedFloat(if threshold == 0.0 { 0.0 } else { threshold }),
        }
    }

    /// The atom of a positive or negative literal.
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Atom, body: Vec<Literal>) -> Self {
        Clause { head, body }
    }

    pub fn fact(head: Atom) -> Self {
        Clause { head, body: vec![] }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.head.is_ground()
    }

    /// Variables that occur in the clause but are never bound by a positive
    /// body literal (a `member/2` literal binds its term).
    ///
    /// Bodyless rules such as `goal(X) :- true.` are exempt: their head
    /// variables range over the program's constants.
    pub fn unsafe_vars(&self) -> BTreeSet<String> {
        let mut bound = BTreeSet::new();
        for lit in &self.body {
            match lit {
                Literal::Pos(a) => bound.extend(a.vars().map(str::to_string)),
                Literal::Member { term: Term::Var(v), .. } => {
                    bound.insert(v.clone());
                }
                _ => {}
            }
        }
        let mut unsafe_vars = BTreeSet::new();
        if !self.body.is_empty() {
            for v in self.head.vars() {
                if !bound.contains(v) {
                    unsafe_vars.insert(v.to_string());
                }
            }
        }
        for lit in &self.body {
            let vars: Vec<&str> = match lit {
                Literal::Neg(a) => a.vars().collect(),
                Literal::Constraint { var, .. } => vec![var.as_str()],
                Literal::Member { items, .. } => items
                    .iter()
                    .filter_map(|t| match t {
                        Term::Var(v) => Some(v.as_str()),
                        _ => None,
                    })
                    .collect(),
                Literal::Pos(_) => vec![],
            };
            for v in vars {
                if !bound.contains(v) {
                    unsafe_vars.insert(v.to_string());
                }
            }
        }
        unsafe_vars
    }
}

/// A normal logic program. Equality compares clauses only.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub strata: Option<BTreeMap<Predicate, usize>>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}

impl Eq for Program {}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Self {
        Program { clauses, strata: None }
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    /// Clauses of `self` followed by clauses of `other`; strata are dropped.
    pub fn union(&self, other: &Program) -> Program {
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        Program::new(clauses)
    }

    /// Every user predicate mentioned in the program, in order of first
    /// occurrence (heads before bodies within a clause).
    pub fn predicates(&self) -> Vec<Predicate> {
        let mut seen = indexmap::IndexSet::new();
        for clause in &self.clauses {
            seen.insert(clause.head.pred());
            for lit in &clause.body {
                if let Some(a) = lit.atom() {
                    seen.insert(a.pred());
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Predicates that appear in some clause head.
    pub fn defined_predicates(&self) -> BTreeSet<Predicate> {
        self.clauses.iter().map(|c| c.head.pred()).collect()
    }

    /// All constants appearing anywhere in the program.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut add = |t: &Term| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        };
        for clause in &self.clauses {
            clause.head.args.iter().for_each(&mut add);
            for lit in &clause.body {
                match lit {
                    Literal::Pos(a) | Literal::Neg(a) => a.args.iter().for_each(&mut add),
                    Literal::Member { term, items } => {
                        add(term);
                        items.iter().for_each(&mut add);
                    }
                    Literal::Constraint { .. } => {}
                }
            }
        }
        out
    }

    /// Returns the first predicate name used at two different arities.
    pub fn arity_conflict(&self) -> Option<(String, usize, usize)> {
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for clause in &self.clauses {
            let atoms = std::iter::once(&clause.head).chain(clause.body.iter().filter_map(Literal::atom));
            for atom in atoms {
                let arity = atom.args.len();
                match arities.get(atom.predicate.as_str()) {
                    Some(&a) if a != arity => return Some((atom.predicate.clone(), a, arity)),
                    Some(_) => {}
                    None => {
                        arities.insert(&atom.predicate, arity);
                    }
                }
            }
        }
        None
    }
}

/// Prints one clause per line, without a trailing newline.
pub fn print_program(program: &Program) -> String {
    program.clauses.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

fn is_plain_constant(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn format_number(value: f64) -> String {
    format!("{value:?}")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) if is_plain_constant(c) => f.write_str(c),
            Term::Const(c) => {
                f.write_str("'")?;
                for ch in c.chars() {
                    match ch {
                        '\'' => f.write_str("\\'")?,
                        '\\' => f.write_str("\\\\")?,
                        _ => write!(f, "{ch}")?,
                    }
                }
                f.write_str("'")
            }
            Term::Var(v) => f.write_str(v),
            Term::Num(n) => f.write_str(&format_number(n.0)),
        }
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[Term]) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_terms(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "not {a}"),
            Literal::Constraint { var, op, threshold } => {
                write!(f, "{var} {op} {}", format_number(threshold.0))
            }
            Literal::Member { term, items } => {
                write!(f, "{MEMBER}({term},[")?;
                write_terms(f, items)?;
                f.write_str("])")
            }
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            return if self.head.is_ground() {
                write!(f, "{}.", self.head)
            } else {
                write!(f, "{} :- true.", self.head)
            };
        }
        write!(f, "{} :- ", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_default_with_exception() {
        let clause = Clause::new(
            Atom::new("fly", vec![Term::var("X")]),
            vec![
                Literal::Pos(Atom::new("bird", vec![Term::var("X")])),
                Literal::Neg(Atom::new("ab0", vec![Term::var("X")])),
            ],
        );
        let ab = Clause::new(
            Atom::new("ab0", vec![Term::var("X")]),
            vec![Literal::Pos(Atom::new("penguin", vec![Term::var("X")]))],
        );
        let program = Program::new(vec![clause, ab]);
        assert_eq!(print_program(&program), "fly(X) :- bird(X), not ab0(X).\nab0(X) :- penguin(X).");
    }

    #[test]
    fn prints_constraint_clause() {
        let x = || Term::var("X");
        let clause = Clause::new(
            Atom::new("play", vec![x()]),
            vec![
                Literal::Pos(Atom::new("temperature", vec![x(), Term::var("A")])),
                Literal::constraint("A", CmpOp::Le, 75.0),
                Literal::Neg(Atom::new("ab0", vec![x()])),
            ],
        );
        assert_eq!(clause.to_string(), "play(X) :- temperature(X,A), A =< 75.0, not ab0(X).");
    }

    #[test]
    fn empty_program_prints_nothing() {
        assert_eq!(print_program(&Program::default()), "");
    }

    #[test]
    fn bodyless_rule_prints_true() {
        let clause = Clause::fact(Atom::new("goal", vec![Term::var("X")]));
        assert_eq!(clause.to_string(), "goal(X) :- true.");
        assert!(clause.unsafe_vars().is_empty());
    }

    #[test]
    fn quoted_constants() {
        assert_eq!(Term::constant("Don't").to_string(), "'Don\\'t'");
        assert_eq!(Term::constant("tweety").to_string(), "tweety");
    }

    #[test]
    fn safety() {
        let p = parse_program("p(X) :- not q(X). r(X) :- s(X), X > 3. m(X) :- member(X,[a,b]).").unwrap();
        assert_eq!(p.clauses[0].unsafe_vars().into_iter().collect::<Vec<_>>(), vec!["X"]);
        assert!(p.clauses[1].unsafe_vars().is_empty());
        assert!(p.clauses[2].unsafe_vars().is_empty());
    }
}
