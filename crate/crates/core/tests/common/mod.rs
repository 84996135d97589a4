//! Random instance generators and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use fold_core::engine::ExampleSet;
use fold_core::learner::{information_gain, GainCounts};
use fold_core::logic::{parse_program, Atom, CmpOp, Literal, Program, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A learning problem: background, examples, and its size parameters.
#[derive(Debug, Clone)]
pub struct Instance {
    pub background: Program,
    pub examples: ExampleSet,
    pub text: String,
}

/// Up to 20 subjects, up to 6 unary bias predicates (one possibly defined by
/// a rule with negation) and up to 2 numeric features.
pub fn learning_instance(seed: u64, numeric: bool) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(2..=20);
    let cats = r.gen_range(1..=6);
    let nums = if numeric { r.gen_range(0..=2) } else { 0 };
    let mut text = String::new();
    let derived = cats >= 3 && r.gen_bool(0.3);
    for c in 0..cats {
        if derived && c == 0 {
            writeln!(text, "q0(X) :- q1(X), not q2(X).").unwrap();
            continue;
        }
        let density = r.gen_range(0.1..0.9);
        for s in 0..n {
            if r.gen_bool(density) {
                write!(text, "q{c}(s{s}). ").unwrap();
            }
        }
        writeln!(text).unwrap();
    }
    for f in 0..nums {
        for s in 0..n {
            if r.gen_bool(0.9) {
                write!(text, "f{f}(s{s},{}). ", r.gen_range(0..12)).unwrap();
            }
        }
        writeln!(text).unwrap();
    }
    // every subject appears somewhere so closed-world negatives see it
    for s in 0..n {
        write!(text, "thing(s{s}). ").unwrap();
    }
    let background = parse_program(&text).expect("generated background parses");
    let mut subjects: Vec<usize> = (0..n).collect();
    subjects.shuffle(&mut r);
    let n_pos = r.gen_range(1..=n);
    let goal = |s: usize| Atom::unary("goal", format!("s{s}"));
    let positives: BTreeSet<Atom> = subjects[..n_pos].iter().map(|&s| goal(s)).collect();
    let negatives: BTreeSet<Atom> = subjects[n_pos..].iter().map(|&s| goal(s)).collect();
    Instance {
        background,
        examples: ExampleSet::new(positives, negatives).unwrap(),
        text,
    }
}

/// A random stratified program over at most 12 constants: unary and binary
/// base facts, then up to three derived unary predicates, each allowed to
/// use earlier ones under negation and itself recursively.
pub fn stratified_program(seed: u64) -> String {
    let mut r = rng(seed);
    let n = r.gen_range(2..=12);
    let mut text = String::new();
    for base in ["e0", "e1"] {
        for s in 0..n {
            if r.gen_bool(0.3) {
                write!(text, "{base}(c{s}). ").unwrap();
            }
        }
    }
    for _ in 0..r.gen_range(1..=n) {
        write!(text, "r(c{},c{}). ", r.gen_range(0..n), r.gen_range(0..n)).unwrap();
    }
    writeln!(text).unwrap();
    let derived = r.gen_range(1..=3);
    for i in 0..derived {
        for _ in 0..r.gen_range(1..=3) {
            let lower: Vec<String> = ["e0".to_string(), "e1".to_string()]
                .into_iter()
                .chain((0..i).map(|j| format!("p{j}")))
                .collect();
            let mut same = lower.clone();
            same.push(format!("p{i}"));
            let mut body = vec![format!("{}(X)", lower.choose(&mut r).unwrap())];
            if r.gen_bool(0.5) {
                body.push("r(X,Y)".into());
                body.push(format!("{}(Y)", same.choose(&mut r).unwrap()));
                if r.gen_bool(0.5) {
                    body.push(format!("not {}(Y)", lower.choose(&mut r).unwrap()));
                }
            }
            if r.gen_bool(0.6) {
                body.push(format!("not {}(X)", lower.choose(&mut r).unwrap()));
            }
            writeln!(text, "p{i}(X) :- {}.", body.join(", ")).unwrap();
        }
    }
    text
}

type Ground = (Atom, Vec<Atom>, Vec<Atom>);

fn substitute(a: &Atom, theta: &BTreeMap<String, String>) -> Atom {
    Atom::new(
        a.predicate.clone(),
        a.args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::constant(theta[v].clone()),
                other => other.clone(),
            })
            .collect(),
    )
}

/// Every instantiation of every clause over the program's constants.
/// Handles positive and negative atoms only.
pub fn ground(p: &Program) -> Vec<Ground> {
    let constants: Vec<String> = p.constants().into_iter().collect();
    let mut out = Vec::new();
    for c in &p.clauses {
        let mut vars: BTreeSet<String> = c.head.vars().map(str::to_string).collect();
        for l in &c.body {
            if let Some(a) = l.atom() {
                vars.extend(a.vars().map(str::to_string));
            }
        }
        let vars: Vec<String> = vars.into_iter().collect();
        let mut idx = vec![0usize; vars.len()];
        loop {
            let theta: BTreeMap<String, String> = vars.iter().cloned().zip(idx.iter().map(|&i| constants[i].clone())).collect();
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for l in &c.body {
                match l {
                    Literal::Pos(a) => pos.push(substitute(a, &theta)),
                    Literal::Neg(a) => neg.push(substitute(a, &theta)),
                    other => panic!("oracle does not ground {other}"),
                }
            }
            out.push((substitute(&c.head, &theta), pos, neg));
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < constants.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    out
}

/// Least model of a positive ground program.
fn least_model<'a>(rules: impl Iterator<Item = (&'a Atom, &'a [Atom])> + Clone) -> BTreeSet<Atom> {
    let mut m = BTreeSet::new();
    loop {
        let before = m.len();
        for (head, body) in rules.clone() {
            if body.iter().all(|a| m.contains(a)) {
                m.insert(head.clone());
            }
        }
        if m.len() == before {
            return m;
        }
    }
}

/// All stable models by checking M = LM(P^M) for every candidate M between
/// the facts and the negation-free over-approximation. `None` when more than
/// `limit` atoms are undecided.
pub fn gl_stable_models(p: &Program, limit: usize) -> Option<Vec<BTreeSet<Atom>>> {
    let g = ground(p);
    let facts: BTreeSet<Atom> = g
        .iter()
        .filter(|(_, pos, neg)| pos.is_empty() && neg.is_empty())
        .map(|(h, _, _)| h.clone())
        .collect();
    let upper = least_model(g.iter().map(|(h, pos, _)| (h, pos.as_slice())));
    let open: Vec<&Atom> = upper.difference(&facts).collect();
    if open.len() > limit {
        return None;
    }
    let mut models = Vec::new();
    for mask in 0u64..(1 << open.len()) {
        let mut m = facts.clone();
        for (i, a) in open.iter().enumerate() {
            if mask >> i & 1 == 1 {
                m.insert((*a).clone());
            }
        }
        let reduct = g
            .iter()
            .filter(|(_, _, neg)| neg.iter().all(|a| !m.contains(a)))
            .map(|(h, pos, _)| (h, pos.as_slice()));
        if least_model(reduct) == m {
            models.push(m);
        }
    }
    Some(models)
}

/// Exhaustive `(feature, op, threshold)` search with plain counting. Features
/// are taken in first-occurrence order, `<=` before `>`, thresholds ascending,
/// strict improvement over the best so far (starting at 0).
pub fn brute_force_split(b: &Program, pos: &BTreeSet<Atom>, neg: &BTreeSet<Atom>) -> Option<(String, CmpOp, f64, f64)> {
    let mut features: Vec<String> = Vec::new();
    let mut values: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for c in &b.clauses {
        if let [Term::Const(s), Term::Num(v)] = c.head.args.as_slice() {
            if !features.contains(&c.head.predicate) {
                features.push(c.head.predicate.clone());
            }
            values
                .entry((c.head.predicate.clone(), s.clone()))
                .or_default()
                .push(v.into_inner());
        }
    }
    let subject = |a: &Atom| a.args[0].as_const().unwrap().to_string();
    let mut best: Option<(String, CmpOp, f64, f64)> = None;
    for f in &features {
        let vals = |s: &str| values.get(&(f.clone(), s.to_string())).cloned().unwrap_or_default();
        let mut thresholds: Vec<f64> = pos.iter().chain(neg).flat_map(|a| vals(&subject(a))).collect();
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        for op in [CmpOp::Le, CmpOp::Gt] {
            for &t in &thresholds {
                let holds = |a: &Atom| vals(&subject(a)).iter().any(|&v| op.holds(v, t));
                let p1 = pos.iter().filter(|a| holds(a)).count();
                let n1 = neg.iter().filter(|a| holds(a)).count();
                let gain = information_gain(GainCounts {
                    p0: pos.len(),
                    n0: neg.len(),
                    p1,
                    n1,
                    t: p1,
                });
                if gain > best.as_ref().map_or(0.0, |b| b.3) {
                    best = Some((f.clone(), op, t, gain));
                }
            }
        }
    }
    best
}

/// Numeric-only instance for the split oracle: up to 50 examples, up to 3
/// features with repeated values, some subjects holding several values.
pub fn numeric_instance(seed: u64) -> (Program, BTreeSet<Atom>, BTreeSet<Atom>) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=50);
    let features = r.gen_range(1..=3);
    let mut text = String::new();
    for f in 0..features {
        let range = r.gen_range(2..30);
        for s in 0..n {
            for _ in 0..r.gen_range(0..=2usize).max(usize::from(r.gen_bool(0.8))) {
                let v = r.gen_range(0..range) as f64 / 2.0;
                write!(text, "v{f}(s{s},{v:?}). ").unwrap();
            }
        }
    }
    let b = parse_program(&text).unwrap();
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();
    for s in 0..n {
        let a = Atom::unary("goal", format!("s{s}"));
        if r.gen_bool(0.5) {
            pos.insert(a);
        } else {
            neg.insert(a);
        }
    }
    if pos.is_empty() {
        let first = neg.pop_first().unwrap();
        pos.insert(first);
    }
    (b, pos, neg)
}
