//! Stratum-by-stratum bottom-up evaluation over interned ground values.

use std::collections::{BTreeMap, HashMap, HashSet};

use ordered_float::OrderedFloat;

use super::{EngineConfig, EngineError, Strategy};
use crate::logic::{Clause, CmpOp, Literal, Predicate, Program, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Value {
    Sym(u32),
    Num(OrderedFloat<f64>),
}

type Tuple = Box<[Value]>;

#[derive(Default)]
pub(crate) struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub(crate) fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }
}

#[derive(Default)]
pub(crate) struct Relation {
    pub(crate) tuples: Vec<Tuple>,
    set: HashSet<Tuple>,
    by_first: HashMap<Value, Vec<u32>>,
}

impl Relation {
    fn insert(&mut self, t: Tuple) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        if let Some(&first) = t.first() {
            self.by_first.entry(first).or_default().push(self.tuples.len() as u32);
        }
        self.set.insert(t.clone());
        self.tuples.push(t);
        true
    }

    fn contains(&self, t: &[Value]) -> bool {
        self.set.contains(t)
    }

    fn len(&self) -> usize {
        self.tuples.len()
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Val(Value),
}

#[derive(Debug, Clone)]
enum Step {
    Pos { rel: usize, args: Vec<Slot> },
    Neg { rel: usize, args: Vec<Slot> },
    Cmp { var: usize, op: CmpOp, threshold: f64 },
    Member { slot: Slot, items: Vec<Value> },
}

#[derive(Debug, Clone)]
struct Rule {
    head_rel: usize,
    head: Vec<Slot>,
    steps: Vec<Step>,
    num_vars: usize,
    /// Head variables of a bodyless rule, ranged over the constant domain.
    free_vars: Vec<usize>,
}

pub(crate) struct Evaluation {
    pub(crate) interner: Interner,
    pub(crate) predicates: Vec<Predicate>,
    pub(crate) relations: Vec<Relation>,
}

impl Evaluation {
    pub(crate) fn term(&self, v: Value) -> Term {
        match v {
            Value::Sym(id) => Term::Const(self.interner.name(id).to_string()),
            Value::Num(n) => Term::Num(n),
        }
    }

    pub(crate) fn into_facts(self) -> BTreeMap<Predicate, std::collections::BTreeSet<Vec<Term>>> {
        let mut out = BTreeMap::new();
        for (i, rel) in self.relations.iter().enumerate() {
            if rel.len() == 0 {
                continue;
            }
            let set = rel.tuples.iter().map(|t| t.iter().map(|&v| self.term(v)).collect()).collect();
            out.insert(self.predicates[i].clone(), set);
        }
        out
    }
}

struct Compiler<'a> {
    interner: &'a mut Interner,
    rel_ids: &'a mut HashMap<Predicate, usize>,
    predicates: &'a mut Vec<Predicate>,
}

impl Compiler<'_> {
    fn rel(&mut self, p: Predicate) -> usize {
        if let Some(&id) = self.rel_ids.get(&p) {
            return id;
        }
        let id = self.predicates.len();
        self.predicates.push(p.clone());
        self.rel_ids.insert(p, id);
        id
    }

    fn value(&mut self, t: &Term) -> Option<Value> {
        match t {
            Term::Const(c) => Some(Value::Sym(self.interner.intern(c))),
            Term::Num(n) => Some(Value::Num(*n)),
            Term::Var(_) => None,
        }
    }

    fn slot(&mut self, t: &Term, vars: &mut HashMap<String, usize>) -> Slot {
        match t {
            Term::Var(v) => {
                let n = vars.len();
                Slot::Var(*vars.entry(v.clone()).or_insert(n))
            }
            other => Slot::Val(self.value(other).expect("non-variable term")),
        }
    }

    fn compile(&mut self, clause: &Clause) -> Result<Rule, EngineError> {
        let unsafe_vars = clause.unsafe_vars();
        if !unsafe_vars.is_empty() {
            return Err(EngineError::Unsafe {
                clause: clause.to_string(),
                vars: unsafe_vars.into_iter().collect(),
            });
        }
        let mut vars: HashMap<String, usize> = HashMap::new();
        let mut bound: HashSet<String> = HashSet::new();
        let mut pending: Vec<&Literal> = clause.body.iter().collect();
        let mut steps = Vec::new();

        let ready = |lit: &Literal, bound: &HashSet<String>| -> bool {
            match lit {
                Literal::Neg(a) => a.vars().all(|v| bound.contains(v)),
                Literal::Constraint { var, .. } => bound.contains(var),
                Literal::Member { term, .. } => match term {
                    Term::Var(v) => bound.contains(v),
                    _ => true,
                },
                Literal::Pos(a) => a.vars().all(|v| bound.contains(v)),
            }
        };

        while !pending.is_empty() {
            // fully bound literals act as filters and run as early as possible
            let idx = pending
                .iter()
                .position(|l| ready(l, &bound))
                .or_else(|| pending.iter().position(|l| matches!(l, Literal::Pos(_) | Literal::Member { .. })))
                .expect("safety check guarantees a generator");
            let lit = pending.remove(idx);
            let step = match lit {
                Literal::Pos(a) => {
                    let rel = self.rel(a.pred());
                    let args = a.args.iter().map(|t| self.slot(t, &mut vars)).collect();
                    bound.extend(a.vars().map(str::to_string));
                    Step::Pos { rel, args }
                }
                Literal::Neg(a) => {
                    let rel = self.rel(a.pred());
                    let args = a.args.iter().map(|t| self.slot(t, &mut vars)).collect();
                    Step::Neg { rel, args }
                }
                Literal::Constraint { var, op, threshold } => {
                    let Slot::Var(var) = self.slot(&Term::Var(var.clone()), &mut vars) else {
                        unreachable!()
                    };
                    Step::Cmp {
                        var,
                        op: *op,
                        threshold: threshold.0,
                    }
                }
                Literal::Member { term, items } => {
                    let slot = self.slot(term, &mut vars);
                    if let Term::Var(v) = term {
                        bound.insert(v.clone());
                    }
                    let items = items.iter().filter_map(|t| self.value(t)).collect();
                    Step::Member { slot, items }
                }
            };
            steps.push(step);
        }

        let head_rel = self.rel(clause.head.pred());
        let head: Vec<Slot> = clause.head.args.iter().map(|t| self.slot(t, &mut vars)).collect();
        let free_vars = if clause.body.is_empty() {
            let mut free: Vec<usize> = head
                .iter()
                .filter_map(|s| match s {
                    Slot::Var(i) => Some(*i),
                    _ => None,
                })
                .collect();
            free.sort_unstable();
            free.dedup();
            free
        } else {
            vec![]
        };
        Ok(Rule {
            head_rel,
            head,
            steps,
            num_vars: vars.len(),
            free_vars,
        })
    }
}

struct Ctx<'a> {
    relations: &'a [Relation],
    delta: &'a [Relation],
    domain: &'a [Value],
}

fn matches_tuple(args: &[Slot], tuple: &[Value], bindings: &mut [Option<Value>], newly: &mut Vec<usize>) -> bool {
    for (slot, &v) in args.iter().zip(tuple.iter()) {
        match *slot {
            Slot::Val(c) => {
                if c != v {
                    return false;
                }
            }
            Slot::Var(i) => match bindings[i] {
                Some(b) if b != v => return false,
                Some(_) => {}
                None => {
                    bindings[i] = Some(v);
                    newly.push(i);
                }
            },
        }
    }
    true
}

fn resolve(slot: Slot, bindings: &[Option<Value>]) -> Option<Value> {
    match slot {
        Slot::Val(v) => Some(v),
        Slot::Var(i) => bindings[i],
    }
}

fn join(rule: &Rule, step: usize, delta_step: Option<usize>, ctx: &Ctx, bindings: &mut Vec<Option<Value>>, out: &mut Vec<Tuple>) {
    if step == rule.steps.len() {
        emit_head(rule, 0, ctx, bindings, out);
        return;
    }
    match &rule.steps[step] {
        Step::Pos { rel, args } => {
            let relation = if delta_step == Some(step) {
                &ctx.delta[*rel]
            } else {
                &ctx.relations[*rel]
            };
            let resolved: Vec<Option<Value>> = args.iter().map(|&s| resolve(s, bindings)).collect();
            let mut newly = Vec::new();
            let mut visit = |tuple: &[Value], bindings: &mut Vec<Option<Value>>, out: &mut Vec<Tuple>| {
                newly.clear();
                if matches_tuple(args, tuple, bindings, &mut newly) {
                    join(rule, step + 1, delta_step, ctx, bindings, out);
                }
                for &i in &newly {
                    bindings[i] = None;
                }
            };
            if resolved.iter().all(Option::is_some) {
                let key: Vec<Value> = resolved.into_iter().map(Option::unwrap).collect();
                if relation.contains(&key) {
                    join(rule, step + 1, delta_step, ctx, bindings, out);
                }
            } else if let Some(Some(first)) = resolved.first() {
                if let Some(ids) = relation.by_first.get(first) {
                    for &id in ids {
                        visit(&relation.tuples[id as usize], bindings, out);
                    }
                }
            } else {
                for tuple in &relation.tuples {
                    visit(tuple, bindings, out);
                }
            }
        }
        Step::Neg { rel, args } => {
            let key: Vec<Value> = args
                .iter()
                .map(|&s| resolve(s, bindings).expect("negated literal is ground"))
                .collect();
            if !ctx.relations[*rel].contains(&key) {
                join(rule, step + 1, delta_step, ctx, bindings, out);
            }
        }
        Step::Cmp { var, op, threshold } => {
            if let Some(Value::Num(n)) = bindings[*var] {
                if op.holds(n.0, *threshold) {
                    join(rule, step + 1, delta_step, ctx, bindings, out);
                }
            }
        }
        Step::Member { slot, items } => match resolve(*slot, bindings) {
            Some(v) => {
                if items.contains(&v) {
                    join(rule, step + 1, delta_step, ctx, bindings, out);
                }
            }
            None => {
                let Slot::Var(i) = *slot else { unreachable!() };
                for &item in items {
                    bindings[i] = Some(item);
                    join(rule, step + 1, delta_step, ctx, bindings, out);
                }
                bindings[i] = None;
            }
        },
    }
}

fn emit_head(rule: &Rule, free: usize, ctx: &Ctx, bindings: &mut Vec<Option<Value>>, out: &mut Vec<Tuple>) {
    if free == rule.free_vars.len() {
        let tuple: Tuple = rule.head.iter().map(|&s| resolve(s, bindings).expect("head is ground")).collect();
        out.push(tuple);
        return;
    }
    let var = rule.free_vars[free];
    for &c in ctx.domain {
        bindings[var] = Some(c);
        emit_head(rule, free + 1, ctx, bindings, out);
    }
    bindings[var] = None;
}

fn derive(rule: &Rule, delta_step: Option<usize>, ctx: &Ctx) -> Vec<Tuple> {
    let mut bindings = vec![None; rule.num_vars];
    let mut out = Vec::new();
    join(rule, 0, delta_step, ctx, &mut bindings, &mut out);
    out
}

pub(crate) fn evaluate(program: &Program, config: &EngineConfig) -> Result<Evaluation, EngineError> {
    let stratified = crate::logic::stratify(program).map_err(EngineError::NotStratified)?;
    let strata = stratified.strata.expect("stratify fills strata");

    let mut interner = Interner::default();
    let mut rel_ids = HashMap::new();
    let mut predicates = Vec::new();
    let mut compiler = Compiler {
        interner: &mut interner,
        rel_ids: &mut rel_ids,
        predicates: &mut predicates,
    };

    let mut facts: Vec<(usize, Tuple)> = Vec::new();
    let mut rules: Vec<(usize, Rule)> = Vec::new();
    for clause in &program.clauses {
        if clause.is_fact() {
            let rel = compiler.rel(clause.head.pred());
            let tuple = clause.head.args.iter().map(|t| compiler.value(t).expect("ground fact")).collect();
            facts.push((rel, tuple));
        } else {
            let stratum = strata[&clause.head.pred()];
            rules.push((stratum, compiler.compile(clause)?));
        }
    }
    // constants that only occur in rules are part of the domain as well
    for c in program.constants() {
        compiler.interner.intern(&c);
    }

    let domain: Vec<Value> = (0..interner.len() as u32).map(Value::Sym).collect();
    let mut relations: Vec<Relation> = (0..predicates.len()).map(|_| Relation::default()).collect();
    let mut total = 0usize;
    let check_cap = |total: usize| {
        if total > config.max_atoms {
            Err(EngineError::GroundingBlowup { limit: config.max_atoms })
        } else {
            Ok(())
        }
    };

    for (rel, tuple) in facts {
        if relations[rel].insert(tuple) {
            total += 1;
        }
    }
    check_cap(total)?;

    let rel_stratum: Vec<usize> = predicates.iter().map(|p| strata.get(p).copied().unwrap_or(0)).collect();
    let max_stratum = rules.iter().map(|(s, _)| *s).max();
    let empty: Vec<Relation> = (0..predicates.len()).map(|_| Relation::default()).collect();

    for stratum in 0..=max_stratum.unwrap_or(0) {
        let layer: Vec<&Rule> = rules.iter().filter(|(s, _)| *s == stratum).map(|(_, r)| r).collect();
        if layer.is_empty() {
            continue;
        }
        match config.strategy {
            Strategy::Naive => loop {
                let mut derived = Vec::new();
                {
                    let ctx = Ctx {
                        relations: &relations,
                        delta: &empty,
                        domain: &domain,
                    };
                    for rule in &layer {
                        for t in derive(rule, None, &ctx) {
                            derived.push((rule.head_rel, t));
                        }
                    }
                }
                let mut changed = false;
                for (rel, t) in derived {
                    if relations[rel].insert(t) {
                        total += 1;
                        changed = true;
                    }
                }
                check_cap(total)?;
                if !changed {
                    break;
                }
            },
            Strategy::SemiNaive => {
                let mut delta: Vec<Relation> = (0..predicates.len()).map(|_| Relation::default()).collect();
                let mut first = true;
                loop {
                    let mut derived = Vec::new();
                    {
                        let ctx = Ctx {
                            relations: &relations,
                            delta: &delta,
                            domain: &domain,
                        };
                        for rule in &layer {
                            if first {
                                derived.extend(derive(rule, None, &ctx).into_iter().map(|t| (rule.head_rel, t)));
                                continue;
                            }
                            for (i, step) in rule.steps.iter().enumerate() {
                                if let Step::Pos { rel, .. } = step {
                                    if rel_stratum[*rel] == stratum && delta[*rel].len() > 0 {
                                        derived.extend(derive(rule, Some(i), &ctx).into_iter().map(|t| (rule.head_rel, t)));
                                    }
                                }
                            }
                        }
                    }
                    first = false;
                    let mut next: Vec<Relation> = (0..predicates.len()).map(|_| Relation::default()).collect();
                    let mut changed = false;
                    for (rel, t) in derived {
                        if !relations[rel].contains(&t) && next[rel].insert(t) {
                            changed = true;
                        }
                    }
                    for (rel, d) in next.iter().enumerate() {
                        for t in &d.tuples {
                            relations[rel].insert(t.clone());
                            total += 1;
                        }
                    }
                    check_cap(total)?;
                    if !changed {
                        break;
                    }
                    delta = next;
                }
            }
        }
    }

    Ok(Evaluation {
        interner,
        predicates,
        relations,
    })
}
