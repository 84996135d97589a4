use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;

use super::{Literal, Predicate, Program};

/// The program has a dependency cycle through negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotStratifiedError {
    /// Predicates along the cycle; the first edge is the negative one and the
    /// last element repeats the first.
    pub cycle: Vec<Predicate>,
}

impl fmt::Display for NotStratifiedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("program is not stratified; negative cycle: ")?;
        for (i, p) in self.cycle.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for NotStratifiedError {}

/// Edge `body -> head`, `true` when the dependency goes through `not`.
fn dependency_graph(program: &Program) -> (DiGraph<Predicate, bool>, HashMap<Predicate, NodeIndex>) {
    let mut graph = DiGraph::new();
    let mut nodes: HashMap<Predicate, NodeIndex> = HashMap::new();
    let mut node = |graph: &mut DiGraph<Predicate, bool>, p: Predicate| *nodes.entry(p.clone()).or_insert_with(|| graph.add_node(p));
    for clause in &program.clauses {
        let head = node(&mut graph, clause.head.pred());
        for lit in &clause.body {
            let (atom, negative) = match lit {
                Literal::Pos(a) => (a, false),
                Literal::Neg(a) => (a, true),
                _ => continue,
            };
            let body = node(&mut graph, atom.pred());
            match graph.find_edge(body, head) {
                Some(e) => graph[e] |= negative,
                None => {
                    graph.add_edge(body, head, negative);
                }
            }
        }
    }
    (graph, nodes)
}

/// Computes a stratification: positive dependencies stay in the same or a
/// lower stratum, negative dependencies point to a strictly lower stratum.
pub fn stratify(program: &Program) -> Result<Program, NotStratifiedError> {
    let (graph, _) = dependency_graph(program);
    let sccs = tarjan_scc(&graph);

    let mut component = vec![0usize; graph.node_count()];
    for (i, scc) in sccs.iter().enumerate() {
        for &n in scc {
            component[n.index()] = i;
        }
    }

    for edge in graph.edge_references() {
        if *edge.weight() && component[edge.source().index()] == component[edge.target().index()] {
            return Err(NotStratifiedError {
                cycle: negative_cycle(&graph, edge.source(), edge.target(), &component),
            });
        }
    }

    // tarjan_scc yields components in reverse topological order
    let mut level = vec![0usize; sccs.len()];
    for ci in (0..sccs.len()).rev() {
        let mut stratum = 0;
        for &n in &sccs[ci] {
            for edge in graph.edges_directed(n, petgraph::Direction::Incoming) {
                let from = component[edge.source().index()];
                if from != ci {
                    stratum = stratum.max(level[from] + usize::from(*edge.weight()));
                }
            }
        }
        level[ci] = stratum;
    }

    let strata: BTreeMap<Predicate, usize> = graph
        .node_indices()
        .map(|n| (graph[n].clone(), level[component[n.index()]]))
        .collect();
    Ok(Program {
        clauses: program.clauses.clone(),
        strata: Some(strata),
    })
}

fn negative_cycle(graph: &DiGraph<Predicate, bool>, from: NodeIndex, to: NodeIndex, component: &[usize]) -> Vec<Predicate> {
    // shortest path to -> ... -> from inside the component closes the cycle
    let scc = component[from.index()];
    let mut parent: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut queue = VecDeque::from([to]);
    let mut seen = std::collections::HashSet::from([to]);
    while let Some(n) = queue.pop_front() {
        if n == from {
            break;
        }
        for next in graph.neighbors(n) {
            if component[next.index()] == scc && seen.insert(next) {
                parent.insert(next, n);
                queue.push_back(next);
            }
        }
    }
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    // from -(not)-> to -> ... -> from
    std::iter::once(from).chain(path).map(|n| graph[n].clone()).collect()
}

/// Checks that `strata` is a valid stratification of `program`.
pub fn is_valid_stratification(program: &Program, strata: &BTreeMap<Predicate, usize>) -> bool {
    program.clauses.iter().all(|clause| {
        let Some(&head) = strata.get(&clause.head.pred()) else {
            return false;
        };
        clause.body.iter().all(|lit| match lit {
            Literal::Pos(a) => strata.get(&a.pred()).is_some_and(|&s| s <= head),
            Literal::Neg(a) => strata.get(&a.pred()).is_some_and(|&s| s < head),
            _ => true,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_program;

    #[test]
    fn default_with_exception() {
        let p = parse_program("bird(X) :- penguin(X). fly(X) :- bird(X), not ab0(X). ab0(X) :- penguin(X).").unwrap();
        let s = stratify(&p).unwrap();
        let strata = s.strata.as_ref().unwrap();
        assert!(is_valid_stratification(&p, strata));
        assert!(strata[&Predicate::new("fly", 1)] > strata[&Predicate::new("ab0", 1)]);
    }

    #[test]
    fn odd_loop() {
        let p = parse_program("p :- not p.").unwrap();
        let err = stratify(&p).unwrap_err();
        assert_eq!(err.cycle, vec![Predicate::new("p", 0), Predicate::new("p", 0)]);
    }

    #[test]
    fn longer_negative_cycle() {
        let p = parse_program("a(X) :- b(X). b(X) :- c(X), not a(X). c(x).").unwrap();
        let err = stratify(&p).unwrap_err();
        assert_eq!(err.cycle.first(), err.cycle.last());
        assert!(err.cycle.len() >= 3);
    }

    #[test]
    fn positive_recursion_is_fine() {
        let p = parse_program("t(X,Y) :- e(X,Y). t(X,Z) :- e(X,Y), t(Y,Z). u(X) :- v(X), not t(X,X).").unwrap();
        let s = stratify(&p).unwrap();
        assert!(is_valid_stratification(&p, s.strata.as_ref().unwrap()));
    }
}
