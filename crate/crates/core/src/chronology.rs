//! The order induced by strong influence: closure, linear extension, cycles,
//! and the branch-determinacy scan.

use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::event::{apply_event, EventId};
use crate::influence::{InfluenceGraph, StrongWitness};
use crate::model::Model;
use crate::reachability::{NodeId, ReachabilityGraph};
use crate::space::Subset;

/// Transitive closure ≺ of the strong edges, plus a rank `t` when ≺ is a
/// strict order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chronology {
    event_names: Vec<String>,
    reach: Vec<Vec<bool>>,
    ranks: Option<Vec<usize>>,
}

impl Chronology {
    /// Closure over an arbitrary edge list on `event_names.len()` events.
    pub fn from_edges(event_names: Vec<String>, edges: &[(EventId, EventId)]) -> Self {
        let n = event_names.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            adjacency[a.0].push(b.0);
        }
        let mut reach = vec![vec![false; n]; n];
        for (start, row) in reach.iter_mut().enumerate() {
            let mut queue: VecDeque<usize> = adjacency[start].iter().copied().collect();
            while let Some(v) = queue.pop_front() {
                if !row[v] {
                    row[v] = true;
                    queue.extend(adjacency[v].iter().copied());
                }
            }
        }
        let acyclic = (0..n).all(|i| !reach[i][i]);
        let ranks = acyclic.then(|| topological_ranks(&event_names, &adjacency));
        Self {
            event_names,
            reach,
            ranks,
        }
    }

    pub fn event_names(&self) -> &[String] {
        &self.event_names
    }

    pub fn precedes(&self, e: EventId, f: EventId) -> bool {
        self.reach[e.0][f.0]
    }

    /// All pairs of ≺, ordered by (e, f).
    pub fn pairs(&self) -> Vec<(EventId, EventId)> {
        let n = self.event_names.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.reach[i][j])
            .map(|(i, j)| (EventId(i), EventId(j)))
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.ranks.is_some()
    }

    /// t(e), present only when ≺ is a strict order.
    pub fn rank(&self, e: EventId) -> Option<usize> {
        self.ranks.as_ref().map(|r| r[e.0])
    }

    pub fn ranks(&self) -> Option<&[usize]> {
        self.ranks.as_deref()
    }
}

/// Kahn's algorithm, smallest available name first.
fn topological_ranks(names: &[String], adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = names.len();
    let mut indegree = vec![0usize; n];
    for targets in adjacency {
        for &t in targets {
            indegree[t] += 1;
        }
    }
    let mut ready: BTreeSet<(&str, usize)> = (0..n)
        .filter(|&i| indegree[i] == 0)
        .map(|i| (names[i].as_str(), i))
        .collect();
    let mut ranks = vec![usize::MAX; n];
    let mut next = 0;
    while let Some(entry) = ready.pop_first() {
        let v = entry.1;
        ranks[v] = next;
        next += 1;
        for &t in &adjacency[v] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.insert((names[t].as_str(), t));
            }
        }
    }
    debug_assert_eq!(next, n, "ranks requested for a cyclic relation");
    ranks
}

pub fn transitive_closure(ig: &InfluenceGraph) -> Chronology {
    Chronology::from_edges(ig.event_names.clone(), &ig.strong_edges())
}

/// One representative cycle per nontrivial strongly connected component.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleReport {
    /// `[e₁, …, e_k]` with `e₁ ⇒ e₂ ⇒ … ⇒ e_k ⇒ e₁`.
    pub cycles: Vec<Vec<EventId>>,
}

impl CycleReport {
    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Consecutive strong edges of a cycle, closing edge included.
    pub fn edges(cycle: &[EventId]) -> impl Iterator<Item = (EventId, EventId)> + '_ {
        cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&a, &b)| (a, b))
    }
}

pub fn find_strong_cycles(ig: &InfluenceGraph) -> CycleReport {
    find_cycles(ig.event_count(), &ig.strong_edges())
}

pub fn find_cycles(events: usize, edges: &[(EventId, EventId)]) -> CycleReport {
    let mut graph = DiGraph::<usize, ()>::with_capacity(events, edges.len());
    let nodes: Vec<_> = (0..events).map(|i| graph.add_node(i)).collect();
    for &(a, b) in edges {
        if a != b {
            graph.add_edge(nodes[a.0], nodes[b.0], ());
        }
    }
    let mut components: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let mut ids: Vec<usize> = c.into_iter().map(|n| graph[n]).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    components.sort();

    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); events];
    for &(a, b) in edges {
        successors[a.0].push(b.0);
    }
    for s in &mut successors {
        s.sort_unstable();
        s.dedup();
    }

    let cycles = components
        .iter()
        .map(|members| shortest_cycle_through(members[0], members, &successors))
        .collect();
    CycleReport { cycles }
}

/// BFS from `start` back to itself inside one component.
fn shortest_cycle_through(start: usize, members: &[usize], successors: &[Vec<usize>]) -> Vec<EventId> {
    let inside = |v: usize| members.binary_search(&v).is_ok();
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &successors[v] {
            if !inside(w) {
                continue;
            }
            if w == start {
                let mut path = vec![v];
                let mut cur = v;
                while cur != start {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return path.into_iter().map(EventId).collect();
            }
            if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(w) {
                slot.insert(v);
                queue.push_back(w);
            }
        }
    }
    unreachable!("strongly connected component without a cycle through its member")
}

/// Whether `e` had or had not occurred at the offending node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Occurred,
    NotOccurred,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BdViolation {
    pub edge: (EventId, EventId),
    pub node: NodeId,
    pub polarity: Polarity,
    pub expected: Subset,
    pub actual: Subset,
}

/// For every strong witness, finds explored histories whose records on the
/// shared sites `S(e) ∩ S(f)` match the witness context (with or without
/// `e`) but where `f` writes a different constraint on the observable.
pub fn check_branch_determinacy(model: &Model, graph: &ReachabilityGraph, ig: &InfluenceGraph) -> Vec<BdViolation> {
    let mut out = Vec::new();
    for (&edge, w) in &ig.strong {
        out.extend(branch_determinacy_for(model, graph, edge, w));
    }
    out
}

fn branch_determinacy_for(
    model: &Model,
    graph: &ReachabilityGraph,
    edge: (EventId, EventId),
    w: &StrongWitness,
) -> Vec<BdViolation> {
    let (space, mode) = (model.space(), model.mode());
    let f = model.event(w.f);
    let shared = model.event(w.e).shared_sites(f);
    let support = shared.as_slice();
    let before_e = w.state.restrict(support).expect("witness sites in range");
    let after_e_state = apply_event(model.event(w.e), &w.state).next;
    let after_e = after_e_state.restrict(support).expect("witness sites in range");

    let mut out = Vec::new();
    for id in graph.node_ids() {
        let node = graph.node(id);
        let local = node.state.restrict(support).expect("node sites in range");
        let occurred = node.occurred.contains(w.e);
        let (polarity, expected) = if !occurred && local.equiv(&before_e, space, mode) {
            (Polarity::NotOccurred, &w.branch0)
        } else if occurred && local.equiv(&after_e, space, mode) {
            (Polarity::Occurred, &w.branch1)
        } else {
            continue;
        };
        let post = apply_event(f, &node.state).next;
        let actual = post.get(w.site).expect("site in range").intersection(&w.observable);
        if !model.same(&actual, expected) {
            out.push(BdViolation {
                edge,
                node: id,
                polarity,
                expected: expected.clone(),
                actual,
            });
        }
    }
    out
}
