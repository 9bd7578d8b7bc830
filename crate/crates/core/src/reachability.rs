//! Breadth-first exploration of reachable record states, and the premise
//! checks that quantify over them.
//!
//! Nodes carry the set of events that have occurred on the way in, so two
//! histories reaching the same record state with different occurrences stay
//! distinct. Branch determinacy needs exactly that distinction.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::bitset::BitSet;
use crate::event::{apply_event, independent, EventId, Fired, MonotonicityViolation};
use crate::model::Model;
use crate::record::RecordState;

/// Events that have occurred at least once.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventSet(BitSet);

impl EventSet {
    pub fn empty(events: usize) -> Self {
        Self(BitSet::empty(events))
    }

    pub fn contains(&self, event: EventId) -> bool {
        self.0.contains(event.0)
    }

    pub fn insert(&mut self, event: EventId) -> bool {
        self.0.insert(event.0)
    }

    pub fn with(&self, event: EventId) -> Self {
        let mut out = self.clone();
        out.insert(event);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = EventId> + '_ {
        self.0.iter().map(EventId)
    }

    pub fn len(&self) -> usize {
        self.0.count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub state: RecordState,
    pub occurred: EventSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: NodeId,
    pub event: EventId,
    pub target: NodeId,
    pub fired: Fired,
    pub violations: Vec<MonotonicityViolation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExplorationLimits {
    pub max_nodes: usize,
    pub max_depth: usize,
}

impl Default for ExplorationLimits {
    fn default() -> Self {
        Self {
            max_nodes: 100_000,
            max_depth: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachabilityGraph {
    nodes: Vec<Node>,
    depths: Vec<usize>,
    edges: Vec<Edge>,
    truncated: bool,
}

impl ReachabilityGraph {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.depths[id.0]
    }

    pub fn initial(&self) -> NodeId {
        NodeId(0)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Set when a node or depth limit stopped exploration before closure.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Node ids with a record state not seen at any earlier node.
    pub fn distinct_state_nodes(&self) -> Vec<NodeId> {
        let mut seen = HashSet::new();
        self.node_ids()
            .filter(|id| seen.insert(&self.nodes[id.0].state))
            .collect()
    }
}

pub fn explore(model: &Model, limits: ExplorationLimits) -> ReachabilityGraph {
    explore_from(model, model.initial().clone(), limits)
}

/// Closure of `{start}` under every event, events tried in declaration order.
pub fn explore_from(model: &Model, start: RecordState, limits: ExplorationLimits) -> ReachabilityGraph {
    assert!(limits.max_nodes > 0 && limits.max_depth > 0, "exploration limits must be positive");
    let root = Node {
        state: start,
        occurred: EventSet::empty(model.events().len()),
    };
    let mut index: HashMap<Node, NodeId> = HashMap::from([(root.clone(), NodeId(0))]);
    let mut graph = ReachabilityGraph {
        nodes: vec![root],
        depths: vec![0],
        edges: Vec::new(),
        truncated: false,
    };
    let mut queue = VecDeque::from([NodeId(0)]);

    while let Some(source) = queue.pop_front() {
        let depth = graph.depths[source.0];
        for event_id in model.event_ids() {
            let node = &graph.nodes[source.0];
            let outcome = apply_event(model.event(event_id), &node.state);
            let next = Node {
                state: outcome.next,
                occurred: node.occurred.with(event_id),
            };
            let target = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if depth >= limits.max_depth || graph.nodes.len() >= limits.max_nodes {
                        graph.truncated = true;
                        continue;
                    }
                    let id = NodeId(graph.nodes.len());
                    index.insert(next.clone(), id);
                    graph.nodes.push(next);
                    graph.depths.push(depth + 1);
                    queue.push_back(id);
                    id
                }
            };
            graph.edges.push(Edge {
                source,
                event: event_id,
                target,
                fired: outcome.fired,
                violations: outcome.violations,
            });
        }
    }
    graph
}

/// Nodes whose state is inconsistent under the model's mode.
pub fn check_gs(model: &Model, graph: &ReachabilityGraph) -> Vec<NodeId> {
    graph
        .node_ids()
        .filter(|id| !model.is_consistent(&graph.node(*id).state))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiamondViolation {
    pub node: NodeId,
    pub e: EventId,
    pub f: EventId,
    /// U_e(U_f(R))
    pub lhs: RecordState,
    /// U_f(U_e(R))
    pub rhs: RecordState,
}

/// Compares U_e∘U_f with U_f∘U_e for every independent pair at every
/// distinct explored state.
pub fn check_diamond(model: &Model, graph: &ReachabilityGraph) -> Vec<DiamondViolation> {
    let events = model.events();
    let mut pairs = Vec::new();
    for i in 0..events.len() {
        for j in i + 1..events.len() {
            if independent(&events[i], &events[j]) {
                pairs.push((EventId(i), EventId(j)));
            }
        }
    }
    let mut out = Vec::new();
    if pairs.is_empty() {
        return out;
    }
    for node in graph.distinct_state_nodes() {
        let state = &graph.node(node).state;
        for &(e, f) in &pairs {
            let (ev, fv) = (model.event(e), model.event(f));
            let lhs = apply_event(ev, &apply_event(fv, state).next).next;
            let rhs = apply_event(fv, &apply_event(ev, state).next).next;
            if !model.states_equiv(&lhs, &rhs) {
                out.push(DiamondViolation { node, e, f, lhs, rhs });
            }
        }
    }
    out
}

/// Distinct monotonicity violations recorded on explored edges.
pub fn check_monotonicity(graph: &ReachabilityGraph) -> Vec<MonotonicityViolation> {
    let mut seen = HashSet::new();
    graph
        .edges
        .iter()
        .flat_map(|edge| &edge.violations)
        .filter(|v| seen.insert(*v))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClockViolation {
    pub edge: usize,
    pub before: f64,
    pub after: f64,
}

/// Edges along which the information clock runs backwards, decided on
/// exact measures.
pub fn check_clock_monotone(model: &Model, graph: &ReachabilityGraph) -> Vec<ClockViolation> {
    let space = model.space();
    let mut measure_cache = HashMap::new();
    let mut measure = |id: NodeId| {
        measure_cache
            .entry(id)
            .or_insert_with(|| space.measure_exact(&graph.node(id).state.feasible_set()))
            .clone()
    };
    graph
        .edges
        .iter()
        .enumerate()
        .filter_map(|(idx, edge)| {
            let (before, after) = (measure(edge.source), measure(edge.target));
            (after > before).then(|| ClockViolation {
                edge: idx,
                before: graph.node(edge.source).state.information_content(space),
                after: graph.node(edge.target).state.information_content(space),
            })
        })
        .collect()
}
