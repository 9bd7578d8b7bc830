//! Weak and strong operational influence between events, with witnesses
//! that can be replayed from the node they name.
//!
//! Strong influence asks for an observable `B` on which the post-`f` records
//! with and without a prior `e` are exclusive and both nontrivial. Writing
//! `P⁰ = (U_f(R))_i` and `P¹ = (U_f(U_e(R)))_i`, such a `B` exists exactly
//! when `P⁰ \ P¹` and `P¹ \ P⁰` are both nontrivial, and then `P⁰ △ P¹` is
//! one. [`strong_influence`] uses that reduction; [`strong_influence_oracle`]
//! enumerates every `B` and exists to check it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::event::{apply_event, write_effect, EventId};
use crate::model::Model;
use crate::reachability::{NodeId, ReachabilityGraph};
use crate::record::{RecordState, SiteId};
use crate::space::Subset;

/// Largest world count the brute-force oracle accepts.
pub const ORACLE_MAX_WORLDS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InfluenceError {
    #[error("binary witness for {e} -> {f} separates nothing: the post-f records agree on B")]
    Inseparable { e: String, f: String },
    #[error("oracle refuses {0} worlds (limit {ORACLE_MAX_WORLDS})")]
    OracleTooLarge(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakWitness {
    pub e: EventId,
    pub f: EventId,
    pub node: NodeId,
    pub state: RecordState,
    pub site: SiteId,
    /// Δ_i(f; R)
    pub delta_without: Subset,
    /// Δ_i(f; U_e(R))
    pub delta_with: Subset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongWitness {
    pub e: EventId,
    pub f: EventId,
    pub node: NodeId,
    pub state: RecordState,
    pub site: SiteId,
    pub observable: Subset,
    /// (U_f(R))_i ∩ B
    pub branch0: Subset,
    /// (U_f(U_e(R)))_i ∩ B
    pub branch1: Subset,
}

/// Post-`f` records at `site` without and with a prior `e`.
fn post_f_pair(model: &Model, e: EventId, f: EventId, state: &RecordState, site: SiteId) -> (Subset, Subset) {
    let (ev, fv) = (model.event(e), model.event(f));
    let without = apply_event(fv, state).next;
    let with = apply_event(fv, &apply_event(ev, state).next).next;
    (
        without.get(site).expect("site in range").clone(),
        with.get(site).expect("site in range").clone(),
    )
}

/// Nodes with a first-seen state, paired with the sites `e` and `f` share.
fn candidates<'g>(
    model: &Model,
    graph: &'g ReachabilityGraph,
    e: EventId,
    f: EventId,
) -> impl Iterator<Item = (NodeId, &'g RecordState, SiteId)> + 'g {
    let shared = model.event(e).shared_sites(model.event(f));
    let nodes = if shared.is_empty() {
        Vec::new()
    } else {
        graph.distinct_state_nodes()
    };
    nodes.into_iter().flat_map(move |node| {
        let state = &graph.node(node).state;
        shared.clone().into_iter().map(move |site| (node, state, site))
    })
}

/// First `(R, i)` in node then site order at which running `e` first changes
/// what `f` removes at a shared site `i`.
pub fn weak_influence(model: &Model, graph: &ReachabilityGraph, e: EventId, f: EventId) -> Option<WeakWitness> {
    let (ev, fv) = (model.event(e), model.event(f));
    candidates(model, graph, e, f).find_map(|(node, state, site)| {
        let delta_without = write_effect(fv, state, site)?;
        let after_e = apply_event(ev, state).next;
        let delta_with = write_effect(fv, &after_e, site)?;
        let differs = model.nontrivial(&delta_without.symmetric_difference(&delta_with));
        differs.then(|| WeakWitness {
            e,
            f,
            node,
            state: state.clone(),
            site,
            delta_without,
            delta_with,
        })
    })
}

/// B = Δ_with △ Δ_without, returned only after checking that the post-`f`
/// records restricted to B differ nontrivially.
pub fn binary_witness(model: &Model, witness: &WeakWitness) -> Result<Subset, InfluenceError> {
    let observable = witness.delta_with.symmetric_difference(&witness.delta_without);
    let (p0, p1) = post_f_pair(model, witness.e, witness.f, &witness.state, witness.site);
    let separated = p0
        .intersection(&observable)
        .symmetric_difference(&p1.intersection(&observable));
    if model.nontrivial(&separated) {
        Ok(observable)
    } else {
        Err(InfluenceError::Inseparable {
            e: model.event(witness.e).name().to_string(),
            f: model.event(witness.f).name().to_string(),
        })
    }
}

fn exclusive_on(model: &Model, p0: &Subset, p1: &Subset, observable: &Subset) -> Option<(Subset, Subset)> {
    let branch0 = p0.intersection(observable);
    let branch1 = p1.intersection(observable);
    let overlap = branch0.intersection(&branch1);
    let exclusive = match model.mode() {
        crate::record::ConsistencyMode::Nonempty => overlap.is_empty(),
        crate::record::ConsistencyMode::PositiveMeasure => model.space().is_null(&overlap),
    };
    (exclusive && model.nontrivial(&branch0) && model.nontrivial(&branch1)).then_some((branch0, branch1))
}

/// First witness of `e ⇒ f`, using the canonical observable `P⁰ △ P¹`.
pub fn strong_influence(model: &Model, graph: &ReachabilityGraph, e: EventId, f: EventId) -> Option<StrongWitness> {
    candidates(model, graph, e, f).find_map(|(node, state, site)| {
        let (p0, p1) = post_f_pair(model, e, f, state, site);
        if !(model.nontrivial(&p0.difference(&p1)) && model.nontrivial(&p1.difference(&p0))) {
            return None;
        }
        let observable = p0.symmetric_difference(&p1);
        let branch0 = p0.intersection(&observable);
        let branch1 = p1.intersection(&observable);
        Some(StrongWitness {
            e,
            f,
            node,
            state: state.clone(),
            site,
            observable,
            branch0,
            branch1,
        })
    })
}

/// Literal search over every observable `B ⊆ Ω` at every candidate `(R, i)`.
pub fn strong_influence_oracle(
    model: &Model,
    graph: &ReachabilityGraph,
    e: EventId,
    f: EventId,
) -> Result<Option<StrongWitness>, InfluenceError> {
    let worlds = model.space().len();
    if worlds > ORACLE_MAX_WORLDS {
        return Err(InfluenceError::OracleTooLarge(worlds));
    }
    for (node, state, site) in candidates(model, graph, e, f) {
        let (p0, p1) = post_f_pair(model, e, f, state, site);
        for mask in 0u32..(1 << worlds) {
            let observable = Subset::from_indices(worlds, (0..worlds).filter(|i| mask & (1 << i) != 0));
            if let Some((branch0, branch1)) = exclusive_on(model, &p0, &p1, &observable) {
                return Ok(Some(StrongWitness {
                    e,
                    f,
                    node,
                    state: state.clone(),
                    site,
                    observable,
                    branch0,
                    branch1,
                }));
            }
        }
    }
    Ok(None)
}

/// First witness of `e ⇒ f` on a fixed observable.
pub fn strong_influence_on(
    model: &Model,
    graph: &ReachabilityGraph,
    e: EventId,
    f: EventId,
    observable: &Subset,
) -> Option<StrongWitness> {
    candidates(model, graph, e, f).find_map(|(node, state, site)| {
        let (p0, p1) = post_f_pair(model, e, f, state, site);
        exclusive_on(model, &p0, &p1, observable).map(|(branch0, branch1)| StrongWitness {
            e,
            f,
            node,
            state: state.clone(),
            site,
            observable: observable.clone(),
            branch0,
            branch1,
        })
    })
}

/// Re-derives a strong witness from its node state and checks exclusivity
/// and nontriviality from scratch.
pub fn replay_strong(model: &Model, w: &StrongWitness) -> bool {
    if !model.event(w.e).supports(w.site) || !model.event(w.f).supports(w.site) {
        return false;
    }
    let (p0, p1) = post_f_pair(model, w.e, w.f, &w.state, w.site);
    match exclusive_on(model, &p0, &p1, &w.observable) {
        Some((b0, b1)) => b0 == w.branch0 && b1 == w.branch1,
        None => false,
    }
}

/// All weak and strong edges between distinct events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfluenceGraph {
    pub event_names: Vec<String>,
    pub weak: BTreeMap<(EventId, EventId), WeakWitness>,
    pub strong: BTreeMap<(EventId, EventId), StrongWitness>,
}

impl InfluenceGraph {
    pub fn event_count(&self) -> usize {
        self.event_names.len()
    }

    pub fn strong_edges(&self) -> Vec<(EventId, EventId)> {
        self.strong.keys().copied().collect()
    }

    pub fn weak_edges(&self) -> Vec<(EventId, EventId)> {
        self.weak.keys().copied().collect()
    }
}

pub fn build_influence_graphs(model: &Model, graph: &ReachabilityGraph) -> InfluenceGraph {
    let mut weak = BTreeMap::new();
    let mut strong = BTreeMap::new();
    for e in model.event_ids() {
        for f in model.event_ids() {
            if e == f {
                continue;
            }
            if let Some(w) = weak_influence(model, graph, e, f) {
                weak.insert((e, f), w);
            }
            if let Some(w) = strong_influence(model, graph, e, f) {
                strong.insert((e, f), w);
            }
        }
    }
    InfluenceGraph {
        event_names: model.events().iter().map(|e| e.name().to_string()).collect(),
        weak,
        strong,
    }
}
