//! Trace-class invariance: schedules related by swaps of adjacent
//! independent events must end in the same record state and see the same
//! strong-influence edges from there.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::event::{apply_event, independent, EventId};
use crate::influence::build_influence_graphs;
use crate::model::Model;
use crate::reachability::{check_diamond, explore, explore_from, DiamondViolation, ExplorationLimits};
use crate::record::RecordState;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("schedule references unknown event `{0}`")]
    UnknownEvent(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MismatchKind {
    FinalState,
    StrongEdges,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceMismatch {
    pub schedule: Vec<EventId>,
    pub kind: MismatchKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceReport {
    pub schedule: Vec<EventId>,
    pub seed: u64,
    pub swaps: usize,
    pub final_state: RecordState,
    pub strong_edges: BTreeSet<(EventId, EventId)>,
    /// Distinct trace-class members compared against the schedule.
    pub members_checked: usize,
    pub mismatches: Vec<TraceMismatch>,
    /// Non-empty means the comparison was skipped.
    pub diamond_violations: Vec<DiamondViolation>,
    pub truncated: bool,
}

impl TraceReport {
    pub fn is_invariant(&self) -> bool {
        self.mismatches.is_empty() && self.diamond_violations.is_empty()
    }
}

pub fn resolve_schedule<S: AsRef<str>>(model: &Model, names: &[S]) -> Result<Vec<EventId>, TraceError> {
    names
        .iter()
        .map(|n| {
            let n = n.as_ref();
            model.event_id(n).ok_or_else(|| TraceError::UnknownEvent(n.to_string()))
        })
        .collect()
}

pub fn run_schedule(model: &Model, schedule: &[EventId]) -> RecordState {
    schedule
        .iter()
        .fold(model.initial().clone(), |state, &e| apply_event(model.event(e), &state).next)
}

/// Positions `k` where `schedule[k]` and `schedule[k+1]` may be swapped.
fn swappable(model: &Model, schedule: &[EventId]) -> Vec<usize> {
    schedule
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1] && independent(model.event(w[0]), model.event(w[1])))
        .map(|(k, _)| k)
        .collect()
}

/// Checks every single adjacent swap plus `swaps` seeded random swap chains.
pub fn check_trace_invariance(
    model: &Model,
    schedule: &[EventId],
    swaps: usize,
    seed: u64,
    limits: ExplorationLimits,
) -> TraceReport {
    let final_state = run_schedule(model, schedule);
    let mut report = TraceReport {
        schedule: schedule.to_vec(),
        seed,
        swaps,
        final_state: final_state.clone(),
        strong_edges: BTreeSet::new(),
        members_checked: 0,
        mismatches: Vec::new(),
        diamond_violations: Vec::new(),
        truncated: false,
    };

    let reachable = explore(model, limits);
    report.truncated |= reachable.truncated();
    report.diamond_violations = check_diamond(model, &reachable);
    if !report.diamond_violations.is_empty() {
        return report;
    }

    let edges_from = |state: &RecordState, truncated: &mut bool| {
        let graph = explore_from(model, state.clone(), limits);
        *truncated |= graph.truncated();
        build_influence_graphs(model, &graph)
            .strong
            .into_keys()
            .collect::<BTreeSet<_>>()
    };
    report.strong_edges = edges_from(&final_state, &mut report.truncated);

    let mut members: BTreeSet<Vec<EventId>> = BTreeSet::new();
    for k in swappable(model, schedule) {
        let mut member = schedule.to_vec();
        member.swap(k, k + 1);
        members.insert(member);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..swaps {
        let mut member = schedule.to_vec();
        let steps = rng.gen_range(1..=2 * schedule.len().max(1));
        for _ in 0..steps {
            let options = swappable(model, &member);
            if options.is_empty() {
                break;
            }
            let k = options[rng.gen_range(0..options.len())];
            member.swap(k, k + 1);
        }
        members.insert(member);
    }
    members.remove(schedule);

    for member in members {
        report.members_checked += 1;
        let state = run_schedule(model, &member);
        if !model.states_equiv(&state, &final_state) {
            report.mismatches.push(TraceMismatch {
                schedule: member,
                kind: MismatchKind::FinalState,
            });
            continue;
        }
        if edges_from(&state, &mut report.truncated) != report.strong_edges {
            report.mismatches.push(TraceMismatch {
                schedule: member,
                kind: MismatchKind::StrongEdges,
            });
        }
    }
    report
}
