//! Full premise check and the resulting taxonomy verdict.

use crate::chronology::{
    check_branch_determinacy, find_strong_cycles, transitive_closure, BdViolation, Chronology, CycleReport,
};
use crate::event::{EventId, MonotonicityViolation};
use crate::influence::{build_influence_graphs, strong_influence_on, InfluenceGraph};
use crate::model::{Claim, Model};
use crate::reachability::{
    check_clock_monotone, check_diamond, check_gs, check_monotonicity, explore, ClockViolation, DiamondViolation,
    ExplorationLimits, NodeId, ReachabilityGraph,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// No strong-influence cycle.
    NoCycle,
    /// A cycle, and at least one premise fails.
    CycleExplained,
    /// A cycle while every premise checks clean over the explored region.
    TheoremViolationSuspected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NoCycle => "NO_CYCLE",
            Verdict::CycleExplained => "CYCLE_EXPLAINED",
            Verdict::TheoremViolationSuspected => "THEOREM_VIOLATION_SUSPECTED",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaxonomyReport {
    pub has_strong_cycle: bool,
    pub cycles: CycleReport,
    pub gs_violations: Vec<NodeId>,
    pub diamond_violations: Vec<DiamondViolation>,
    pub monotonicity_violations: Vec<MonotonicityViolation>,
    pub bd_violations: Vec<crate::chronology::BdViolation>,
    pub verdict: Verdict,
    pub truncated: bool,
}

impl TaxonomyReport {
    pub fn any_premise_violated(&self) -> bool {
        !(self.gs_violations.is_empty()
            && self.diamond_violations.is_empty()
            && self.monotonicity_violations.is_empty()
            && self.bd_violations.is_empty())
    }

    pub fn premises_clean(&self) -> bool {
        !self.any_premise_violated()
    }
}

fn verdict(has_cycle: bool, violated: bool) -> Verdict {
    match (has_cycle, violated) {
        (false, _) => Verdict::NoCycle,
        (true, true) => Verdict::CycleExplained,
        (true, false) => Verdict::TheoremViolationSuspected,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClaimStatus {
    Confirmed,
    Refuted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimNote {
    pub claim: usize,
    pub status: ClaimStatus,
    /// Cycle edges with no strong witness at all.
    pub missing_edges: Vec<(EventId, EventId)>,
    /// Cycle edges not witnessed on the claimed observable.
    pub unwitnessed_on_observable: Vec<(EventId, EventId)>,
}

/// Everything `diagnose` computes, kept for reporting.
#[derive(Clone, Debug)]
pub struct Diagnosis {
    pub graph: ReachabilityGraph,
    pub influence: InfluenceGraph,
    pub chronology: Chronology,
    pub clock_violations: Vec<ClockViolation>,
    pub claims: Vec<ClaimNote>,
    pub report: TaxonomyReport,
}

/// Runs every premise check, even after one fails.
pub fn diagnose(model: &Model, limits: ExplorationLimits) -> Diagnosis {
    let graph = explore(model, limits);
    let monotonicity_violations = check_monotonicity(&graph);
    let diamond_violations = check_diamond(model, &graph);
    let gs_violations = check_gs(model, &graph);
    let influence = build_influence_graphs(model, &graph);
    let cycles = find_strong_cycles(&influence);
    let bd_violations: Vec<BdViolation> = check_branch_determinacy(model, &graph, &influence);
    let chronology = transitive_closure(&influence);
    let clock_violations = check_clock_monotone(model, &graph);
    let claims = evaluate_claims(model, &graph, &influence);

    let has_strong_cycle = !cycles.is_empty();
    let mut report = TaxonomyReport {
        has_strong_cycle,
        cycles,
        gs_violations,
        diamond_violations,
        monotonicity_violations,
        bd_violations,
        verdict: Verdict::NoCycle,
        truncated: graph.truncated(),
    };
    report.verdict = verdict(has_strong_cycle, report.any_premise_violated());

    Diagnosis {
        graph,
        influence,
        chronology,
        clock_violations,
        claims,
        report,
    }
}

pub fn evaluate_claims(model: &Model, graph: &ReachabilityGraph, influence: &InfluenceGraph) -> Vec<ClaimNote> {
    model
        .claims()
        .iter()
        .enumerate()
        .map(|(idx, claim)| {
            let Claim::StrongCycle { events, observable } = claim;
            let edges: Vec<(EventId, EventId)> = crate::chronology::CycleReport::edges(events).collect();
            let missing_edges: Vec<_> = edges
                .iter()
                .copied()
                .filter(|e| !influence.strong.contains_key(e))
                .collect();
            let unwitnessed_on_observable: Vec<_> = match observable {
                Some(b) => edges
                    .iter()
                    .copied()
                    .filter(|&(e, f)| strong_influence_on(model, graph, e, f, b).is_none())
                    .collect(),
                None => Vec::new(),
            };
            let status = if events.len() >= 2 && missing_edges.is_empty() && unwitnessed_on_observable.is_empty() {
                ClaimStatus::Confirmed
            } else {
                ClaimStatus::Refuted
            };
            ClaimNote {
                claim: idx,
                status,
                missing_edges,
                unwitnessed_on_observable,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_table() {
        assert_eq!(verdict(false, false), Verdict::NoCycle);
        assert_eq!(verdict(false, true), Verdict::NoCycle);
        assert_eq!(verdict(true, true), Verdict::CycleExplained);
        assert_eq!(verdict(true, false), Verdict::TheoremViolationSuspected);
    }
}
