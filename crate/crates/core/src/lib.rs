//! Finite-model checker for distributed record systems whose events only
//! tighten local records.
//!
//! Given a finite world set, named sites and events defined by guarded
//! tables or constant intersections, the crate explores every reachable
//! record state and checks the premises under which strong influence must be
//! acyclic: monotone writing, commutation of independent events, global
//! satisfiability and branch determinacy. It finds weak and strong influence
//! with replayable witnesses, builds the induced order and a linear extension,
//! tracks the information clock `-ln μ(F(R))`, and classifies any strong cycle
//! by which premise fails.

mod bitset;

pub mod chronology;
pub mod diagnose;
pub mod dot;
pub mod event;
pub mod format;
pub mod influence;
pub mod model;
pub mod random;
pub mod reachability;
pub mod record;
pub mod space;
pub mod trace;

pub use chronology::{
    check_branch_determinacy, find_strong_cycles, transitive_closure, BdViolation, Chronology, CycleReport, Polarity,
};
pub use diagnose::{diagnose, ClaimNote, ClaimStatus, Diagnosis, TaxonomyReport, Verdict};
pub use event::{
    apply_event, independent, validate_event_static, write_effect, Defect, Event, EventId, EventKind, Fired,
    MonotonicityViolation, Rule, UpdateOutcome,
};
pub use format::{model_digest, parse_model, serialize_model, ParseError};
pub use influence::{
    binary_witness, build_influence_graphs, strong_influence, strong_influence_oracle, weak_influence,
    InfluenceError, InfluenceGraph, StrongWitness, WeakWitness,
};
pub use model::{Claim, Model, ModelError};
pub use reachability::{
    check_clock_monotone, check_diamond, check_gs, check_monotonicity, explore, explore_from, ClockViolation,
    DiamondViolation, Edge, EventSet, ExplorationLimits, Node, NodeId, ReachabilityGraph,
};
pub use record::{ConsistencyMode, RecordState, Restriction, SiteId};
pub use space::{PossibilitySpace, SpaceError, Subset, Weight};
pub use trace::{check_trace_invariance, TraceError, TraceReport};
