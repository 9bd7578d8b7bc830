//! A validated model: possibility space, named sites, initial state, events.

use std::collections::HashSet;

use thiserror::Error;

use crate::event::{validate_event_static, Defect, Event, EventId};
use crate::record::{ConsistencyMode, RecordState, SiteId};
use crate::space::{PossibilitySpace, Subset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("a model needs at least one site")]
    NoSites,
    #[error("duplicate site name `{0}`")]
    DuplicateSite(String),
    #[error("duplicate event name `{0}`")]
    DuplicateEvent(String),
    #[error("initial state has {got} records, expected {expected}")]
    InitialArity { expected: usize, got: usize },
    #[error("initial record at site {0} is over the wrong number of worlds")]
    InitialUniverse(SiteId),
    #[error("event `{event}`: {defect}")]
    Event { event: String, defect: Defect },
    #[error("claim refers to unknown event index {0}")]
    ClaimEvent(usize),
}

/// A statement attached to a model that the diagnosis confirms or refutes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    /// `events[0] ⇒ events[1] ⇒ … ⇒ events[0]`, optionally every edge
    /// witnessed on one fixed observable.
    StrongCycle {
        events: Vec<EventId>,
        observable: Option<Subset>,
    },
}

#[derive(Clone, Debug)]
pub struct Model {
    space: PossibilitySpace,
    sites: Vec<String>,
    initial: RecordState,
    events: Vec<Event>,
    mode: ConsistencyMode,
    claims: Vec<Claim>,
    warnings: Vec<(EventId, Defect)>,
}

impl Model {
    pub fn new(
        space: PossibilitySpace,
        sites: Vec<String>,
        initial: Option<RecordState>,
        events: Vec<Event>,
        mode: ConsistencyMode,
    ) -> Result<Self, ModelError> {
        if sites.is_empty() {
            return Err(ModelError::NoSites);
        }
        let mut seen = HashSet::new();
        for s in &sites {
            if !seen.insert(s.as_str()) {
                return Err(ModelError::DuplicateSite(s.clone()));
            }
        }
        let initial = initial.unwrap_or_else(|| RecordState::unconstrained(&space, sites.len()));
        if initial.sites() != sites.len() {
            return Err(ModelError::InitialArity {
                expected: sites.len(),
                got: initial.sites(),
            });
        }
        if let Some(pos) = initial.records().iter().position(|r| r.universe() != space.len()) {
            return Err(ModelError::InitialUniverse(SiteId(pos)));
        }

        let mut names = HashSet::new();
        let mut warnings = Vec::new();
        for (idx, event) in events.iter().enumerate() {
            if !names.insert(event.name()) {
                return Err(ModelError::DuplicateEvent(event.name().to_string()));
            }
            for defect in validate_event_static(event, &space, sites.len()) {
                if defect.is_fatal() {
                    return Err(ModelError::Event {
                        event: event.name().to_string(),
                        defect,
                    });
                }
                warnings.push((EventId(idx), defect));
            }
        }

        Ok(Self {
            space,
            sites,
            initial,
            events,
            mode,
            claims: Vec::new(),
            warnings,
        })
    }

    pub fn with_claims(mut self, claims: Vec<Claim>) -> Result<Self, ModelError> {
        for claim in &claims {
            let Claim::StrongCycle { events, .. } = claim;
            if let Some(bad) = events.iter().find(|e| e.0 >= self.events.len()) {
                return Err(ModelError::ClaimEvent(bad.0));
            }
        }
        self.claims = claims;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: ConsistencyMode) -> Self {
        self.mode = mode;
        self
    }

    /// Same model, different starting state.
    pub fn with_initial(&self, initial: RecordState) -> Self {
        assert_eq!(initial.sites(), self.sites.len());
        Self {
            initial,
            ..self.clone()
        }
    }

    pub fn space(&self) -> &PossibilitySpace {
        &self.space
    }

    pub fn site_names(&self) -> &[String] {
        &self.sites
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn site_name(&self, site: SiteId) -> &str {
        &self.sites[site.0]
    }

    pub fn site_id(&self, name: &str) -> Option<SiteId> {
        self.sites.iter().position(|s| s == name).map(SiteId)
    }

    pub fn initial(&self) -> &RecordState {
        &self.initial
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, id: EventId) -> &Event {
        &self.events[id.0]
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.events.iter().position(|e| e.name() == name).map(EventId)
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventId> {
        (0..self.events.len()).map(EventId)
    }

    pub fn mode(&self) -> ConsistencyMode {
        self.mode
    }

    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    /// Non-fatal static defects found at construction.
    pub fn warnings(&self) -> &[(EventId, Defect)] {
        &self.warnings
    }

    /// Subset equality under the model's mode.
    pub fn same(&self, a: &Subset, b: &Subset) -> bool {
        crate::record::subsets_equiv(&self.space, self.mode, a, b)
    }

    /// Nonempty, or of positive measure, under the model's mode.
    pub fn nontrivial(&self, set: &Subset) -> bool {
        match self.mode {
            ConsistencyMode::Nonempty => !set.is_empty(),
            ConsistencyMode::PositiveMeasure => !self.space.is_null(set),
        }
    }

    pub fn is_consistent(&self, state: &RecordState) -> bool {
        state.is_consistent(&self.space, self.mode)
    }

    pub fn states_equiv(&self, a: &RecordState, b: &RecordState) -> bool {
        a.equiv(b, &self.space, self.mode)
    }

    pub fn display_state(&self, state: &RecordState) -> String {
        state.display(&self.space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EventKind;
    use std::collections::BTreeMap;

    #[test]
    fn rejects_bad_models() {
        let space = PossibilitySpace::counting(["0", "1"]).unwrap();
        assert_eq!(
            Model::new(space.clone(), vec![], None, vec![], ConsistencyMode::Nonempty).unwrap_err(),
            ModelError::NoSites
        );
        let e = Event::new(
            "e",
            [SiteId(0)],
            EventKind::Intersect(BTreeMap::from([(SiteId(0), space.omega())])),
        );
        assert_eq!(
            Model::new(
                space.clone(),
                vec!["s".into()],
                None,
                vec![e.clone(), e],
                ConsistencyMode::Nonempty
            )
            .unwrap_err(),
            ModelError::DuplicateEvent("e".into())
        );
        let leaky = Event::new(
            "leaky",
            [SiteId(0)],
            EventKind::Intersect(BTreeMap::from([(SiteId(0), space.omega()), (SiteId(1), space.omega())])),
        );
        assert!(matches!(
            Model::new(space, vec!["s".into(), "t".into()], None, vec![leaky], ConsistencyMode::Nonempty),
            Err(ModelError::Event { .. })
        ));
    }

    #[test]
    fn zero_event_model_defaults_to_unconstrained() {
        let space = PossibilitySpace::counting(["0", "1"]).unwrap();
        let m = Model::new(space.clone(), vec!["s".into()], None, vec![], ConsistencyMode::Nonempty).unwrap();
        assert_eq!(m.initial(), &RecordState::new(vec![space.omega()]));
        assert!(m.warnings().is_empty());
    }
}
