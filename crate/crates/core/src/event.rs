//! Events as local update maps: guarded rule tables and constant
//! intersections, with write effects and support-disjointness.

use std::collections::BTreeMap;
use std::fmt;

use crate::record::{RecordState, SiteId};
use crate::space::{PossibilitySpace, Subset};

/// Position of an event in its model's declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(pub usize);

/// One case of a table event. A site missing from `guard` matches anything;
/// a supported site missing from `result` keeps its record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub guard: BTreeMap<SiteId, Subset>,
    pub result: BTreeMap<SiteId, Subset>,
}

impl Rule {
    fn matches(&self, state: &RecordState) -> bool {
        self.guard
            .iter()
            .all(|(site, expected)| state.get(*site) == Some(expected))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// First matching rule fires; no match leaves the state unchanged.
    Table(Vec<Rule>),
    /// `R_i ← R_i ∩ C_i` on every supported site.
    Intersect(BTreeMap<SiteId, Subset>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    name: String,
    support: Vec<SiteId>,
    kind: EventKind,
}

impl Event {
    pub fn new(name: impl Into<String>, support: impl IntoIterator<Item = SiteId>, kind: EventKind) -> Self {
        let mut support: Vec<SiteId> = support.into_iter().collect();
        support.sort();
        support.dedup();
        Self {
            name: name.into(),
            support,
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// S(e), ascending.
    pub fn support(&self) -> &[SiteId] {
        &self.support
    }

    pub fn kind(&self) -> &EventKind {
        &self.kind
    }

    pub fn supports(&self, site: SiteId) -> bool {
        self.support.binary_search(&site).is_ok()
    }

    /// Sites shared with `other`, ascending.
    pub fn shared_sites(&self, other: &Event) -> Vec<SiteId> {
        self.support
            .iter()
            .copied()
            .filter(|s| other.supports(*s))
            .collect()
    }
}

/// Which branch of the update map produced an outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fired {
    Rule(usize),
    NoMatch,
    Intersect,
}

/// A supported site whose record grew.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonotonicityViolation {
    pub event: String,
    pub site: SiteId,
    /// Pre-update state.
    pub state: RecordState,
    /// Worlds present after the update but not before.
    pub added: Subset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateOutcome {
    pub next: RecordState,
    pub violations: Vec<MonotonicityViolation>,
    pub fired: Fired,
}

/// Computes U_e(R). Locality holds by construction: only supported sites are
/// written. Growth on a supported site is reported, never clamped.
pub fn apply_event(event: &Event, state: &RecordState) -> UpdateOutcome {
    let mut next = state.clone();
    let fired = match &event.kind {
        EventKind::Intersect(constraints) => {
            for (&site, constraint) in constraints {
                if event.supports(site) {
                    if let Some(current) = state.get(site) {
                        next.set(site, current.intersection(constraint));
                    }
                }
            }
            Fired::Intersect
        }
        EventKind::Table(rules) => match rules.iter().position(|r| r.matches(state)) {
            Some(idx) => {
                for (&site, value) in &rules[idx].result {
                    if event.supports(site) && site.0 < state.sites() {
                        next.set(site, value.clone());
                    }
                }
                Fired::Rule(idx)
            }
            None => Fired::NoMatch,
        },
    };

    let violations = event
        .support
        .iter()
        .filter_map(|&site| {
            let (before, after) = (state.get(site)?, next.get(site)?);
            let added = after.difference(before);
            (!added.is_empty()).then(|| MonotonicityViolation {
                event: event.name.clone(),
                site,
                state: state.clone(),
                added,
            })
        })
        .collect();

    UpdateOutcome {
        next,
        violations,
        fired,
    }
}

/// Δ_i(e;R) = R_i \ (U_e(R))_i, and ∅ off the support. `None` for an
/// unknown site.
pub fn write_effect(event: &Event, state: &RecordState, site: SiteId) -> Option<Subset> {
    let before = state.get(site)?;
    if !event.supports(site) {
        return Some(Subset::empty(before.universe()));
    }
    let after = apply_event(event, state).next;
    Some(before.difference(after.get(site)?))
}

/// e ⊥ f iff S(e) ∩ S(f) = ∅.
pub fn independent(e: &Event, f: &Event) -> bool {
    e.shared_sites(f).is_empty()
}

/// Static problems with an event definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    /// A site index at or beyond the model's site count.
    SiteOutOfRange { rule: Option<usize>, site: usize },
    /// A rule or constraint mentions a site outside the support.
    Locality { rule: Option<usize>, site: SiteId },
    /// An intersect event lacks a constraint for a supported site.
    MissingConstraint { site: SiteId },
    /// A subset built over a different number of worlds.
    UniverseMismatch { rule: Option<usize>, site: SiteId },
    /// Every state matched by this rule is matched by an earlier one.
    ShadowedRule { rule: usize, by: usize },
    /// Guard and result are both exact at this site and the result is not
    /// contained in the guard, so the rule grows the record whenever it fires.
    StaticMonotonicity { rule: usize, site: SiteId },
}

impl Defect {
    /// Fatal defects make a model unloadable; the rest are warnings.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Defect::ShadowedRule { .. } | Defect::StaticMonotonicity { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Defect::SiteOutOfRange { .. } => "site out of range",
            Defect::Locality { .. } => "locality",
            Defect::MissingConstraint { .. } => "missing constraint",
            Defect::UniverseMismatch { .. } => "universe mismatch",
            Defect::ShadowedRule { .. } => "shadowed rule",
            Defect::StaticMonotonicity { .. } => "static monotonicity",
        }
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = |rule: &Option<usize>| match rule {
            Some(r) => format!("rule {r}"),
            None => "constraint".to_string(),
        };
        match self {
            Defect::SiteOutOfRange { rule, site } => {
                write!(f, "{}: {} mentions site index {}", self.kind(), at(rule), site + 1)
            }
            Defect::Locality { rule, site } => {
                write!(f, "{}: {} mentions unsupported site {site}", self.kind(), at(rule))
            }
            Defect::MissingConstraint { site } => {
                write!(f, "{}: no constraint for supported site {site}", self.kind())
            }
            Defect::UniverseMismatch { rule, site } => {
                write!(f, "{}: {} at site {site} has the wrong world count", self.kind(), at(rule))
            }
            Defect::ShadowedRule { rule, by } => {
                write!(f, "{}: rule {rule} can never fire after rule {by}", self.kind())
            }
            Defect::StaticMonotonicity { rule, site } => {
                write!(f, "{}: rule {rule} result at site {site} is not within its guard", self.kind())
            }
        }
    }
}

/// Checks an event against a space and site count without running it.
pub fn validate_event_static(event: &Event, space: &PossibilitySpace, sites: usize) -> Vec<Defect> {
    let mut defects = Vec::new();
    for site in &event.support {
        if site.0 >= sites {
            defects.push(Defect::SiteOutOfRange { rule: None, site: site.0 });
        }
    }

    let check_site = |defects: &mut Vec<Defect>, rule: Option<usize>, site: SiteId, set: &Subset| {
        if site.0 >= sites {
            defects.push(Defect::SiteOutOfRange { rule, site: site.0 });
        } else if !event.supports(site) {
            defects.push(Defect::Locality { rule, site });
        }
        if set.universe() != space.len() {
            defects.push(Defect::UniverseMismatch { rule, site });
        }
    };

    match &event.kind {
        EventKind::Intersect(constraints) => {
            for (&site, set) in constraints {
                check_site(&mut defects, None, site, set);
            }
            for &site in &event.support {
                if !constraints.contains_key(&site) {
                    defects.push(Defect::MissingConstraint { site });
                }
            }
        }
        EventKind::Table(rules) => {
            for (idx, rule) in rules.iter().enumerate() {
                for (&site, set) in rule.guard.iter().chain(&rule.result) {
                    check_site(&mut defects, Some(idx), site, set);
                }
                if let Some(by) = rules[..idx]
                    .iter()
                    .position(|earlier| guard_subsumes(&earlier.guard, &rule.guard))
                {
                    defects.push(Defect::ShadowedRule { rule: idx, by });
                }
                for (site, result) in &rule.result {
                    if let Some(guard) = rule.guard.get(site) {
                        if guard.universe() == result.universe() && !result.is_subset(guard) {
                            defects.push(Defect::StaticMonotonicity { rule: idx, site: *site });
                        }
                    }
                }
            }
        }
    }
    defects
}

/// True when every state matching `later` also matches `earlier`.
fn guard_subsumes(earlier: &BTreeMap<SiteId, Subset>, later: &BTreeMap<SiteId, Subset>) -> bool {
    earlier.iter().all(|(site, set)| later.get(site) == Some(set))
}
