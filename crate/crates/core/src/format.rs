//! JSON model files.
//!
//! ```json
//! {
//!   "worlds": ["0", "1"],
//!   "measure": {"0": 1, "1": "1/3"},
//!   "sites": ["s"],
//!   "initial": {"s": ["0", "1"]},
//!   "consistency_mode": "nonempty",
//!   "events": [
//!     {"kind": "table", "name": "a", "support": ["s"],
//!      "rules": [{"guard": {"s": ["0", "1"]}, "result": {"s": ["0"]}}]},
//!     {"kind": "intersect", "name": "e", "support": ["s"], "constraints": {"s": ["0"]}}
//!   ],
//!   "claims": [{"kind": "strong_cycle", "events": ["a", "e"], "observable": ["0"]}]
//! }
//! ```
//!
//! Subsets are lists of world labels; serialization sorts them in world order.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::event::{Event, EventKind, Rule};
use crate::model::{Claim, Model, ModelError};
use crate::record::{ConsistencyMode, RecordState, SiteId};
use crate::space::{PossibilitySpace, SpaceError, Subset, Weight};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl ParseError {
    fn at(path: impl Into<String>, message: impl ToString) -> Self {
        ParseError::Invalid {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<BTreeMap<String, Value>>,
    pub sites: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub consistency_mode: ConsistencyMode,
    pub events: Vec<EventSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<ClaimSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventSpec {
    Table {
        name: String,
        support: Vec<String>,
        rules: Vec<RuleSpec>,
    },
    Intersect {
        name: String,
        support: Vec<String>,
        constraints: BTreeMap<String, Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    #[serde(default)]
    pub guard: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub result: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClaimSpec {
    StrongCycle {
        events: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observable: Option<Vec<String>>,
    },
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build_model(&file)
}

fn weight_from_value(value: &Value) -> Result<Weight, SpaceError> {
    match value {
        Value::Number(n) => Weight::from_str(&n.to_string()),
        Value::String(s) => Weight::from_str(s),
        other => Err(SpaceError::InvalidWeight(other.to_string())),
    }
}

fn weight_to_value(weight: &Weight) -> Value {
    let text = weight.to_string();
    match serde_json::Number::from_str(&text) {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(text),
    }
}

pub fn build_model(file: &ModelFile) -> Result<Model, ParseError> {
    if file.worlds.is_empty() {
        return Err(ParseError::at("worlds", SpaceError::NoWorlds));
    }
    let weights = match &file.measure {
        None => vec![Weight::one(); file.worlds.len()],
        Some(map) => {
            for label in map.keys() {
                if !file.worlds.contains(label) {
                    return Err(ParseError::at(
                        format!("measure.{label}"),
                        SpaceError::UnknownWorld(label.clone()),
                    ));
                }
            }
            file.worlds
                .iter()
                .map(|w| match map.get(w) {
                    Some(v) => weight_from_value(v).map_err(|e| ParseError::at(format!("measure.{w}"), e)),
                    None => Err(ParseError::at("measure", format!("no weight for world `{w}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let space = PossibilitySpace::weighted(file.worlds.clone(), weights).map_err(|e| ParseError::at("worlds", e))?;

    let site_id = |name: &str, path: &str| -> Result<SiteId, ParseError> {
        file.sites
            .iter()
            .position(|s| s == name)
            .map(SiteId)
            .ok_or_else(|| ParseError::at(path, format!("undeclared site `{name}`")))
    };
    let subset = |labels: &[String], path: &str| -> Result<Subset, ParseError> {
        space.subset(labels).map_err(|e| ParseError::at(path, e))
    };
    let site_map = |map: &BTreeMap<String, Vec<String>>, path: &str| -> Result<BTreeMap<SiteId, Subset>, ParseError> {
        map.iter()
            .map(|(site, labels)| {
                let here = format!("{path}.{site}");
                Ok((site_id(site, &here)?, subset(labels, &here)?))
            })
            .collect()
    };

    let initial = match &file.initial {
        None => None,
        Some(map) => {
            let given = site_map(map, "initial")?;
            let records = (0..file.sites.len())
                .map(|i| given.get(&SiteId(i)).cloned().unwrap_or_else(|| space.omega()))
                .collect();
            Some(RecordState::new(records))
        }
    };

    let mut events = Vec::with_capacity(file.events.len());
    for (idx, spec) in file.events.iter().enumerate() {
        let base = format!("events[{idx}]");
        let (name, support) = match spec {
            EventSpec::Table { name, support, .. } | EventSpec::Intersect { name, support, .. } => (name, support),
        };
        let support = support
            .iter()
            .map(|s| site_id(s, &format!("{base}.support")))
            .collect::<Result<Vec<_>, _>>()?;
        let kind = match spec {
            EventSpec::Intersect { constraints, .. } => {
                EventKind::Intersect(site_map(constraints, &format!("{base}.constraints"))?)
            }
            EventSpec::Table { rules, .. } => EventKind::Table(
                rules
                    .iter()
                    .enumerate()
                    .map(|(r, rule)| {
                        Ok(Rule {
                            guard: site_map(&rule.guard, &format!("{base}.rules[{r}].guard"))?,
                            result: site_map(&rule.result, &format!("{base}.rules[{r}].result"))?,
                        })
                    })
                    .collect::<Result<Vec<_>, ParseError>>()?,
            ),
        };
        events.push(Event::new(name.clone(), support, kind));
    }

    let model = Model::new(space.clone(), file.sites.clone(), initial, events, file.consistency_mode)
        .map_err(|e| model_error_path(&e, file))?;

    let claims = file
        .claims
        .iter()
        .enumerate()
        .map(|(idx, spec)| {
            let ClaimSpec::StrongCycle { events, observable } = spec;
            let base = format!("claims[{idx}]");
            let events = events
                .iter()
                .map(|n| {
                    model
                        .event_id(n)
                        .ok_or_else(|| ParseError::at(format!("{base}.events"), format!("unknown event `{n}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let observable = observable
                .as_ref()
                .map(|labels| subset(labels, &format!("{base}.observable")))
                .transpose()?;
            Ok(Claim::StrongCycle { events, observable })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    model.with_claims(claims).map_err(|e| ParseError::at("claims", e))
}

fn model_error_path(err: &ModelError, file: &ModelFile) -> ParseError {
    let path = match err {
        ModelError::NoSites | ModelError::DuplicateSite(_) => "sites".to_string(),
        ModelError::InitialArity { .. } | ModelError::InitialUniverse(_) => "initial".to_string(),
        ModelError::DuplicateEvent(_) | ModelError::ClaimEvent(_) => "events".to_string(),
        ModelError::Event { event, .. } => file
            .events
            .iter()
            .position(|e| match e {
                EventSpec::Table { name, .. } | EventSpec::Intersect { name, .. } => name == event,
            })
            .map(|i| format!("events[{i}]"))
            .unwrap_or_else(|| "events".to_string()),
    };
    ParseError::at(path, err)
}

fn labels(space: &PossibilitySpace, set: &Subset) -> Vec<String> {
    space.labels(set).map(str::to_string).collect()
}

/// Inverse of [`build_model`].
pub fn to_model_file(model: &Model) -> ModelFile {
    let space = model.space();
    let site_map = |map: &BTreeMap<SiteId, Subset>| -> BTreeMap<String, Vec<String>> {
        map.iter()
            .map(|(s, set)| (model.site_name(*s).to_string(), labels(space, set)))
            .collect()
    };
    let measure = (!space.is_counting()).then(|| {
        space
            .worlds()
            .iter()
            .zip(space.weights())
            .map(|(w, weight)| (w.clone(), weight_to_value(weight)))
            .collect()
    });
    let initial = (model.initial() != &RecordState::unconstrained(space, model.site_count())).then(|| {
        model
            .initial()
            .records()
            .iter()
            .enumerate()
            .map(|(i, r)| (model.site_names()[i].clone(), labels(space, r)))
            .collect()
    });
    let events = model
        .events()
        .iter()
        .map(|e| {
            let name = e.name().to_string();
            let support = e.support().iter().map(|s| model.site_name(*s).to_string()).collect();
            match e.kind() {
                EventKind::Intersect(c) => EventSpec::Intersect {
                    name,
                    support,
                    constraints: site_map(c),
                },
                EventKind::Table(rules) => EventSpec::Table {
                    name,
                    support,
                    rules: rules
                        .iter()
                        .map(|r| RuleSpec {
                            guard: site_map(&r.guard),
                            result: site_map(&r.result),
                        })
                        .collect(),
                },
            }
        })
        .collect();
    let claims = model
        .claims()
        .iter()
        .map(|c| {
            let Claim::StrongCycle { events, observable } = c;
            ClaimSpec::StrongCycle {
                events: events.iter().map(|e| model.event(*e).name().to_string()).collect(),
                observable: observable.as_ref().map(|b| labels(space, b)),
            }
        })
        .collect();
    ModelFile {
        worlds: space.worlds().to_vec(),
        measure,
        sites: model.site_names().to_vec(),
        initial,
        consistency_mode: model.mode(),
        events,
        claims,
    }
}

pub fn serialize_model(model: &Model) -> String {
    serde_json::to_string_pretty(&to_model_file(model)).expect("model files always serialize")
}

/// SHA-256 of the canonical compact serialization.
pub fn model_digest(model: &Model) -> String {
    let canonical = serde_json::to_string(&to_model_file(model)).expect("model files always serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}
