//! Distributed record states, feasible sets, consistency and the
//! information clock.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{PossibilitySpace, Subset};

/// Zero-based site position. Interfaces show sites by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteId(pub usize);

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyMode {
    /// F(R) ≠ ∅.
    #[default]
    Nonempty,
    /// μ(F(R)) > 0; equalities are taken up to null sets.
    PositiveMeasure,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordError {
    #[error("unknown site index {0}")]
    UnknownSite(usize),
}

/// One local record per site.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordState {
    records: Vec<Subset>,
}

impl RecordState {
    pub fn new(records: Vec<Subset>) -> Self {
        Self { records }
    }

    /// Every site holds Ω.
    pub fn unconstrained(space: &PossibilitySpace, sites: usize) -> Self {
        Self::new(vec![space.omega(); sites])
    }

    pub fn sites(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[Subset] {
        &self.records
    }

    pub fn get(&self, site: SiteId) -> Option<&Subset> {
        self.records.get(site.0)
    }

    pub(crate) fn set(&mut self, site: SiteId, value: Subset) {
        self.records[site.0] = value;
    }

    /// F(R) = ⋂ᵢ Rᵢ. Models always have at least one site.
    pub fn feasible_set(&self) -> Subset {
        let mut iter = self.records.iter();
        let first = iter.next().expect("record state with zero sites").clone();
        iter.fold(first, |acc, r| acc.intersection(r))
    }

    pub fn is_consistent(&self, space: &PossibilitySpace, mode: ConsistencyMode) -> bool {
        let feasible = self.feasible_set();
        match mode {
            ConsistencyMode::Nonempty => !feasible.is_empty(),
            ConsistencyMode::PositiveMeasure => !space.is_null(&feasible),
        }
    }

    /// −ln μ(F(R)), or +∞ when μ(F(R)) = 0.
    pub fn information_content(&self, space: &PossibilitySpace) -> f64 {
        let feasible = self.feasible_set();
        if space.is_null(&feasible) {
            return f64::INFINITY;
        }
        -space.measure_of(&feasible).ln()
    }

    /// Sub-vector of records on `sites`, in the order given.
    pub fn restrict(&self, sites: &[SiteId]) -> Result<Restriction, RecordError> {
        let records = sites
            .iter()
            .map(|&s| {
                self.get(s)
                    .cloned()
                    .map(|r| (s, r))
                    .ok_or(RecordError::UnknownSite(s.0))
            })
            .collect::<Result<_, _>>()?;
        Ok(Restriction { records })
    }

    /// Site-wise equality, exact or up to null sets depending on `mode`.
    pub fn equiv(&self, other: &Self, space: &PossibilitySpace, mode: ConsistencyMode) -> bool {
        self.records.len() == other.records.len()
            && self
                .records
                .iter()
                .zip(&other.records)
                .all(|(a, b)| subsets_equiv(space, mode, a, b))
    }

    pub fn display(&self, space: &PossibilitySpace) -> String {
        let parts: Vec<String> = self.records.iter().map(|r| space.format_subset(r)).collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Debug for RecordState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.records).finish()
    }
}

/// Exact equality in `Nonempty` mode, null-set equivalence otherwise.
pub fn subsets_equiv(space: &PossibilitySpace, mode: ConsistencyMode, a: &Subset, b: &Subset) -> bool {
    match mode {
        ConsistencyMode::Nonempty => a == b,
        ConsistencyMode::PositiveMeasure => space.null_equiv(a, b),
    }
}

/// A record state restricted to a subset of sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Restriction {
    records: Vec<(SiteId, Subset)>,
}

impl Restriction {
    pub fn records(&self) -> &[(SiteId, Subset)] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn equiv(&self, other: &Self, space: &PossibilitySpace, mode: ConsistencyMode) -> bool {
        self.records.len() == other.records.len()
            && self
                .records
                .iter()
                .zip(&other.records)
                .all(|((sa, a), (sb, b))| sa == sb && subsets_equiv(space, mode, a, b))
    }
}
