//! Finite possibility spaces, subsets of worlds, and the weight measure.
//!
//! The event algebra is the full power set of a finite world list, so every
//! set operation is exact. Weights are exact nonnegative rationals; zero and
//! positivity tests never touch arithmetic because a set is null exactly
//! when it contains no positive-weight world.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::bitset::BitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("possibility space has no worlds")]
    NoWorlds,
    #[error("world label is empty")]
    EmptyLabel,
    #[error("duplicate world label `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("total weight must be positive")]
    ZeroTotal,
    #[error("invalid weight `{0}`")]
    InvalidWeight(String),
    #[error("negative weight `{0}`")]
    NegativeWeight(String),
}

/// A set of worlds, stored as a characteristic vector over the world order
/// of its [`PossibilitySpace`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(BitSet);

impl Subset {
    pub fn empty(universe: usize) -> Self {
        Self(BitSet::empty(universe))
    }

    pub fn full(universe: usize) -> Self {
        Self(BitSet::full(universe))
    }

    /// Builds a subset from world indices; panics if an index is outside the universe.
    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = BitSet::empty(universe);
        for i in indices {
            bits.insert(i);
        }
        Self(bits)
    }

    /// Number of worlds in the underlying space.
    pub fn universe(&self) -> usize {
        self.0.universe()
    }

    pub fn contains(&self, world: usize) -> bool {
        self.0.contains(world)
    }

    pub fn insert(&mut self, world: usize) -> bool {
        self.0.insert(world)
    }

    pub fn remove(&mut self, world: usize) -> bool {
        self.0.remove(world)
    }

    pub fn len(&self) -> usize {
        self.0.count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(self.0.union(&other.0))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0.intersection(&other.0))
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.0.difference(&other.0))
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        Self(self.0.symmetric_difference(&other.0))
    }

    pub fn complement(&self) -> Self {
        Self(self.0.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// World indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An exact nonnegative rational weight.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(BigRational);

impl Weight {
    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self, SpaceError> {
        if denom == 0 {
            return Err(SpaceError::InvalidWeight(format!("{numer}/{denom}")));
        }
        let r = BigRational::new(numer.into(), denom.into());
        if r.is_negative() {
            return Err(SpaceError::NegativeWeight(format!("{numer}/{denom}")));
        }
        Ok(Self(r))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl FromStr for Weight {
    type Err = SpaceError;

    /// Accepts decimal literals (`0.25`, `3`, `1.5e-2`) and fractions (`1/3`).
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        let invalid = || SpaceError::InvalidWeight(text.to_string());
        let value = if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| invalid())?;
            let d: BigInt = d.trim().parse().map_err(|_| invalid())?;
            if d.is_zero() {
                return Err(invalid());
            }
            BigRational::new(n, d)
        } else {
            parse_decimal(s).ok_or_else(invalid)?
        };
        if value.is_negative() {
            return Err(SpaceError::NegativeWeight(text.to_string()));
        }
        Ok(Self(value))
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

impl fmt::Display for Weight {
    /// Integers print bare, terminating decimals print as decimals, anything
    /// else prints as `p/q`. All three forms parse back to the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = self.0.numer();
        let denom = self.0.denom();
        if denom.is_one() {
            return write!(f, "{numer}");
        }
        let (mut twos, mut fives, mut rest) = (0usize, 0usize, denom.clone());
        let (two, five) = (BigInt::from(2), BigInt::from(5));
        while (&rest % &two).is_zero() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if !rest.is_one() {
            return write!(f, "{numer}/{denom}");
        }
        let places = twos.max(fives);
        let scaled = numer * num_traits::pow(BigInt::from(10), places) / denom;
        let digits = scaled.to_string();
        let digits = format!("{digits:0>width$}", width = places + 1);
        let (int_part, frac_part) = digits.split_at(digits.len() - places);
        write!(f, "{int_part}.{frac_part}")
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Finite Ω with its power-set algebra and a weight per world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PossibilitySpace {
    worlds: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<Weight>,
    positive: Subset,
    counting: bool,
}

impl PossibilitySpace {
    /// Space with counting measure (weight 1 per world).
    pub fn counting<S: Into<String>>(worlds: impl IntoIterator<Item = S>) -> Result<Self, SpaceError> {
        let worlds: Vec<String> = worlds.into_iter().map(Into::into).collect();
        let weights = vec![Weight::one(); worlds.len()];
        Self::weighted(worlds, weights)
    }

    pub fn weighted(worlds: Vec<String>, weights: Vec<Weight>) -> Result<Self, SpaceError> {
        if worlds.is_empty() {
            return Err(SpaceError::NoWorlds);
        }
        if weights.len() != worlds.len() {
            return Err(SpaceError::WeightCount {
                expected: worlds.len(),
                got: weights.len(),
            });
        }
        let mut index = HashMap::with_capacity(worlds.len());
        for (i, w) in worlds.iter().enumerate() {
            if w.is_empty() {
                return Err(SpaceError::EmptyLabel);
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(SpaceError::DuplicateWorld(w.clone()));
            }
        }
        let positive = Subset::from_indices(
            worlds.len(),
            weights.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(|(i, _)| i),
        );
        if positive.is_empty() {
            return Err(SpaceError::ZeroTotal);
        }
        let counting = weights.iter().all(|w| w.as_rational().is_one());
        Ok(Self {
            worlds,
            index,
            weights,
            positive,
            counting,
        })
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn is_counting(&self) -> bool {
        self.counting
    }

    pub fn world_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn empty(&self) -> Subset {
        Subset::empty(self.len())
    }

    pub fn omega(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset<S: AsRef<str>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Subset, SpaceError> {
        let mut set = self.empty();
        for label in labels {
            let label = label.as_ref();
            let i = self
                .world_index(label)
                .ok_or_else(|| SpaceError::UnknownWorld(label.to_string()))?;
            set.insert(i);
        }
        Ok(set)
    }

    /// Member labels in world order.
    pub fn labels<'a>(&'a self, set: &'a Subset) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().map(|i| self.worlds[i].as_str())
    }

    pub fn format_subset(&self, set: &Subset) -> String {
        let labels: Vec<&str> = self.labels(set).collect();
        format!("{{{}}}", labels.join(","))
    }

    /// Exact μ(A).
    pub fn measure_exact(&self, set: &Subset) -> BigRational {
        if self.counting {
            return BigRational::from_integer(set.len().into());
        }
        set.iter()
            .map(|i| self.weights[i].as_rational())
            .fold(BigRational::zero(), |acc, w| acc + w)
    }

    /// μ(A) as a float.
    pub fn measure_of(&self, set: &Subset) -> f64 {
        if self.counting {
            return set.len() as f64;
        }
        self.measure_exact(set).to_f64().unwrap_or(f64::INFINITY)
    }

    /// μ(A) = 0, decided without arithmetic.
    pub fn is_null(&self, set: &Subset) -> bool {
        set.is_disjoint(&self.positive)
    }

    /// μ(A △ B) = 0.
    pub fn null_equiv(&self, a: &Subset, b: &Subset) -> bool {
        self.is_null(&a.symmetric_difference(b))
    }

    /// Worlds carrying positive weight.
    pub fn support(&self) -> &Subset {
        &self.positive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn measure_examples() {
        let space = PossibilitySpace::counting(["w0", "w1"]).unwrap();
        assert_eq!(space.measure_of(&space.empty()), 0.0);
        assert_eq!(space.measure_of(&space.omega()), 2.0);

        let space =
            PossibilitySpace::weighted(vec!["w0".into(), "w1".into()], vec![w("0.25"), w("0.75")])
                .unwrap();
        assert_eq!(space.measure_of(&space.subset(["w0"]).unwrap()), 0.25);
    }

    #[test]
    fn null_equiv_examples() {
        let counting = PossibilitySpace::counting(["w0", "w1"]).unwrap();
        let a = counting.subset(["w0"]).unwrap();
        let b = counting.subset(["w1"]).unwrap();
        assert!(counting.null_equiv(&a, &a));
        assert!(!counting.null_equiv(&a, &b));

        let weighted =
            PossibilitySpace::weighted(vec!["w0".into(), "w1".into()], vec![w("0"), w("1")]).unwrap();
        let a = weighted.subset(["w0", "w1"]).unwrap();
        let b = weighted.subset(["w1"]).unwrap();
        assert!(weighted.null_equiv(&a, &b));
    }

    #[test]
    fn space_invariants() {
        assert_eq!(
            PossibilitySpace::counting(Vec::<String>::new()),
            Err(SpaceError::NoWorlds)
        );
        assert_eq!(
            PossibilitySpace::counting(["a", "a"]),
            Err(SpaceError::DuplicateWorld("a".into()))
        );
        assert_eq!(
            PossibilitySpace::weighted(vec!["a".into()], vec![w("0")]),
            Err(SpaceError::ZeroTotal)
        );
        assert!(matches!("-1".parse::<Weight>(), Err(SpaceError::NegativeWeight(_))));
        assert!(matches!("abc".parse::<Weight>(), Err(SpaceError::InvalidWeight(_))));
        assert!(matches!("1/0".parse::<Weight>(), Err(SpaceError::InvalidWeight(_))));
    }

    #[test]
    fn decimal_weights_are_exact() {
        let sum = w("0.1").as_rational() + w("0.2").as_rational();
        assert_eq!(&sum, w("0.3").as_rational());
        assert_eq!(w("1.5e-2"), w("3/200"));
        assert_eq!(w("12E1"), w("120"));
        assert_eq!(w(".5"), w("1/2"));
    }

    #[test]
    fn weight_display_round_trips() {
        for text in ["0", "3", "0.25", "0.015", "1/3", "2/7", "120"] {
            let parsed = w(text);
            assert_eq!(w(&parsed.to_string()), parsed, "{text}");
        }
        assert_eq!(w("1/4").to_string(), "0.25");
        assert_eq!(w("1/3").to_string(), "1/3");
        assert_eq!(w("0.015").to_string(), "0.015");
    }
}
