//! Random small models for property checks.
//!
//! Guards and results are drawn from a small per-model pool of subsets so
//! that table guards actually match reachable records. Most table results are
//! chosen inside their guard, which keeps a good share of models monotone;
//! the rest are arbitrary pool members.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::event::{Event, EventKind, Rule};
use crate::model::Model;
use crate::record::{ConsistencyMode, RecordState, SiteId};
use crate::space::{PossibilitySpace, Subset, Weight};

#[derive(Clone, Copy, Debug)]
pub struct RandomModelConfig {
    pub max_worlds: usize,
    pub max_sites: usize,
    pub max_events: usize,
    pub max_rules: usize,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        Self {
            max_worlds: 8,
            max_sites: 3,
            max_events: 4,
            max_rules: 3,
        }
    }
}

fn random_subset(rng: &mut impl Rng, universe: usize, density: f64) -> Subset {
    Subset::from_indices(universe, (0..universe).filter(|_| rng.gen_bool(density)))
}

fn random_subset_of(rng: &mut impl Rng, of: &Subset) -> Subset {
    Subset::from_indices(of.universe(), of.iter().filter(|_| rng.gen_bool(0.6)))
}

pub fn random_model(rng: &mut impl Rng, config: &RandomModelConfig) -> Model {
    let worlds = rng.gen_range(1..=config.max_worlds.max(1));
    let labels: Vec<String> = (0..worlds).map(|i| format!("w{i}")).collect();

    let (space, mode) = if rng.gen_bool(0.7) {
        (PossibilitySpace::counting(labels).expect("valid labels"), ConsistencyMode::Nonempty)
    } else {
        let choices = [(0, 1), (1, 2), (1, 1), (3, 4), (2, 1)];
        let mut weights: Vec<Weight> = (0..worlds)
            .map(|_| {
                let (n, d) = choices[rng.gen_range(0..choices.len())];
                Weight::from_ratio(n, d).expect("nonnegative")
            })
            .collect();
        if weights.iter().all(Weight::is_zero) {
            weights[0] = Weight::one();
        }
        let mode = if rng.gen_bool(0.5) {
            ConsistencyMode::PositiveMeasure
        } else {
            ConsistencyMode::Nonempty
        };
        (PossibilitySpace::weighted(labels, weights).expect("positive total"), mode)
    };

    let sites = rng.gen_range(1..=config.max_sites.max(1));
    let site_names: Vec<String> = (0..sites).map(|i| format!("s{i}")).collect();

    let mut pool = vec![space.omega()];
    for _ in 0..rng.gen_range(2..=4) {
        let density = rng.gen_range(0.3..0.8);
        pool.push(random_subset(rng, worlds, density));
    }
    let initial = if rng.gen_bool(0.8) {
        RecordState::unconstrained(&space, sites)
    } else {
        RecordState::new((0..sites).map(|_| pool.choose(rng).expect("pool").clone()).collect())
    };
    for r in initial.records() {
        if !pool.contains(r) {
            pool.push(r.clone());
        }
    }

    let event_count = rng.gen_range(1..=config.max_events.max(1));
    let mut events = Vec::with_capacity(event_count);
    for idx in 0..event_count {
        let mut support: Vec<SiteId> = (0..sites).filter(|_| rng.gen_bool(0.5)).map(SiteId).collect();
        if support.is_empty() {
            support.push(SiteId(rng.gen_range(0..sites)));
        }
        let kind = if rng.gen_bool(0.5) {
            EventKind::Intersect(
                support
                    .iter()
                    .map(|&s| (s, random_subset(rng, worlds, 0.7)))
                    .collect(),
            )
        } else {
            let rules = (0..rng.gen_range(1..=config.max_rules.max(1)))
                .map(|_| random_rule(rng, &support, &pool))
                .collect();
            EventKind::Table(rules)
        };
        events.push(Event::new(format!("e{idx}"), support, kind));
    }

    Model::new(space, site_names, Some(initial), events, mode).expect("generated models are well formed")
}

fn random_rule(rng: &mut impl Rng, support: &[SiteId], pool: &[Subset]) -> Rule {
    let mut guard = BTreeMap::new();
    let mut result = BTreeMap::new();
    for &site in support {
        if rng.gen_bool(0.75) {
            guard.insert(site, pool.choose(rng).expect("pool").clone());
        }
    }
    for &site in support {
        if !rng.gen_bool(0.8) {
            continue;
        }
        let value = match guard.get(&site) {
            Some(g) if rng.gen_bool(0.75) => {
                let inner: Vec<&Subset> = pool.iter().filter(|p| p.is_subset(g)).collect();
                if !inner.is_empty() && rng.gen_bool(0.5) {
                    inner[rng.gen_range(0..inner.len())].clone()
                } else {
                    random_subset_of(rng, g)
                }
            }
            _ => pool.choose(rng).expect("pool").clone(),
        };
        result.insert(site, value);
    }
    Rule { guard, result }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_models_respect_bounds() {
        let config = RandomModelConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_model(&mut rng, &config);
            assert!(m.space().len() <= 8);
            assert!(m.site_count() <= 3);
            assert!((1..=4).contains(&m.events().len()));
        }
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let config = RandomModelConfig::default();
        let a = random_model(&mut ChaCha8Rng::seed_from_u64(11), &config);
        let b = random_model(&mut ChaCha8Rng::seed_from_u64(11), &config);
        assert_eq!(crate::format::model_digest(&a), crate::format::model_digest(&b));
    }
}
