use std::collections::BTreeSet;

use chronoforce::random::{random_model, RandomModelConfig};
use chronoforce::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model_from_seed(seed: u64) -> Model {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), &RandomModelConfig::default())
}

fn small_limits() -> ExplorationLimits {
    ExplorationLimits {
        max_nodes: 5_000,
        max_depth: 64,
    }
}

fn weighted_space(weights: &[u8]) -> PossibilitySpace {
    let labels = (0..weights.len()).map(|i| format!("w{i}")).collect();
    let mut ws: Vec<Weight> = weights.iter().map(|&w| Weight::from_ratio(w as i64, 3).unwrap()).collect();
    if ws.iter().all(Weight::is_zero) {
        ws[0] = Weight::one();
    }
    PossibilitySpace::weighted(labels, ws).unwrap()
}

fn subset_from_mask(universe: usize, mask: u16) -> Subset {
    Subset::from_indices(universe, (0..universe).filter(|i| mask >> i & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn updates_only_touch_supported_sites(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        let g = explore(&m, small_limits());
        for node in g.nodes() {
            for e in m.events() {
                let next = apply_event(e, &node.state).next;
                for site in (0..m.site_count()).map(SiteId) {
                    if !e.supports(site) {
                        prop_assert_eq!(next.get(site), node.state.get(site));
                        prop_assert!(write_effect(e, &node.state, site).unwrap().is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn intersect_is_idempotent(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        let g = explore(&m, small_limits());
        for node in g.nodes() {
            for e in m.events().iter().filter(|e| matches!(e.kind(), EventKind::Intersect(_))) {
                let once = apply_event(e, &node.state);
                prop_assert!(once.violations.is_empty());
                let twice = apply_event(e, &once.next).next;
                prop_assert_eq!(twice, once.next);
            }
        }
    }

    #[test]
    fn write_effect_is_inside_the_record(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        let g = explore(&m, small_limits());
        for node in g.nodes() {
            for e in m.events() {
                for site in (0..m.site_count()).map(SiteId) {
                    let delta = write_effect(e, &node.state, site).unwrap();
                    prop_assert!(delta.is_subset(node.state.get(site).unwrap()));
                }
            }
        }
    }

    #[test]
    fn monotone_updates_shrink_the_feasible_set(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        let g = explore(&m, small_limits());
        for node in g.nodes() {
            for e in m.events() {
                let out = apply_event(e, &node.state);
                if out.violations.is_empty() {
                    prop_assert!(out.next.feasible_set().is_subset(&node.state.feasible_set()));
                    let before = m.space().measure_exact(&node.state.feasible_set());
                    prop_assert!(m.space().measure_exact(&out.next.feasible_set()) <= before);
                }
            }
        }
    }

    #[test]
    fn measure_is_finitely_additive(weights in prop::collection::vec(0u8..6, 1..=12), a in any::<u16>(), b in any::<u16>()) {
        let space = weighted_space(&weights);
        let n = space.len();
        let a = subset_from_mask(n, a);
        let b = subset_from_mask(n, b).difference(&a);
        let sum = space.measure_exact(&a) + space.measure_exact(&b);
        prop_assert_eq!(space.measure_exact(&a.union(&b)), sum);
        prop_assert!(space.measure_exact(&space.empty()) == num_rational::BigRational::from_integer(0.into()));
    }

    #[test]
    fn null_equiv_is_an_equivalence(weights in prop::collection::vec(0u8..3, 1..=10), a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        let space = weighted_space(&weights);
        let n = space.len();
        let (a, b, c) = (subset_from_mask(n, a), subset_from_mask(n, b), subset_from_mask(n, c));
        prop_assert!(space.null_equiv(&a, &a));
        prop_assert_eq!(space.null_equiv(&a, &b), space.null_equiv(&b, &a));
        if space.null_equiv(&a, &b) && space.null_equiv(&b, &c) {
            prop_assert!(space.null_equiv(&a, &c));
        }
        prop_assert_eq!(space.null_equiv(&a, &b), space.is_null(&a.symmetric_difference(&b)));
    }

    #[test]
    fn exploration_is_deterministic(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        prop_assert_eq!(explore(&m, small_limits()), explore(&m, small_limits()));
        let text = serialize_model(&m);
        let reparsed = parse_model(&text).unwrap();
        prop_assert_eq!(model_digest(&reparsed), model_digest(&m));
        prop_assert_eq!(explore(&reparsed, small_limits()), explore(&m, small_limits()));
    }

    #[test]
    fn occurred_sets_follow_edges(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        let g = explore(&m, small_limits());
        prop_assert!(g.node(g.initial()).occurred.is_empty());
        let nodes: BTreeSet<_> = g.nodes().iter().map(|n| (n.state.clone(), n.occurred.clone())).collect();
        prop_assert_eq!(nodes.len(), g.nodes().len());
        for edge in g.edges() {
            let (src, dst) = (g.node(edge.source), g.node(edge.target));
            prop_assert_eq!(&dst.occurred, &src.occurred.with(edge.event));
            let out = apply_event(m.event(edge.event), &src.state);
            prop_assert_eq!(&dst.state, &out.next);
            prop_assert_eq!(&edge.violations, &out.violations);
        }
        if !g.truncated() {
            for (id, node) in g.node_ids().zip(g.nodes()) {
                let outgoing = g.edges().iter().filter(|e| e.source == id).count();
                prop_assert_eq!(outgoing, m.events().len(), "node {} {:?}", id.0, node);
            }
        }
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        let g = explore(&m, small_limits());
        let ig = build_influence_graphs(&m, &g);
        for w in ig.strong.values() {
            prop_assert!(influence::replay_strong(&m, w));
            prop_assert_eq!(&g.node(w.node).state, &w.state);
        }
        for w in ig.weak.values() {
            let e = m.event(w.e);
            let f = m.event(w.f);
            let after_e = apply_event(e, &w.state).next;
            prop_assert_eq!(&write_effect(f, &w.state, w.site).unwrap(), &w.delta_without);
            prop_assert_eq!(&write_effect(f, &after_e, w.site).unwrap(), &w.delta_with);
            prop_assert!(!m.same(&w.delta_without, &w.delta_with));
        }
    }

    #[test]
    fn canonical_search_matches_oracle(seed in any::<u64>()) {
        let m = model_from_seed(seed);
        let g = explore(&m, small_limits());
        for e in m.event_ids() {
            for f in m.event_ids() {
                let canonical = strong_influence(&m, &g, e, f).is_some();
                let oracle = strong_influence_oracle(&m, &g, e, f).unwrap().is_some();
                prop_assert_eq!(canonical, oracle, "{:?} => {:?}", e, f);
            }
        }
    }

    #[test]
    fn closure_matches_path_search(n in 1usize..8, raw in prop::collection::vec((0usize..8, 0usize..8), 0..20)) {
        let edges: Vec<(EventId, EventId)> = raw
            .into_iter()
            .filter(|&(a, b)| a < n && b < n)
            .map(|(a, b)| (EventId(a), EventId(b)))
            .collect();
        let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        let chrono = Chronology::from_edges(names, &edges);
        for a in 0..n {
            // Depth-first search over paths of length at least one.
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = edges.iter().filter(|e| e.0 .0 == a).map(|e| e.1 .0).collect();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(edges.iter().filter(|e| e.0 .0 == v).map(|e| e.1 .0));
                }
            }
            for (b, &reached) in seen.iter().enumerate() {
                prop_assert_eq!(chrono.precedes(EventId(a), EventId(b)), reached);
            }
        }
        let cycles = chronology::find_cycles(n, &edges);
        let has_self_loop = edges.iter().any(|(a, b)| a == b);
        prop_assert_eq!(chrono.is_acyclic(), cycles.is_empty() && !has_self_loop);
        for cycle in &cycles.cycles {
            for edge in CycleReport::edges(cycle) {
                prop_assert!(edges.contains(&edge));
            }
        }
        if let Some(ranks) = chrono.ranks() {
            let distinct: BTreeSet<_> = ranks.iter().collect();
            prop_assert_eq!(distinct.len(), n);
            for (a, b) in chrono.pairs() {
                prop_assert!(ranks[a.0] < ranks[b.0]);
            }
        }
    }
}
