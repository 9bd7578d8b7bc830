use std::collections::BTreeSet;

use chronoforce::chronology::find_cycles;
use chronoforce::dot::influence_dot;
use chronoforce::trace::{resolve_schedule, run_schedule};
use chronoforce::*;

fn load(name: &str) -> Model {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_model(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn set(model: &Model, labels: &[&str]) -> Subset {
    model.space().subset(labels.iter().copied()).unwrap()
}

fn ev(model: &Model, name: &str) -> EventId {
    model.event_id(name).unwrap()
}

fn states(graph: &ReachabilityGraph) -> BTreeSet<RecordState> {
    graph.nodes().iter().map(|n| n.state.clone()).collect()
}

fn explored(model: &Model) -> ReachabilityGraph {
    explore(model, ExplorationLimits::default())
}

#[test]
fn two_site_parses_to_commuting_tightenings() {
    let m = load("two_site.json");
    assert_eq!(m.site_count(), 2);
    assert_eq!(m.space().len(), 4);
    assert!(independent(m.event(ev(&m, "e1")), m.event(ev(&m, "e2"))));
}

#[test]
fn gadget_parses_to_single_site_tables() {
    let m = load("cycle_gadget.json");
    assert_eq!(m.site_count(), 1);
    assert!(!independent(m.event(ev(&m, "a")), m.event(ev(&m, "b"))));
    // The table for `a` maps {0} to {1}: flagged statically, loaded anyway.
    assert_eq!(
        m.warnings(),
        &[(ev(&m, "a"), Defect::StaticMonotonicity { rule: 1, site: SiteId(0) })]
    );
}

#[test]
fn two_site_reachable_states() {
    let m = load("two_site.json");
    let g = explored(&m);
    let omega = m.space().omega();
    let x1 = set(&m, &["00", "01"]);
    let x2 = set(&m, &["00", "10"]);
    let expected: BTreeSet<RecordState> = [
        RecordState::new(vec![omega.clone(), omega.clone()]),
        RecordState::new(vec![x1.clone(), omega.clone()]),
        RecordState::new(vec![omega, x2.clone()]),
        RecordState::new(vec![x1, x2]),
    ]
    .into();
    assert_eq!(states(&g), expected);
    assert!(!g.truncated());
}

#[test]
fn gadget_reachable_states() {
    let m = load("cycle_gadget.json");
    let g = explored(&m);
    let expected: BTreeSet<RecordState> = [&["0", "1"][..], &["0"], &["1"], &[]]
        .iter()
        .map(|l| RecordState::new(vec![set(&m, l)]))
        .collect();
    assert_eq!(states(&g), expected);
}

#[test]
fn global_consistency() {
    let m = load("two_site.json");
    assert!(check_gs(&m, &explored(&m)).is_empty());

    let m = load("cycle_gadget.json");
    let g = explored(&m);
    let bad = check_gs(&m, &g);
    assert!(!bad.is_empty());
    assert!(bad.iter().all(|id| g.node(*id).state == RecordState::new(vec![m.space().empty()])));
    // a then b reaches the empty record.
    let a_then_b = run_schedule(&m, &[ev(&m, "a"), ev(&m, "b")]);
    assert_eq!(a_then_b, RecordState::new(vec![m.space().empty()]));
}

#[test]
fn diamond_checks() {
    let m = load("two_site.json");
    assert!(check_diamond(&m, &explored(&m)).is_empty());
    let m = load("cycle_gadget.json");
    assert!(check_diamond(&m, &explored(&m)).is_empty());

    // e overwrites site 1 under a guard on site 1, f intersects site 2.
    let text = r#"{
      "worlds": ["p", "q", "r"], "sites": ["1", "2"],
      "events": [
        {"kind": "table", "name": "e", "support": ["1"], "rules": [
          {"guard": {"1": ["p", "q", "r"]}, "result": {"1": ["q"]}},
          {"guard": {"1": ["q"]}, "result": {"1": ["p", "r"]}}]},
        {"kind": "intersect", "name": "f", "support": ["2"], "constraints": {"2": ["p", "r"]}}
      ]}"#;
    let m = parse_model(text).unwrap();
    let g = explored(&m);
    assert!(g.nodes().len() > 3);
    assert!(check_diamond(&m, &g).is_empty());
}

#[test]
fn monotonicity_checks() {
    let m = load("two_site.json");
    assert!(check_monotonicity(&explored(&m)).is_empty());

    let m = load("cycle_gadget.json");
    let violations = check_monotonicity(&explored(&m));
    assert_eq!(violations.len(), 1);
    let v = &violations[0];
    assert_eq!(v.event, "a");
    assert_eq!(v.site, SiteId(0));
    assert_eq!(v.state, RecordState::new(vec![set(&m, &["0"])]));
    assert_eq!(v.added, set(&m, &["1"]));
}

#[test]
fn information_clock_along_paths() {
    let m = load("two_site.json");
    let s0 = m.initial().clone();
    let s1 = run_schedule(&m, &[ev(&m, "e1")]);
    let s2 = run_schedule(&m, &[ev(&m, "e1"), ev(&m, "e2")]);
    let clock: Vec<f64> = [&s0, &s1, &s2].iter().map(|s| s.information_content(m.space())).collect();
    let expected = [-(4f64).ln(), -(2f64).ln(), 0.0];
    for (got, want) in clock.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }
    assert!(check_clock_monotone(&m, &explored(&m)).is_empty());

    let m = load("cycle_gadget.json");
    let path = [
        m.initial().clone(),
        run_schedule(&m, &[ev(&m, "a")]),
        run_schedule(&m, &[ev(&m, "a"), ev(&m, "b")]),
    ];
    let clock: Vec<f64> = path.iter().map(|s| s.information_content(m.space())).collect();
    assert!((clock[0] + (2f64).ln()).abs() <= 1e-12);
    assert_eq!(clock[1], 0.0);
    assert_eq!(clock[2], f64::INFINITY);

    // The {0} -> {1} step of `a` keeps μ(F) at 1, so the clock does not run back.
    assert!(check_clock_monotone(&m, &explored(&m)).is_empty());
}

#[test]
fn gadget_weak_influence() {
    let m = load("cycle_gadget.json");
    let g = explored(&m);
    let (a, b) = (ev(&m, "a"), ev(&m, "b"));
    let w = weak_influence(&m, &g, a, b).expect("a -> b");
    assert_eq!(g.node(w.node).state, RecordState::new(vec![m.space().omega()]));
    assert_eq!(w.site, SiteId(0));
    assert_eq!(w.delta_without, set(&m, &["1"]));
    assert_eq!(w.delta_with, set(&m, &["0"]));

    let b_set = binary_witness(&m, &w).unwrap();
    assert_eq!(b_set, m.space().omega());

    assert!(weak_influence(&m, &g, b, a).is_some());
}

#[test]
fn two_site_has_no_influence() {
    let m = load("two_site.json");
    let g = explored(&m);
    let (e1, e2) = (ev(&m, "e1"), ev(&m, "e2"));
    assert_eq!(weak_influence(&m, &g, e1, e2), None);
    assert_eq!(strong_influence(&m, &g, e1, e2), None);
    let ig = build_influence_graphs(&m, &g);
    assert!(ig.weak.is_empty() && ig.strong.is_empty());
    for (e, f) in [(e1, e2), (e2, e1)] {
        assert_eq!(strong_influence_oracle(&m, &g, e, f).unwrap(), None);
    }
}

#[test]
fn gadget_strong_influence() {
    let m = load("cycle_gadget.json");
    let g = explored(&m);
    let (a, b) = (ev(&m, "a"), ev(&m, "b"));

    let w = strong_influence(&m, &g, b, a).expect("b => a");
    assert_eq!(g.node(w.node).state, RecordState::new(vec![m.space().omega()]));
    assert_eq!(w.observable, m.space().omega());
    assert_eq!(w.branch0, set(&m, &["0"]));
    assert_eq!(w.branch1, set(&m, &["1"]));
    assert!(influence::replay_strong(&m, &w));

    assert_eq!(strong_influence(&m, &g, a, b), None);

    for e in [a, b] {
        for f in [a, b] {
            assert_eq!(
                strong_influence(&m, &g, e, f).is_some(),
                strong_influence_oracle(&m, &g, e, f).unwrap().is_some(),
                "{e:?} => {f:?}"
            );
        }
    }

    let ig = build_influence_graphs(&m, &g);
    assert_eq!(ig.weak_edges(), vec![(a, b), (b, a)]);
    assert_eq!(ig.strong_edges(), vec![(b, a)]);

    // No edge of the claimed cycle is witnessed on the observable {0}.
    let zero = set(&m, &["0"]);
    assert_eq!(influence::strong_influence_on(&m, &g, a, b, &zero), None);
    assert_eq!(influence::strong_influence_on(&m, &g, b, a, &zero), None);
}

#[test]
fn gadget_chronology() {
    let m = load("cycle_gadget.json");
    let g = explored(&m);
    let ig = build_influence_graphs(&m, &g);
    let (a, b) = (ev(&m, "a"), ev(&m, "b"));
    assert!(find_strong_cycles(&ig).is_empty());
    let chrono = transitive_closure(&ig);
    assert_eq!(chrono.pairs(), vec![(b, a)]);
    assert_eq!(chrono.rank(b), Some(0));
    assert_eq!(chrono.rank(a), Some(1));
    assert!(check_branch_determinacy(&m, &g, &ig).is_empty());
}

#[test]
fn two_site_chronology_is_empty() {
    let m = load("two_site.json");
    let ig = build_influence_graphs(&m, &explored(&m));
    let chrono = transitive_closure(&ig);
    assert!(chrono.pairs().is_empty());
    assert_eq!(chrono.rank(ev(&m, "e1")), Some(0));
    assert_eq!(chrono.rank(ev(&m, "e2")), Some(1));
    assert!(find_cycles(2, &[]).is_empty());
}

#[test]
fn unrelated_event_flips_branch() {
    let m = load("unstable_branch.json");
    let g = explored(&m);
    let ig = build_influence_graphs(&m, &g);
    let (e, f) = (ev(&m, "e"), ev(&m, "f"));
    assert_eq!(ig.strong_edges(), vec![(e, f)]);

    let violations = check_branch_determinacy(&m, &g, &ig);
    let g_event = ev(&m, "g");
    let flipped: Vec<_> = violations
        .iter()
        .filter(|v| v.polarity == Polarity::NotOccurred)
        .collect();
    assert_eq!(flipped.len(), 1);
    let node = g.node(flipped[0].node);
    assert!(node.occurred.contains(g_event));
    assert!(!node.occurred.contains(e));
    assert_eq!(flipped[0].expected, set(&m, &["0", "2"]));
    assert_eq!(flipped[0].actual, set(&m, &["1", "2"]));
}

#[test]
fn diagnose_fixtures() {
    let d = diagnose(&load("two_site.json"), ExplorationLimits::default());
    assert_eq!(d.report.verdict, Verdict::NoCycle);
    assert!(d.report.premises_clean());
    assert!(d.chronology.pairs().is_empty());

    let m = load("cycle_gadget.json");
    let d = diagnose(&m, ExplorationLimits::default());
    assert_eq!(d.report.verdict, Verdict::NoCycle);
    assert!(!d.report.gs_violations.is_empty());
    assert!(!d.report.monotonicity_violations.is_empty());
    assert_eq!(d.claims.len(), 1);
    assert_eq!(d.claims[0].status, ClaimStatus::Refuted);
    assert_eq!(d.claims[0].missing_edges, vec![(ev(&m, "a"), ev(&m, "b"))]);
    assert_eq!(d.claims[0].unwitnessed_on_observable.len(), 2);

    let m = load("emptying_cycle.json");
    let d = diagnose(&m, ExplorationLimits::default());
    assert!(d.report.has_strong_cycle);
    assert!(!d.report.gs_violations.is_empty());
    assert_eq!(d.report.verdict, Verdict::CycleExplained);
}

#[test]
fn clean_cycle_escapes_every_premise_check() {
    // Monotone single-site tables, every reachable record nonempty, and yet
    // a => b and b => a are both witnessed at the initial state.
    let m = load("clean_cycle.json");
    let d = diagnose(&m, ExplorationLimits::default());
    let (a, b) = (ev(&m, "a"), ev(&m, "b"));
    assert_eq!(d.influence.strong_edges(), vec![(a, b), (b, a)]);
    assert!(d.report.premises_clean());
    assert!(!d.report.truncated);
    assert_eq!(d.report.verdict, Verdict::TheoremViolationSuspected);
    assert_eq!(d.claims[0].status, ClaimStatus::Confirmed);
    assert!(!d.chronology.is_acyclic());
}

#[test]
fn trace_invariance_fixtures() {
    let m = load("two_site.json");
    let schedule = resolve_schedule(&m, &["e1", "e2"]).unwrap();
    let report = check_trace_invariance(&m, &schedule, 20, 1, ExplorationLimits::default());
    assert!(report.is_invariant());
    assert_eq!(report.members_checked, 1);
    assert_eq!(
        report.final_state,
        RecordState::new(vec![set(&m, &["00", "01"]), set(&m, &["00", "10"])])
    );
    let swapped = resolve_schedule(&m, &["e2", "e1"]).unwrap();
    assert_eq!(run_schedule(&m, &swapped), report.final_state);

    let m = load("cycle_gadget.json");
    let schedule = resolve_schedule(&m, &["a", "b"]).unwrap();
    let report = check_trace_invariance(&m, &schedule, 20, 1, ExplorationLimits::default());
    assert!(report.is_invariant());
    assert_eq!(report.members_checked, 0);

    assert_eq!(
        resolve_schedule(&m, &["a", "zzz"]),
        Err(TraceError::UnknownEvent("zzz".into()))
    );
}

#[test]
fn influence_dot_styles() {
    let m = load("cycle_gadget.json");
    let d = diagnose(&m, ExplorationLimits::default());
    let dot = influence_dot(&d.influence, &d.chronology);
    assert_eq!(dot.matches("style=solid").count(), 1);
    assert!(dot.contains("\"b\" -> \"a\" [style=solid"));
    assert_eq!(dot.matches("style=dashed").count(), 1);
    assert!(dot.contains("\"a\" -> \"b\" [style=dashed"));
    assert_eq!(dot.matches("style=dotted").count(), 0);

    let m = load("two_site.json");
    let d = diagnose(&m, ExplorationLimits::default());
    let dot = influence_dot(&d.influence, &d.chronology);
    assert_eq!(dot.matches("->").count(), 0);
    assert!(dot.contains("\"e1\";") && dot.contains("\"e2\";"));

    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let chain = [(EventId(0), EventId(1)), (EventId(1), EventId(2))];
    let dummy = |(e, f): (EventId, EventId)| StrongWitness {
        e,
        f,
        node: NodeId(0),
        state: RecordState::new(vec![]),
        site: SiteId(0),
        observable: Subset::empty(1),
        branch0: Subset::empty(1),
        branch1: Subset::empty(1),
    };
    let ig = InfluenceGraph {
        event_names: names.clone(),
        weak: Default::default(),
        strong: chain.iter().map(|&p| (p, dummy(p))).collect(),
    };
    let dot = influence_dot(&ig, &transitive_closure(&ig));
    assert_eq!(dot.matches("style=solid").count(), 2);
    assert_eq!(dot.matches("style=dotted").count(), 1);
    assert!(dot.contains("\"x\" -> \"z\" [style=dotted"));
}
