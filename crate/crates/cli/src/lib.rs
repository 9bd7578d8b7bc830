//! Command dispatch and report assembly for the `chronoforce` binary.
//!
//! Every command returns a [`Report`]: an echo of the command and flags, the
//! model digest, command-specific results, warnings and the exit status.
//! Result maps have sorted keys and every list has a fixed order, so equal
//! inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chronoforce::chronology::find_strong_cycles;
use chronoforce::dot::{influence_dot, reachability_dot};
use chronoforce::influence::replay_strong;
use chronoforce::trace::{resolve_schedule, MismatchKind};
use chronoforce::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_CLEAN: u8 = 0;
pub const EXIT_VIOLATIONS: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Explore,
    Influence,
    Chronology,
    Diagnose,
    TraceCheck,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Explore => "explore",
            Command::Influence => "influence",
            Command::Chronology => "chronology",
            Command::Diagnose => "diagnose",
            Command::TraceCheck => "trace-check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    /// Overrides the model file's consistency mode.
    pub mode: Option<ConsistencyMode>,
    pub max_states: usize,
    pub max_depth: usize,
    pub schedule: Option<Vec<String>>,
    pub swaps: usize,
    pub seed: u64,
    pub strict: bool,
}

impl Default for Flags {
    fn default() -> Self {
        let limits = ExplorationLimits::default();
        Self {
            mode: None,
            max_states: limits.max_nodes,
            max_depth: limits.max_depth,
            schedule: None,
            swaps: 20,
            seed: 0,
            strict: false,
        }
    }
}

impl Flags {
    pub fn limits(&self) -> ExplorationLimits {
        ExplorationLimits {
            max_nodes: self.max_states,
            max_depth: self.max_depth,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("strict mode: {0}")]
    Strict(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandEcho {
    pub command: Command,
    pub model: Option<String>,
    pub flags: Flags,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: CommandEcho,
    pub model_digest: String,
    pub results: Value,
    pub warnings: Vec<String>,
    pub exit_status: u8,
    /// Human-readable summary for the terminal.
    #[serde(skip)]
    pub summary: String,
    #[serde(skip)]
    pub dot: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports always serialize");
        text.push('\n');
        text
    }
}

pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: shown.clone(),
        source,
    })?;
    parse_model(&text).map_err(|source| CliError::Parse { path: shown, source })
}

/// Runs one command. `Err` means exit status 2.
pub fn run_command(cmd: Command, model: &Model, flags: &Flags) -> Result<Report, CliError> {
    let model = match flags.mode {
        Some(mode) => model.clone().with_mode(mode),
        None => model.clone(),
    };
    let j = Json(&model);
    let mut out = Outcome::default();
    for (event, defect) in model.warnings() {
        out.warn(format!("event {}: {}", model.event(*event).name(), defect));
    }

    match cmd {
        Command::Validate => validate(&model, flags, &mut out)?,
        Command::Explore => explore_cmd(&model, flags, &j, &mut out)?,
        Command::Influence => influence_cmd(&model, flags, &j, &mut out)?,
        Command::Chronology => chronology_cmd(&model, flags, &j, &mut out)?,
        Command::Diagnose => diagnose_cmd(&model, flags, &j, &mut out)?,
        Command::TraceCheck => trace_cmd(&model, flags, &j, &mut out)?,
    }

    let exit_status = if out.violations { EXIT_VIOLATIONS } else { EXIT_CLEAN };
    let _ = writeln!(out.summary, "exit status: {exit_status}");
    Ok(Report {
        command: CommandEcho {
            command: cmd,
            model: None,
            flags: flags.clone(),
        },
        model_digest: model_digest(&model),
        results: Value::Object(out.results.into_iter().collect()),
        warnings: out.warnings,
        exit_status,
        summary: out.summary,
        dot: out.dot,
    })
}

#[derive(Default)]
struct Outcome {
    results: BTreeMap<String, Value>,
    warnings: Vec<String>,
    violations: bool,
    summary: String,
    dot: Option<String>,
}

impl Outcome {
    fn set(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }

    fn warn(&mut self, message: String) {
        let _ = writeln!(self.summary, "warning: {message}");
        self.warnings.push(message);
    }

    fn line(&mut self, text: impl AsRef<str>) {
        let _ = writeln!(self.summary, "{}", text.as_ref());
    }

    fn count(&mut self, key: &str, items: Vec<Value>) {
        if !items.is_empty() {
            self.violations = true;
        }
        self.line(format!("{}: {}", key.replace('_', " "), items.len()));
        self.set(key, Value::Array(items));
    }
}

/// JSON encodings tied to one model's labels and names.
struct Json<'a>(&'a Model);

impl Json<'_> {
    fn subset(&self, set: &Subset) -> Value {
        json!(self.0.space().labels(set).collect::<Vec<_>>())
    }

    fn state(&self, state: &RecordState) -> Value {
        let map: serde_json::Map<String, Value> = state
            .records()
            .iter()
            .enumerate()
            .map(|(i, r)| (self.0.site_name(SiteId(i)).to_string(), self.subset(r)))
            .collect();
        Value::Object(map)
    }

    fn event(&self, e: EventId) -> Value {
        json!(self.0.event(e).name())
    }

    fn events(&self, es: impl IntoIterator<Item = EventId>) -> Value {
        Value::Array(es.into_iter().map(|e| self.event(e)).collect())
    }

    fn pair(&self, (e, f): (EventId, EventId)) -> Value {
        json!([self.0.event(e).name(), self.0.event(f).name()])
    }

    fn site(&self, site: SiteId) -> Value {
        json!(self.0.site_name(site))
    }

    fn node(&self, graph: &ReachabilityGraph, id: NodeId) -> Value {
        let node = graph.node(id);
        json!({
            "id": id.0,
            "state": self.state(&node.state),
            "occurred": self.events(node.occurred.iter()),
        })
    }

    fn information(&self, state: &RecordState) -> Value {
        information_value(state.information_content(self.0.space()))
    }

    fn monotonicity(&self, v: &MonotonicityViolation) -> Value {
        json!({
            "event": v.event,
            "site": self.site(v.site),
            "state": self.state(&v.state),
            "added": self.subset(&v.added),
        })
    }

    fn diamond(&self, graph: &ReachabilityGraph, v: &DiamondViolation) -> Value {
        json!({
            "node": self.node(graph, v.node),
            "events": self.pair((v.e, v.f)),
            "e_after_f": self.state(&v.lhs),
            "f_after_e": self.state(&v.rhs),
        })
    }

    fn clock(&self, graph: &ReachabilityGraph, v: &ClockViolation) -> Value {
        let edge = &graph.edges()[v.edge];
        json!({
            "source": edge.source.0,
            "event": self.event(edge.event),
            "target": edge.target.0,
            "before": information_value(v.before),
            "after": information_value(v.after),
        })
    }

    fn bd(&self, graph: &ReachabilityGraph, v: &BdViolation) -> Value {
        json!({
            "edge": self.pair(v.edge),
            "node": self.node(graph, v.node),
            "e_occurred": v.polarity == Polarity::Occurred,
            "expected": self.subset(&v.expected),
            "actual": self.subset(&v.actual),
        })
    }

    fn weak(&self, w: &WeakWitness) -> Value {
        json!({
            "edge": self.pair((w.e, w.f)),
            "node": w.node.0,
            "state": self.state(&w.state),
            "site": self.site(w.site),
            "delta_without": self.subset(&w.delta_without),
            "delta_with": self.subset(&w.delta_with),
        })
    }

    fn strong(&self, w: &StrongWitness) -> Value {
        json!({
            "edge": self.pair((w.e, w.f)),
            "node": w.node.0,
            "state": self.state(&w.state),
            "site": self.site(w.site),
            "observable": self.subset(&w.observable),
            "branch0": self.subset(&w.branch0),
            "branch1": self.subset(&w.branch1),
            "replays": replay_strong(self.0, w),
        })
    }

    fn chronology(&self, chrono: &Chronology) -> (Value, Value) {
        let precedes = Value::Array(chrono.pairs().into_iter().map(|p| self.pair(p)).collect());
        let extension = match chrono.ranks() {
            Some(ranks) => {
                let map: serde_json::Map<String, Value> = ranks
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| (self.0.event(EventId(i)).name().to_string(), json!(r)))
                    .collect();
                Value::Object(map)
            }
            None => Value::Null,
        };
        (precedes, extension)
    }

    fn cycles(&self, report: &CycleReport) -> Value {
        Value::Array(report.cycles.iter().map(|c| self.events(c.iter().copied())).collect())
    }
}

/// `+inf` for an empty-measure feasible set, otherwise the number.
fn information_value(x: f64) -> Value {
    if x.is_infinite() {
        json!("+inf")
    } else {
        json!(x)
    }
}

fn explore_checked(model: &Model, flags: &Flags, out: &mut Outcome) -> Result<ReachabilityGraph, CliError> {
    let graph = explore(model, flags.limits());
    if graph.truncated() {
        out.warn(format!(
            "exploration truncated ({} nodes, limits {} states / depth {}); results cover the explored region only",
            graph.nodes().len(),
            flags.max_states,
            flags.max_depth
        ));
    }
    if flags.strict {
        if let Some(v) = check_monotonicity(&graph).first() {
            return Err(CliError::Strict(format!(
                "event {} grows site {} by {} at {}",
                v.event,
                model.site_name(v.site),
                model.space().format_subset(&v.added),
                model.display_state(&v.state)
            )));
        }
        if let Some(edge) = graph.edges().iter().find(|e| e.fired == Fired::NoMatch) {
            return Err(CliError::Strict(format!(
                "no rule of event {} matches {}",
                model.event(edge.event).name(),
                model.display_state(&graph.node(edge.source).state)
            )));
        }
    }
    Ok(graph)
}

fn validate(model: &Model, flags: &Flags, out: &mut Outcome) -> Result<(), CliError> {
    let defects: Vec<Value> = model
        .warnings()
        .iter()
        .map(|(e, d)| json!({"event": model.event(*e).name(), "kind": d.kind(), "message": d.to_string()}))
        .collect();
    if flags.strict {
        if let Some((e, d)) = model
            .warnings()
            .iter()
            .find(|(_, d)| matches!(d, Defect::StaticMonotonicity { .. }))
        {
            return Err(CliError::Strict(format!("event {}: {d}", model.event(*e).name())));
        }
    }
    out.line(format!(
        "{} worlds, {} sites, {} events",
        model.space().len(),
        model.site_count(),
        model.events().len()
    ));
    out.set("worlds", json!(model.space().len()));
    out.set("sites", json!(model.site_count()));
    out.set("events", json!(model.events().len()));
    out.set("consistency_mode", json!(model.mode()));
    out.set("initial_consistent", json!(model.is_consistent(model.initial())));
    out.count("defects", defects);
    Ok(())
}

fn explore_cmd(model: &Model, flags: &Flags, j: &Json, out: &mut Outcome) -> Result<(), CliError> {
    let graph = explore_checked(model, flags, out)?;
    let nodes: Vec<Value> = graph
        .node_ids()
        .map(|id| {
            let mut v = j.node(&graph, id);
            v["depth"] = json!(graph.depth(id));
            v["information_content"] = j.information(&graph.node(id).state);
            v["consistent"] = json!(model.is_consistent(&graph.node(id).state));
            v
        })
        .collect();
    let edges: Vec<Value> = graph
        .edges()
        .iter()
        .map(|e| json!({"source": e.source.0, "event": j.event(e.event), "target": e.target.0}))
        .collect();
    let distinct = graph.distinct_state_nodes().len();
    out.line(format!(
        "{} nodes ({} distinct record states), {} edges",
        graph.nodes().len(),
        distinct,
        edges.len()
    ));
    out.set("node_count", json!(graph.nodes().len()));
    out.set("distinct_states", json!(distinct));
    out.set("truncated", json!(graph.truncated()));
    out.set("nodes", Value::Array(nodes));
    out.set("edges", Value::Array(edges));
    out.set(
        "unmatched_firings",
        json!(graph.edges().iter().filter(|e| e.fired == Fired::NoMatch).count()),
    );

    let gs = check_gs(model, &graph).into_iter().map(|id| j.node(&graph, id)).collect();
    out.count("gs_violations", gs);
    let mono = check_monotonicity(&graph).iter().map(|v| j.monotonicity(v)).collect();
    out.count("monotonicity_violations", mono);
    let diamond = check_diamond(model, &graph).iter().map(|v| j.diamond(&graph, v)).collect();
    out.count("diamond_violations", diamond);
    let clock = check_clock_monotone(model, &graph)
        .iter()
        .map(|v| j.clock(&graph, v))
        .collect();
    out.count("clock_violations", clock);
    out.dot = Some(reachability_dot(model, &graph));
    Ok(())
}

fn influence_cmd(model: &Model, flags: &Flags, j: &Json, out: &mut Outcome) -> Result<(), CliError> {
    let graph = explore_checked(model, flags, out)?;
    let ig = build_influence_graphs(model, &graph);
    let mut weak = Vec::new();
    for w in ig.weak.values() {
        let mut v = j.weak(w);
        match binary_witness(model, w) {
            Ok(b) => v["binary_witness"] = j.subset(&b),
            Err(err) => {
                v["binary_witness"] = Value::Null;
                out.warn(format!("binary witness: {err}"));
            }
        }
        weak.push(v);
    }
    let strong: Vec<Value> = ig.strong.values().map(|w| j.strong(w)).collect();
    out.line(format!("weak edges: {}, strong edges: {}", weak.len(), strong.len()));
    out.set("weak", Value::Array(weak));
    out.set("strong", Value::Array(strong));
    out.set("truncated", json!(graph.truncated()));
    out.dot = Some(influence_dot(&ig, &transitive_closure(&ig)));
    Ok(())
}

fn chronology_cmd(model: &Model, flags: &Flags, j: &Json, out: &mut Outcome) -> Result<(), CliError> {
    let graph = explore_checked(model, flags, out)?;
    let ig = build_influence_graphs(model, &graph);
    let chrono = transitive_closure(&ig);
    let (precedes, extension) = j.chronology(&chrono);
    out.line(format!("precedes pairs: {}", chrono.pairs().len()));
    if let Some(ranks) = chrono.ranks() {
        let mut order: Vec<(usize, &str)> = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, model.event(EventId(i)).name()))
            .collect();
        order.sort();
        let names: Vec<&str> = order.into_iter().map(|(_, n)| n).collect();
        out.line(format!("linear extension: {}", names.join(" < ")));
    }
    out.set("precedes", precedes);
    out.set("acyclic", json!(chrono.is_acyclic()));
    out.set("linear_extension", extension);
    out.set("truncated", json!(graph.truncated()));
    let cycles = find_strong_cycles(&ig);
    let cycle_values = match j.cycles(&cycles) {
        Value::Array(v) => v,
        _ => unreachable!(),
    };
    out.count("cycles", cycle_values);
    out.dot = Some(influence_dot(&ig, &chrono));
    Ok(())
}

fn diagnose_cmd(model: &Model, flags: &Flags, j: &Json, out: &mut Outcome) -> Result<(), CliError> {
    // Strict checks and the truncation warning come from the same exploration.
    let d = diagnose(model, flags.limits());
    if flags.strict || d.graph.truncated() {
        explore_checked(model, flags, out)?;
    }
    let r = &d.report;
    let g = &d.graph;
    out.line(format!("verdict: {}", r.verdict.as_str()));
    out.set("verdict", json!(r.verdict.as_str()));
    out.set("has_strong_cycle", json!(r.has_strong_cycle));
    out.set("truncated", json!(r.truncated));
    out.set(
        "explored",
        json!({"nodes": g.nodes().len(), "edges": g.edges().len(), "distinct_states": g.distinct_state_nodes().len()}),
    );
    let cycles = match j.cycles(&r.cycles) {
        Value::Array(v) => v,
        _ => unreachable!(),
    };
    out.count("cycles", cycles);
    out.count("gs_violations", r.gs_violations.iter().map(|id| j.node(g, *id)).collect());
    out.count(
        "diamond_violations",
        r.diamond_violations.iter().map(|v| j.diamond(g, v)).collect(),
    );
    out.count(
        "monotonicity_violations",
        r.monotonicity_violations.iter().map(|v| j.monotonicity(v)).collect(),
    );
    out.count("bd_violations", r.bd_violations.iter().map(|v| j.bd(g, v)).collect());
    out.count("clock_violations", d.clock_violations.iter().map(|v| j.clock(g, v)).collect());

    out.set("weak_edges", Value::Array(d.influence.weak_edges().into_iter().map(|p| j.pair(p)).collect()));
    out.set("strong", Value::Array(d.influence.strong.values().map(|w| j.strong(w)).collect()));
    let (precedes, extension) = j.chronology(&d.chronology);
    out.set("precedes", precedes);
    out.set("linear_extension", extension);

    let mut claims = Vec::new();
    for note in &d.claims {
        let Claim::StrongCycle { events, observable } = &model.claims()[note.claim];
        let status = match note.status {
            ClaimStatus::Confirmed => "confirmed",
            ClaimStatus::Refuted => "refuted",
        };
        let names: Vec<&str> = events.iter().map(|e| model.event(*e).name()).collect();
        let mut closed = names.clone();
        closed.extend(names.first());
        let mut message = format!("claim {}: strong cycle {}", note.claim, closed.join(" => "));
        if let Some(b) = observable {
            let _ = write!(message, " on observable {}", model.space().format_subset(b));
        }
        let _ = write!(message, " is {status}");
        if !note.missing_edges.is_empty() {
            let missing: Vec<String> = note
                .missing_edges
                .iter()
                .map(|&(e, f)| format!("{} => {}", model.event(e).name(), model.event(f).name()))
                .collect();
            let _ = write!(message, "; no witness for {}", missing.join(", "));
        }
        if !note.unwitnessed_on_observable.is_empty() {
            let _ = write!(
                message,
                "; {} of {} cycle edges are not witnessed on the observable",
                note.unwitnessed_on_observable.len(),
                names.len()
            );
        }
        out.warn(message);
        claims.push(json!({
            "events": names,
            "observable": observable.as_ref().map(|b| j.subset(b)),
            "status": status,
            "missing_edges": note.missing_edges.iter().map(|&p| j.pair(p)).collect::<Vec<_>>(),
            "unwitnessed_on_observable": note.unwitnessed_on_observable.iter().map(|&p| j.pair(p)).collect::<Vec<_>>(),
        }));
    }
    out.set("claims", Value::Array(claims));
    if r.verdict == Verdict::TheoremViolationSuspected {
        out.warn("strong cycle with every premise check clean over the explored region".to_string());
    }
    out.dot = Some(influence_dot(&d.influence, &d.chronology));
    Ok(())
}

fn trace_cmd(model: &Model, flags: &Flags, j: &Json, out: &mut Outcome) -> Result<(), CliError> {
    let names = flags
        .schedule
        .as_ref()
        .ok_or_else(|| CliError::Usage("trace-check requires --schedule".to_string()))?;
    let schedule = resolve_schedule(model, names).map_err(|e| CliError::Usage(e.to_string()))?;
    if flags.strict {
        explore_checked(model, flags, out)?;
    }
    let report = check_trace_invariance(model, &schedule, flags.swaps, flags.seed, flags.limits());
    if report.truncated {
        out.warn("exploration truncated; strong edges compared over the explored region only".to_string());
    }
    if !report.diamond_violations.is_empty() {
        out.warn("diamond property fails; trace-class comparison skipped".to_string());
    }
    out.line(format!(
        "schedule of {} events, {} trace-class members checked",
        schedule.len(),
        report.members_checked
    ));
    out.set("schedule", j.events(schedule.iter().copied()));
    out.set("seed", json!(report.seed));
    out.set("swaps", json!(report.swaps));
    out.set("final_state", j.state(&report.final_state));
    out.set("final_information_content", j.information(&report.final_state));
    out.set(
        "strong_edges",
        Value::Array(report.strong_edges.iter().map(|&p| j.pair(p)).collect()),
    );
    out.set("members_checked", json!(report.members_checked));
    out.set("invariant", json!(report.is_invariant()));
    out.set("truncated", json!(report.truncated));
    let graph = explore(model, flags.limits());
    out.count(
        "diamond_violations",
        report.diamond_violations.iter().map(|v| j.diamond(&graph, v)).collect(),
    );
    let mismatches = report
        .mismatches
        .iter()
        .map(|m| {
            json!({
                "schedule": j.events(m.schedule.iter().copied()),
                "kind": match m.kind {
                    MismatchKind::FinalState => "final_state",
                    MismatchKind::StrongEdges => "strong_edges",
                },
            })
        })
        .collect();
    out.count("mismatches", mismatches);
    Ok(())
}
