//! Place/transition nets, Workflow nets and the firing rule.
//!
//! Nodes are identified by opaque strings. Places and transitions are kept in
//! lexicographic order and addressed internally by their index in that order,
//! so every iteration over a net is deterministic.

mod marking;
pub mod pnml;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

pub use marking::Marking;
pub use pnml::{parse_pnml, write_pnml, PnmlError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("identifier `{0}` is used more than once")]
    DuplicateId(String),
    #[error("arc {from} -> {to} does not connect a place and a transition")]
    NotBipartite { from: String, to: String },
    #[error("arc {from} -> {to} appears more than once")]
    DuplicateArc { from: String, to: String },
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("not a Workflow net: {}", join_violations(.0))]
    Structure(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A reason why a Petri net fails to be a Workflow net.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("the net has no places")]
    NoPlaces,
    #[error("the net has no transitions")]
    NoTransitions,
    #[error("no source candidate (no place with an empty preset)")]
    NoSource,
    #[error("multiple source candidates: {}", .0.join(", "))]
    MultipleSources(Vec<String>),
    #[error("no sink candidate (no place with an empty postset)")]
    NoSink,
    #[error("multiple sink candidates: {}", .0.join(", "))]
    MultipleSinks(Vec<String>),
    #[error("`{0}` is not on a path from the source to the sink")]
    NotOnPath(String),
}

/// A node reference resolved against a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Place(usize),
    Transition(usize),
}

/// Outcome of replaying a firing sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayOutcome {
    /// Every step fired; the marking reached at the end.
    Completed(Marking),
    /// The step at `index` (0-based) was not enabled or not a transition of the net.
    Blocked { index: usize },
}

/// A place/transition net with unit arc weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<String>,
    labels: BTreeMap<String, String>,
    // input/output places of each transition
    t_in: Vec<Vec<usize>>,
    t_out: Vec<Vec<usize>>,
    // producing/consuming transitions of each place
    p_in: Vec<Vec<usize>>,
    p_out: Vec<Vec<usize>>,
    arc_count: usize,
}

impl PetriNet {
    /// Builds a net from node identifiers and `(from, to)` arcs.
    pub fn new<P, T, A, S1, S2>(places: P, transitions: T, arcs: A) -> Result<Self, NetError>
    where
        P: IntoIterator<Item = S1>,
        T: IntoIterator<Item = S1>,
        A: IntoIterator<Item = (S2, S2)>,
        S1: Into<String>,
        S2: AsRef<str>,
    {
        let mut places: Vec<String> = places.into_iter().map(Into::into).collect();
        let mut transitions: Vec<String> = transitions.into_iter().map(Into::into).collect();
        places.sort();
        transitions.sort();
        for w in places.windows(2).chain(transitions.windows(2)) {
            if w[0] == w[1] {
                return Err(NetError::DuplicateId(w[0].clone()));
            }
        }
        for p in &places {
            if transitions.binary_search(p).is_ok() {
                return Err(NetError::DuplicateId(p.clone()));
            }
        }
        let mut net = PetriNet {
            t_in: vec![Vec::new(); transitions.len()],
            t_out: vec![Vec::new(); transitions.len()],
            p_in: vec![Vec::new(); places.len()],
            p_out: vec![Vec::new(); places.len()],
            places,
            transitions,
            labels: BTreeMap::new(),
            arc_count: 0,
        };
        let mut seen = BTreeSet::new();
        for (from, to) in arcs {
            let (from, to) = (from.as_ref(), to.as_ref());
            let a = net.node(from).ok_or_else(|| NetError::UnknownNode(from.to_string()))?;
            let b = net.node(to).ok_or_else(|| NetError::UnknownNode(to.to_string()))?;
            if !seen.insert((a, b)) {
                return Err(NetError::DuplicateArc { from: from.into(), to: to.into() });
            }
            match (a, b) {
                (Node::Place(p), Node::Transition(t)) => {
                    net.p_out[p].push(t);
                    net.t_in[t].push(p);
                }
                (Node::Transition(t), Node::Place(p)) => {
                    net.t_out[t].push(p);
                    net.p_in[p].push(t);
                }
                _ => return Err(NetError::NotBipartite { from: from.into(), to: to.into() }),
            }
            net.arc_count += 1;
        }
        for v in net.t_in.iter_mut().chain(&mut net.t_out).chain(&mut net.p_in).chain(&mut net.p_out) {
            v.sort_unstable();
        }
        Ok(net)
    }

    /// Attaches a display name to a node. Names do not affect semantics.
    pub fn set_label(&mut self, node: &str, label: impl Into<String>) -> Result<(), NetError> {
        self.node(node).ok_or_else(|| NetError::UnknownNode(node.to_string()))?;
        self.labels.insert(node.to_string(), label.into());
        Ok(())
    }

    pub fn label(&self, node: &str) -> Option<&str> {
        self.labels.get(node).map(String::as_str)
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[String] {
        &self.transitions
    }

    pub fn place_index(&self, id: &str) -> Option<usize> {
        self.places.binary_search_by(|p| p.as_str().cmp(id)).ok()
    }

    pub fn transition_index(&self, id: &str) -> Option<usize> {
        self.transitions.binary_search_by(|t| t.as_str().cmp(id)).ok()
    }

    pub fn node(&self, id: &str) -> Option<Node> {
        self.place_index(id)
            .map(Node::Place)
            .or_else(|| self.transition_index(id).map(Node::Transition))
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    /// All arcs as `(from, to)` pairs in lexicographic order.
    pub fn arcs(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::with_capacity(self.arc_count);
        for (p, ts) in self.p_out.iter().enumerate() {
            out.extend(ts.iter().map(|&t| (self.places[p].as_str(), self.transitions[t].as_str())));
        }
        for (t, ps) in self.t_out.iter().enumerate() {
            out.extend(ps.iter().map(|&p| (self.transitions[t].as_str(), self.places[p].as_str())));
        }
        out.sort_unstable();
        out
    }

    /// Sources of the arcs entering `node`, sorted.
    pub fn preset(&self, node: &str) -> Result<Vec<&str>, NetError> {
        match self.node(node).ok_or_else(|| NetError::UnknownNode(node.to_string()))? {
            Node::Place(p) => Ok(self.p_in[p].iter().map(|&t| self.transitions[t].as_str()).collect()),
            Node::Transition(t) => Ok(self.t_in[t].iter().map(|&p| self.places[p].as_str()).collect()),
        }
    }

    /// Targets of the arcs leaving `node`, sorted.
    pub fn postset(&self, node: &str) -> Result<Vec<&str>, NetError> {
        match self.node(node).ok_or_else(|| NetError::UnknownNode(node.to_string()))? {
            Node::Place(p) => Ok(self.p_out[p].iter().map(|&t| self.transitions[t].as_str()).collect()),
            Node::Transition(t) => Ok(self.t_out[t].iter().map(|&p| self.places[p].as_str()).collect()),
        }
    }

    /// Input place indices of transition `t`.
    pub fn inputs(&self, t: usize) -> &[usize] {
        &self.t_in[t]
    }

    /// Output place indices of transition `t`.
    pub fn outputs(&self, t: usize) -> &[usize] {
        &self.t_out[t]
    }

    /// Indices of transitions producing into place `p`.
    pub fn producers(&self, p: usize) -> &[usize] {
        &self.p_in[p]
    }

    /// Indices of transitions consuming from place `p`.
    pub fn consumers(&self, p: usize) -> &[usize] {
        &self.p_out[p]
    }

    pub fn is_enabled(&self, m: &Marking, t: usize) -> bool {
        self.t_in[t].iter().all(|&p| m.get(p) >= 1)
    }

    /// Indices of the transitions enabled in `m`.
    pub fn enabled_indices(&self, m: &Marking) -> Vec<usize> {
        (0..self.transitions.len()).filter(|&t| self.is_enabled(m, t)).collect()
    }

    /// Identifiers of the transitions enabled in `m`, sorted.
    pub fn enabled(&self, m: &Marking) -> Vec<&str> {
        self.enabled_indices(m).into_iter().map(|t| self.transitions[t].as_str()).collect()
    }

    /// Fires transition index `t`, or returns `None` when it is not enabled.
    pub fn fire_index(&self, m: &Marking, t: usize) -> Option<Marking> {
        if !self.is_enabled(m, t) {
            return None;
        }
        let mut next = m.clone();
        for &p in &self.t_in[t] {
            next.remove_token(p);
        }
        for &p in &self.t_out[t] {
            next.add_token(p);
        }
        Some(next)
    }

    pub fn fire(&self, m: &Marking, t: &str) -> Result<Marking, NetError> {
        let idx = self.transition_index(t).ok_or_else(|| NetError::UnknownTransition(t.to_string()))?;
        self.fire_index(m, idx).ok_or_else(|| NetError::NotEnabled(t.to_string()))
    }

    /// Replays `seq` from `start`.
    pub fn replay_from<S: AsRef<str>>(&self, start: &Marking, seq: &[S]) -> ReplayOutcome {
        let mut m = start.clone();
        for (index, step) in seq.iter().enumerate() {
            let next = self
                .transition_index(step.as_ref())
                .and_then(|t| self.fire_index(&m, t));
            match next {
                Some(n) => m = n,
                None => return ReplayOutcome::Blocked { index },
            }
        }
        ReplayOutcome::Completed(m)
    }

    /// A marking with one token on each listed place.
    pub fn marking_of<S: AsRef<str>>(&self, places: &[S]) -> Result<Marking, NetError> {
        let mut m = Marking::empty(self.places.len());
        for p in places {
            let idx = self.place_index(p.as_ref()).ok_or_else(|| NetError::UnknownNode(p.as_ref().to_string()))?;
            m.add_token(idx);
        }
        Ok(m)
    }

    /// Renders a marking as `{p4, p5}`, with `:n` suffixes for counts above one.
    pub fn format_marking(&self, m: &Marking) -> String {
        let parts: Vec<String> = m
            .support()
            .map(|(p, n)| {
                if n == 1 {
                    self.places[p].clone()
                } else {
                    format!("{}:{}", self.places[p], n)
                }
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Checks the Workflow-net conditions: a unique place with an empty preset,
/// a unique place with an empty postset, and every node on a directed path
/// between them. An empty result means the net is a Workflow net.
pub fn validate_structure(net: &PetriNet) -> Vec<Violation> {
    let mut out = Vec::new();
    if net.places.is_empty() {
        out.push(Violation::NoPlaces);
    }
    if net.transitions.is_empty() {
        out.push(Violation::NoTransitions);
    }
    // an isolated place is reported as off-path rather than as an extra source and sink
    let isolated = |p: usize| net.p_in[p].is_empty() && net.p_out[p].is_empty();
    let sources: Vec<usize> = (0..net.places.len()).filter(|&p| net.p_in[p].is_empty() && !isolated(p)).collect();
    let sinks: Vec<usize> = (0..net.places.len()).filter(|&p| net.p_out[p].is_empty() && !isolated(p)).collect();
    let names = |v: &[usize]| v.iter().map(|&p| net.places[p].clone()).collect::<Vec<_>>();
    match sources.len() {
        0 => out.push(Violation::NoSource),
        1 => {}
        _ => out.push(Violation::MultipleSources(names(&sources))),
    }
    match sinks.len() {
        0 => out.push(Violation::NoSink),
        1 => {}
        _ => out.push(Violation::MultipleSinks(names(&sinks))),
    }
    if sources.len() == 1 && sinks.len() == 1 {
        let fwd = reachable_nodes(net, Node::Place(sources[0]), true);
        let bwd = reachable_nodes(net, Node::Place(sinks[0]), false);
        let all = (0..net.places.len())
            .map(Node::Place)
            .chain((0..net.transitions.len()).map(Node::Transition));
        let mut off: Vec<String> = all
            .filter(|n| !(fwd.contains(n) && bwd.contains(n)))
            .map(|n| match n {
                Node::Place(p) => net.places[p].clone(),
                Node::Transition(t) => net.transitions[t].clone(),
            })
            .collect();
        off.sort();
        out.extend(off.into_iter().map(Violation::NotOnPath));
    }
    out
}

fn reachable_nodes(net: &PetriNet, start: Node, forward: bool) -> BTreeSet<Node> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        let next: Vec<Node> = match (n, forward) {
            (Node::Place(p), true) => net.p_out[p].iter().map(|&t| Node::Transition(t)).collect(),
            (Node::Place(p), false) => net.p_in[p].iter().map(|&t| Node::Transition(t)).collect(),
            (Node::Transition(t), true) => net.t_out[t].iter().map(|&p| Node::Place(p)).collect(),
            (Node::Transition(t), false) => net.t_in[t].iter().map(|&p| Node::Place(p)).collect(),
        };
        for m in next {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    seen
}

/// A Petri net that satisfies the Workflow-net conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowNet {
    net: PetriNet,
    source: usize,
    sink: usize,
}

impl WorkflowNet {
    pub fn new(net: PetriNet) -> Result<Self, NetError> {
        let violations = validate_structure(&net);
        if !violations.is_empty() {
            return Err(NetError::Structure(violations));
        }
        let source = (0..net.places.len()).find(|&p| net.p_in[p].is_empty()).expect("validated");
        let sink = (0..net.places.len()).find(|&p| net.p_out[p].is_empty()).expect("validated");
        Ok(WorkflowNet { net, source, sink })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn source_id(&self) -> &str {
        &self.net.places[self.source]
    }

    pub fn sink_id(&self) -> &str {
        &self.net.places[self.sink]
    }

    pub fn as_petri_net(&self) -> &PetriNet {
        &self.net
    }

    pub fn into_petri_net(self) -> PetriNet {
        self.net
    }

    /// One token on the source place.
    pub fn initial_marking(&self) -> Marking {
        let mut m = Marking::empty(self.net.places.len());
        m.add_token(self.source);
        m
    }

    /// One token on the sink place.
    pub fn final_marking(&self) -> Marking {
        let mut m = Marking::empty(self.net.places.len());
        m.add_token(self.sink);
        m
    }

    /// Replays `seq` from the initial marking.
    pub fn replay<S: AsRef<str>>(&self, seq: &[S]) -> ReplayOutcome {
        self.net.replay_from(&self.initial_marking(), seq)
    }

    /// Whether `seq` leads from the initial to the final marking.
    pub fn is_run<S: AsRef<str>>(&self, seq: &[S]) -> bool {
        matches!(self.replay(seq), ReplayOutcome::Completed(m) if m == self.final_marking())
    }
}

impl Deref for WorkflowNet {
    type Target = PetriNet;

    fn deref(&self) -> &PetriNet {
        &self.net
    }
}

impl fmt::Display for WorkflowNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Workflow net: {} places, {} transitions, {} arcs, source {}, sink {}",
            self.places.len(),
            self.transitions.len(),
            self.arc_count,
            self.source_id(),
            self.sink_id()
        )
    }
}
