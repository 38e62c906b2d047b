//! Reachability automata, safety and soundness.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automata::Fsa;
use crate::net::{Marking, WorkflowNet};

pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    /// Firing `path` from the initial marking puts a second token on some place.
    #[error("net is not safe: {marking} is reachable via {}", path.join(" "))]
    Unsafe { marking: String, path: Vec<String> },
    #[error("state space exceeds the limit of {limit} markings")]
    StateLimit { limit: usize },
}

/// The reachability graph read as a DFA over transition identifiers, with the
/// final marking as the only accepting state.
#[derive(Debug, Clone)]
pub struct ReachabilityFsa {
    fsa: Fsa,
    markings: Vec<Marking>,
    // (predecessor, transition) on a BFS tree; the root points to itself
    parent: Vec<(u32, u32)>,
}

impl ReachabilityFsa {
    pub fn fsa(&self) -> &Fsa {
        &self.fsa
    }

    pub fn into_fsa(self) -> Fsa {
        self.fsa
    }

    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    pub fn state_count(&self) -> usize {
        self.markings.len()
    }

    pub fn edge_count(&self) -> usize {
        self.fsa.edge_count()
    }

    pub fn state_of(&self, m: &Marking) -> Option<usize> {
        self.markings.iter().position(|x| x == m)
    }

    /// A shortest firing sequence from the initial marking to state `q`.
    pub fn path_to(&self, q: usize) -> Vec<String> {
        trace_back(&self.parent, self.fsa.alphabet(), q)
    }

    pub fn to_dot(&self) -> String {
        self.fsa.to_dot()
    }
}

/// Breadth-first closure of the firing rule from the initial marking.
///
/// Fails as soon as a marking with two tokens on a place is produced, or when
/// more than `limit` markings have been discovered.
pub fn explore(net: &WorkflowNet, limit: usize) -> Result<ReachabilityFsa, ExploreError> {
    let init = net.initial_marking();
    let mut index: HashMap<Marking, u32> = HashMap::from([(init.clone(), 0)]);
    let mut markings = vec![init];
    let mut parent = vec![(0u32, 0u32)];
    let mut delta: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut i = 0;
    while i < markings.len() {
        let m = markings[i].clone();
        let mut row = Vec::new();
        for t in net.enabled_indices(&m) {
            let next = net.fire_index(&m, t).expect("enabled");
            if next.max_count() > 1 {
                let mut path = trace_back(&parent, net.transitions(), i);
                path.push(net.transitions()[t].clone());
                return Err(ExploreError::Unsafe { marking: net.format_marking(&next), path });
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if markings.len() >= limit {
                        return Err(ExploreError::StateLimit { limit });
                    }
                    let id = markings.len() as u32;
                    index.insert(next.clone(), id);
                    markings.push(next);
                    parent.push((i as u32, t as u32));
                    id
                }
            };
            row.push((t as u32, id));
        }
        delta.push(row);
        i += 1;
    }
    let final_marking = net.final_marking();
    let accepting = markings.iter().map(|m| *m == final_marking).collect();
    let labels = markings.iter().map(|m| net.format_marking(m)).collect();
    let fsa = Fsa::from_rows(net.transitions().to_vec(), delta, 0, accepting).with_labels(labels);
    Ok(ReachabilityFsa { fsa, markings, parent })
}

fn trace_back(parent: &[(u32, u32)], names: &[String], q: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = q;
    while parent[cur].0 as usize != cur {
        let (prev, t) = parent[cur];
        out.push(names[t as usize].clone());
        cur = prev as usize;
    }
    out.reverse();
    out
}

/// A counterexample attached to a failed soundness property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A marking with a place holding more than one token, and how to reach it.
    Unsafe { marking: String, path: Vec<String> },
    /// A reachable marking from which the final marking cannot be reached.
    NoOptionToComplete { marking: String, path: Vec<String> },
    /// A reachable marking that marks the sink together with other places.
    ImproperCompletion { marking: String, path: Vec<String> },
    /// A transition that no reachable marking enables.
    DeadTransition { transition: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Unsafe { marking, path } => write!(f, "unsafe marking {marking} after [{}]", path.join(" ")),
            Witness::NoOptionToComplete { marking, path } => {
                write!(f, "final marking unreachable from {marking} (reached by [{}])", path.join(" "))
            }
            Witness::ImproperCompletion { marking, path } => {
                write!(f, "sink marked with leftover tokens in {marking} (reached by [{}])", path.join(" "))
            }
            Witness::DeadTransition { transition } => write!(f, "transition {transition} can never fire"),
        }
    }
}

/// Safety and the three soundness properties, each with counterexamples.
///
/// For an unsafe net only `safe` is evaluated; the soundness flags are then
/// reported as false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub safe: bool,
    pub option_to_complete: bool,
    pub proper_completion: bool,
    pub no_dead_transitions: bool,
    pub witnesses: Vec<Witness>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.option_to_complete && self.proper_completion && self.no_dead_transitions
    }

    pub fn is_safe_and_sound(&self) -> bool {
        self.safe && self.is_sound()
    }

    pub(crate) fn unsafe_net(marking: String, path: Vec<String>) -> Self {
        SoundnessReport {
            safe: false,
            option_to_complete: false,
            proper_completion: false,
            no_dead_transitions: false,
            witnesses: vec![Witness::Unsafe { marking, path }],
        }
    }

    /// Names of the failed properties.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.safe {
            out.push("safety");
            return out;
        }
        if !self.option_to_complete {
            out.push("option to complete");
        }
        if !self.proper_completion {
            out.push("proper completion");
        }
        if !self.no_dead_transitions {
            out.push("no dead transitions");
        }
        out
    }
}

/// Decides the soundness properties on an explored (hence safe) state space.
pub fn check_soundness(net: &WorkflowNet, rfsa: &ReachabilityFsa) -> SoundnessReport {
    let fsa = rfsa.fsa();
    let n = fsa.state_count();
    let dist = fsa.distance_to_accept();
    let mut witnesses = Vec::new();

    let stuck: Vec<usize> = (0..n).filter(|&q| dist[q] == usize::MAX).collect();
    // prefer a deadlock as the witness; fall back to any non-completing marking
    if let Some(&q) = stuck.iter().find(|&&q| fsa.edges(q).next().is_none()).or(stuck.first()) {
        witnesses.push(Witness::NoOptionToComplete {
            marking: net.format_marking(&rfsa.markings[q]),
            path: rfsa.path_to(q),
        });
    }
    let final_marking = net.final_marking();
    let improper = (0..n).find(|&q| {
        let m = &rfsa.markings[q];
        m.get(net.sink()) > 0 && *m != final_marking
    });
    if let Some(q) = improper {
        witnesses.push(Witness::ImproperCompletion {
            marking: net.format_marking(&rfsa.markings[q]),
            path: rfsa.path_to(q),
        });
    }
    let mut fired = vec![false; net.transitions().len()];
    for q in 0..n {
        for (t, _) in fsa.edges(q) {
            fired[t] = true;
        }
    }
    let dead: Vec<usize> = (0..fired.len()).filter(|&t| !fired[t]).collect();
    for &t in &dead {
        witnesses.push(Witness::DeadTransition { transition: net.transitions()[t].clone() });
    }
    SoundnessReport {
        safe: true,
        option_to_complete: stuck.is_empty(),
        proper_completion: improper.is_none(),
        no_dead_transitions: dead.is_empty(),
        witnesses,
    }
}

/// Explores the net and checks soundness. Unsafety becomes part of the report;
/// only the state limit is an error.
pub fn analyze(net: &WorkflowNet, limit: usize) -> Result<SoundnessReport, ExploreError> {
    match explore(net, limit) {
        Ok(r) => Ok(check_soundness(net, &r)),
        Err(ExploreError::Unsafe { marking, path }) => Ok(SoundnessReport::unsafe_net(marking, path)),
        Err(e) => Err(e),
    }
}

/// All runs of length at most `max_len` accepted by the reachability automaton.
pub fn language_sample(rfsa: &ReachabilityFsa, max_len: usize) -> Vec<Vec<String>> {
    rfsa.fsa().accepted_strings(max_len)
}
