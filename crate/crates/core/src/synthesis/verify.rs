use thiserror::Error;

use super::DeclareSpec;
use crate::automata::{constraint_fsa, product_all_bounded, EquivalenceWitness, Fsa, FsaError};
use crate::net::WorkflowNet;
use crate::statespace::{explore, ExploreError, DEFAULT_STATE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("alphabet mismatch: only in net [{}], only in specification [{}]", net_only.join(", "), spec_only.join(", "))]
    AlphabetMismatch { net_only: Vec<String>, spec_only: Vec<String> },
    #[error("net is not safe: {marking} is reachable via {}", path.join(" "))]
    Unsafe { marking: String, path: Vec<String> },
    #[error("state space exceeds the limit of {limit} states")]
    StateLimit { limit: usize },
}

impl From<ExploreError> for VerifyError {
    fn from(e: ExploreError) -> Self {
        match e {
            ExploreError::Unsafe { marking, path } => VerifyError::Unsafe { marking, path },
            ExploreError::StateLimit { limit } => VerifyError::StateLimit { limit },
        }
    }
}

/// How equivalence is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Enumerate the reachability automaton and the specification automaton.
    #[default]
    Explicit,
    /// Reason over sets of configurations encoded as BDDs.
    Symbolic,
    /// Explicit first, symbolic once the state limit is hit.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub engine: Engine,
    /// Bound on the number of states of each explicit automaton.
    pub state_limit: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { engine: Engine::Explicit, state_limit: DEFAULT_STATE_LIMIT }
    }
}

/// The specification automaton: product of all constraint automata, with dead
/// component states pruned during construction, then trimmed.
pub fn spec_fsa(spec: &DeclareSpec) -> Fsa {
    spec_fsa_bounded(spec, usize::MAX).expect("no limit")
}

pub fn spec_fsa_bounded(spec: &DeclareSpec, limit: usize) -> Result<Fsa, VerifyError> {
    let parts: Vec<Fsa> = spec
        .constraints()
        .iter()
        .map(|c| constraint_fsa(c, spec.alphabet()).expect("constraints are over the alphabet"))
        .collect();
    if parts.is_empty() {
        return Ok(universal(spec.alphabet()));
    }
    let refs: Vec<&Fsa> = parts.iter().collect();
    product_all_bounded(&refs, true, limit).map_err(|e| match e {
        FsaError::StateLimit { limit } => VerifyError::StateLimit { limit },
        other => unreachable!("{other}"),
    })
}

/// The specification automaton built as a left fold of binary products,
/// trimming after each step.
pub fn spec_fsa_fold(spec: &DeclareSpec) -> Fsa {
    spec.constraints()
        .iter()
        .map(|c| constraint_fsa(c, spec.alphabet()).expect("constraints are over the alphabet"))
        .fold(universal(spec.alphabet()), |acc, f| acc.product(&f).expect("same alphabet").trim())
}

fn universal(alphabet: &[String]) -> Fsa {
    let trans: Vec<(usize, &str, usize)> = alphabet.iter().map(|a| (0, a.as_str(), 0)).collect();
    Fsa::new(&alphabet.iter().map(String::as_str).collect::<Vec<_>>(), 1, 0, &[0], &trans).expect("well-formed")
}

fn check_alphabets(net: &WorkflowNet, spec: &DeclareSpec) -> Result<(), VerifyError> {
    if net.transitions() == spec.alphabet() {
        return Ok(());
    }
    let net_only = net.transitions().iter().filter(|t| !spec.alphabet().contains(t)).cloned().collect();
    let spec_only = spec.alphabet().iter().filter(|t| !net.transitions().contains(t)).cloned().collect();
    Err(VerifyError::AlphabetMismatch { net_only, spec_only })
}

/// Decides whether the runs of `net` are exactly the traces accepted by `spec`.
/// A distinguishing witness is accepted by the net when `left_accepts` holds.
pub fn verify_equivalence(net: &WorkflowNet, spec: &DeclareSpec, opts: &VerifyOptions) -> Result<EquivalenceWitness, VerifyError> {
    check_alphabets(net, spec)?;
    match opts.engine {
        Engine::Explicit => explicit(net, spec, opts.state_limit),
        Engine::Symbolic => crate::symbolic::verify_equivalence(net, spec),
        Engine::Auto => match explicit(net, spec, opts.state_limit) {
            Err(VerifyError::StateLimit { .. }) => crate::symbolic::verify_equivalence(net, spec),
            other => other,
        },
    }
}

fn explicit(net: &WorkflowNet, spec: &DeclareSpec, limit: usize) -> Result<EquivalenceWitness, VerifyError> {
    let rfsa = explore(net, limit)?;
    let sfsa = spec_fsa_bounded(spec, limit)?;
    Ok(rfsa.fsa().equivalent(&sfsa).expect("alphabets were checked"))
}
