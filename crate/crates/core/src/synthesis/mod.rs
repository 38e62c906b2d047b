//! From a safe and sound Workflow net to a Declare specification.
//!
//! Each place contributes exactly one constraint, chosen by its neighbourhood:
//!
//! * producers and consumers both present: `AlternatePrecedence(producers, consumers)`;
//! * no producers (the source): `AtMostOne(consumers)`;
//! * no consumers (the sink): `End(producers)`.
//!
//! The resulting specification accepts exactly the runs of the net. This is
//! checked mechanically by [`verify_equivalence`].

mod format;
mod verify;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ltlf::{Constraint, Formula};
use crate::net::WorkflowNet;
use crate::statespace::SoundnessReport;

pub use format::{parse_spec, serialize, SpecFormat, SpecFormatError};
pub use verify::{spec_fsa, spec_fsa_bounded, spec_fsa_fold, verify_equivalence, Engine, VerifyError, VerifyOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("refusing to synthesize: the net violates {}", .0.join(", "))]
    Refused(Vec<&'static str>),
    #[error("constraint mentions `{0}`, which is not in the alphabet")]
    UnknownSymbol(String),
}

/// An alphabet together with an ordered list of constraints over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclareSpec {
    alphabet: Vec<String>,
    constraints: Vec<Constraint>,
}

impl DeclareSpec {
    pub fn new<S: AsRef<str>>(alphabet: &[S], constraints: Vec<Constraint>) -> Result<Self, SynthesisError> {
        let alphabet: BTreeSet<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        for c in &constraints {
            if let Some(s) = c.symbols().into_iter().find(|s| !alphabet.contains(*s)) {
                return Err(SynthesisError::UnknownSymbol(s.to_string()));
            }
        }
        Ok(DeclareSpec { alphabet: alphabet.into_iter().collect(), constraints })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Sum of parameter-set sizes over all constraints.
    pub fn literal_count(&self) -> usize {
        self.constraints.iter().map(Constraint::literal_count).sum()
    }

    /// Conjunction of the constraint formulas, in constraint order.
    pub fn formula(&self) -> Formula {
        Formula::all_of(self.constraints.iter().map(Constraint::formula))
    }

    /// The same specification without the constraint at `index`.
    pub fn without(&self, index: usize) -> DeclareSpec {
        let mut constraints = self.constraints.clone();
        constraints.remove(index);
        DeclareSpec { alphabet: self.alphabet.clone(), constraints }
    }

    /// Whether `trace` satisfies every constraint.
    pub fn accepts<S: AsRef<str>>(&self, trace: &[S]) -> bool {
        self.constraints.iter().all(|c| crate::ltlf::satisfies(trace, &c.formula()))
    }

    /// Constraints violated by `trace`.
    pub fn violated_by<S: AsRef<str>>(&self, trace: &[S]) -> Vec<&Constraint> {
        self.constraints.iter().filter(|c| !crate::ltlf::satisfies(trace, &c.formula())).collect()
    }
}

/// Synthesizes the specification of a net already known to be safe and sound.
///
/// The report must come from an analysis of `net`; any failed property makes
/// this a refusal.
pub fn synthesize(net: &WorkflowNet, report: &SoundnessReport) -> Result<DeclareSpec, SynthesisError> {
    if !report.is_safe_and_sound() {
        return Err(SynthesisError::Refused(report.failures()));
    }
    Ok(synthesize_unchecked(net))
}

/// Applies the per-place rules without looking at safety or soundness.
pub fn synthesize_unchecked(net: &WorkflowNet) -> DeclareSpec {
    let names = |ids: &[usize]| ids.iter().map(|&t| net.transitions()[t].as_str()).collect::<Vec<_>>();
    let constraints = (0..net.places().len())
        .map(|p| {
            let pre = names(net.producers(p));
            let post = names(net.consumers(p));
            if !pre.is_empty() && !post.is_empty() {
                Constraint::alt_prec(pre, post)
            } else if pre.is_empty() {
                Constraint::at_most_one(post)
            } else {
                Constraint::end(pre)
            }
            .expect("places of a Workflow net have a producer or a consumer")
        })
        .collect();
    DeclareSpec { alphabet: net.transitions().to_vec(), constraints }
}
