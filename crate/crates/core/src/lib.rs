//! Workflow nets to Declare specifications.
//!
//! The crate is organised bottom-up:
//!
//! * [`net`] holds the Petri/Workflow net model, firing semantics and PNML input.
//! * [`statespace`] explores reachable markings and decides safety and soundness.
//! * [`ltlf`] is a finite-trace LTL evaluator with past operators plus the three
//!   Declare templates used here.
//! * [`automata`] is a small DFA toolkit with direct template automata.
//! * [`synthesis`] maps each place of a net to one constraint and checks that
//!   the resulting specification accepts exactly the runs of the net.
//! * [`symbolic`] is a BDD-based engine for nets whose state spaces are too
//!   large to enumerate.
//! * [`conformance`] replays event logs against a specification.
//! * [`benchgen`] grows nets with soundness-preserving rewrites and times synthesis.

pub mod automata;
pub mod benchgen;
pub mod conformance;
pub mod ltlf;
pub mod net;
pub mod statespace;
pub mod symbolic;
pub mod synthesis;

pub use automata::{EquivalenceWitness, Fsa};
pub use ltlf::{Constraint, Formula, Template};
pub use net::{Marking, PetriNet, WorkflowNet};
pub use statespace::{ReachabilityFsa, SoundnessReport};
pub use synthesis::DeclareSpec;

