//! Benchmark nets grown around a fixed pivot transition, and a timing harness.
//!
//! One constraint-count iteration rewrites `b1 -> pivot -> b2` (`b1`, `b2`
//! being the current boundary places) as follows:
//!
//! 1. sequential: `b1 -> t_s -> q1 -> pivot -> q2 -> t_e -> b2`;
//! 2. parallel: a branch `t_s -> r1 -> t_p -> r2 -> t_e`;
//! 3. conditional: a bypass `b1 -> t_c -> b2`;
//! 4. loop: `t_s` now consumes from a buffer `l1` and `t_e` produces into `l2`,
//!    with `b1 -> t_i -> l1`, `l2 -> t_o -> b2` and a loop-back `l2 -> t_l -> l1`.
//!
//! Afterwards `q1` and `q2` are the new boundary. Every iteration adds six
//! places, seven transitions and sixteen arcs.

mod alloc;
mod harness;

pub use alloc::{MemoryMeter, PeakAlloc};
pub use harness::{
    audit, linear_fit, run_benchmark, write_csv, Audit, BenchError, BenchMode, BenchOptions, BenchRecord, BenchSeries,
    FitError, LinearFit,
};

use crate::net::{PetriNet, WorkflowNet};

/// A growing net together with its pivot and boundary places.
#[derive(Debug, Clone)]
pub struct ExpansionState {
    net: WorkflowNet,
    pivot: String,
    boundary: (String, String),
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<(String, String)>,
    next_place: usize,
    next_transition: usize,
}

impl ExpansionState {
    /// The single-transition net `p1 -> t1 -> p2` with pivot `t1`.
    pub fn base() -> Self {
        let places = vec!["p1".to_string(), "p2".to_string()];
        let transitions = vec!["t1".to_string()];
        let arcs = vec![("p1".to_string(), "t1".to_string()), ("t1".to_string(), "p2".to_string())];
        ExpansionState {
            net: build(&places, &transitions, &arcs).expect("base net is a Workflow net"),
            pivot: "t1".into(),
            boundary: ("p1".into(), "p2".into()),
            places,
            transitions,
            arcs,
            next_place: 1,
            next_transition: 1,
        }
    }

    /// The base net after one sequential step: `p1 -> t_s -> q1 -> t1 -> q2 -> t_e -> p2`,
    /// with `q1`, `q2` as boundary.
    pub fn sequential_base() -> Self {
        let mut s = Self::base();
        s.sequential();
        s.rebuild();
        s
    }

    pub fn net(&self) -> &WorkflowNet {
        &self.net
    }

    pub fn pivot(&self) -> &str {
        &self.pivot
    }

    /// The places feeding and fed by the pivot.
    pub fn boundary(&self) -> (&str, &str) {
        (&self.boundary.0, &self.boundary.1)
    }

    fn fresh_place(&mut self) -> String {
        let id = format!("p_gen_{}", self.next_place);
        self.next_place += 1;
        self.places.push(id.clone());
        id
    }

    fn fresh_transition(&mut self) -> String {
        let id = format!("t_gen_{}", self.next_transition);
        self.next_transition += 1;
        self.transitions.push(id.clone());
        id
    }

    fn arc(&mut self, from: &str, to: &str) {
        self.arcs.push((from.to_string(), to.to_string()));
    }

    fn retarget(&mut self, old: (&str, &str), new: (&str, &str)) {
        let a = self.arcs.iter_mut().find(|(f, t)| f == old.0 && t == old.1).expect("arc exists");
        *a = (new.0.to_string(), new.1.to_string());
    }

    fn rebuild(&mut self) {
        self.net = build(&self.places, &self.transitions, &self.arcs).expect("expansion preserves the Workflow-net shape");
    }

    /// Returns the flanking transitions `(t_s, t_e)`.
    fn sequential(&mut self) -> (String, String) {
        let (b1, b2) = self.boundary.clone();
        let pivot = self.pivot.clone();
        let q1 = self.fresh_place();
        let q2 = self.fresh_place();
        let ts = self.fresh_transition();
        let te = self.fresh_transition();
        self.retarget((&b1, &pivot), (&q1, &pivot));
        self.retarget((&pivot, &b2), (&pivot, &q2));
        self.arc(&b1, &ts);
        self.arc(&ts, &q1);
        self.arc(&q2, &te);
        self.arc(&te, &b2);
        self.boundary = (q1, q2);
        (ts, te)
    }

    /// One full iteration of the four rules.
    pub fn expand_iteration(mut self) -> Self {
        let (b1, b2) = self.boundary.clone();
        let (ts, te) = self.sequential();

        let r1 = self.fresh_place();
        let r2 = self.fresh_place();
        let tp = self.fresh_transition();
        self.arc(&ts, &r1);
        self.arc(&r1, &tp);
        self.arc(&tp, &r2);
        self.arc(&r2, &te);

        let tc = self.fresh_transition();
        self.arc(&b1, &tc);
        self.arc(&tc, &b2);

        let l1 = self.fresh_place();
        let l2 = self.fresh_place();
        let ti = self.fresh_transition();
        let to = self.fresh_transition();
        let tl = self.fresh_transition();
        self.retarget((&b1, &ts), (&l1, &ts));
        self.retarget((&te, &b2), (&te, &l2));
        self.arc(&b1, &ti);
        self.arc(&ti, &l1);
        self.arc(&l2, &to);
        self.arc(&to, &b2);
        self.arc(&l2, &tl);
        self.arc(&tl, &l1);

        self.rebuild();
        self
    }

    /// Adds `times` alternatives to the pivot, each with the pivot's exact
    /// preset and postset.
    pub fn expand_conditional(mut self, times: usize) -> Self {
        let pre: Vec<String> = self.net.preset(&self.pivot).expect("pivot exists").into_iter().map(String::from).collect();
        let post: Vec<String> = self.net.postset(&self.pivot).expect("pivot exists").into_iter().map(String::from).collect();
        for _ in 0..times {
            let t = self.fresh_transition();
            for p in &pre {
                self.arc(p, &t);
            }
            for p in &post {
                self.arc(&t, p);
            }
        }
        self.rebuild();
        self
    }
}

fn build(places: &[String], transitions: &[String], arcs: &[(String, String)]) -> Option<WorkflowNet> {
    let net = PetriNet::new(places.iter().cloned(), transitions.iter().cloned(), arcs.iter().map(|(a, b)| (a, b))).ok()?;
    WorkflowNet::new(net).ok()
}
