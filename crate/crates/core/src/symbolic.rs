//! BDD-based analysis for safe nets whose state spaces are too large to enumerate.
//!
//! A safe marking is a bit vector with one variable per place. Specification
//! states use one variable per constraint: the armed flag of an
//! `AlternatePrecedence`, the seen flag of an `AtMostOne`, and for `End`
//! whether the last symbol was in its parameter set. Trap states are not
//! encoded; a step into a trap is simply a step without successor.
//!
//! Every transition sets the variables it touches to constants, so images
//! and pre-images are cube operations and no primed copy of the variables is
//! needed. Variables are ordered by a natural sort of the place identifiers,
//! with each constraint placed right after the place it was derived from.

use std::cmp::Ordering;

use biodivine_lib_bdd::{Bdd, BddPartialValuation, BddValuation, BddVariable, BddVariableSet, BddVariableSetBuilder};

use crate::automata::EquivalenceWitness;
use crate::ltlf::{Constraint, Template};
use crate::net::{Marking, WorkflowNet};
use crate::statespace::{SoundnessReport, Witness};
use crate::synthesis::{synthesize_unchecked, DeclareSpec, VerifyError};

/// Soundness report plus the size of the reachable set.
#[derive(Debug, Clone)]
pub struct SymbolicAnalysis {
    pub report: SoundnessReport,
    /// Number of reachable markings (exact up to `f64` precision).
    pub reachable_markings: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Chunk {
    Num(u64),
    Text(String),
}

fn natural_key(s: &str) -> Vec<Chunk> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut digits = false;
    let flush = |cur: &mut String, digits: bool, out: &mut Vec<Chunk>| {
        if cur.is_empty() {
            return;
        }
        let chunk = match (digits, cur.parse::<u64>()) {
            (true, Ok(n)) => Chunk::Num(n),
            _ => Chunk::Text(cur.clone()),
        };
        out.push(chunk);
        cur.clear();
    };
    for c in s.chars() {
        if c.is_ascii_digit() != digits {
            flush(&mut cur, digits, &mut out);
            digits = c.is_ascii_digit();
        }
        cur.push(c);
    }
    flush(&mut cur, digits, &mut out);
    out
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    natural_key(a).cmp(&natural_key(b)).then_with(|| a.cmp(b))
}

/// A step that requires `guard`, then overwrites the variables of `assign`.
struct Rule {
    guard: Bdd,
    assign: Bdd,
    assign_values: BddPartialValuation,
    changed: Vec<BddVariable>,
}

impl Rule {
    fn new(vars: &BddVariableSet, guard: &[(BddVariable, bool)], assign: &[(BddVariable, bool)]) -> Self {
        let assign_values = BddPartialValuation::from_values(assign);
        Rule {
            guard: vars.mk_conjunctive_clause(&BddPartialValuation::from_values(guard)),
            assign: vars.mk_conjunctive_clause(&assign_values),
            assign_values,
            changed: assign.iter().map(|(v, _)| *v).collect(),
        }
    }

    fn image(&self, s: &Bdd) -> Bdd {
        let enabled = s.and(&self.guard);
        if enabled.is_false() {
            return enabled;
        }
        enabled.exists(&self.changed).and(&self.assign)
    }

    fn preimage(&self, s: &Bdd) -> Bdd {
        s.restrict_valuation(&self.assign_values).and(&self.guard)
    }
}

/// Least fixpoint of `init` under all rules, applying each rule to the
/// growing set in turn.
fn forward(init: &Bdd, rules: &[Rule]) -> Bdd {
    let mut reach = init.clone();
    loop {
        let before = reach.clone();
        for r in rules {
            let img = r.image(&reach);
            if !img.is_false() {
                reach = reach.or(&img);
            }
        }
        if reach == before {
            return reach;
        }
    }
}

/// States of `within` that can reach `target` inside `within`.
fn backward(target: &Bdd, rules: &[Rule], within: &Bdd) -> Bdd {
    let mut set = target.and(within);
    loop {
        let before = set.clone();
        for r in rules {
            let pre = r.preimage(&set).and(within);
            if !pre.is_false() {
                set = set.or(&pre);
            }
        }
        if set == before {
            return set;
        }
    }
}

/// Cumulative backward layers: entry `j` holds the states of `within` that
/// reach `target` in at most `j` steps.
fn backward_layers(target: &Bdd, rules: &[Rule], within: &Bdd) -> Vec<Bdd> {
    let mut layers = vec![target.and(within)];
    loop {
        let last = layers.last().unwrap();
        let mut next = last.clone();
        for r in rules {
            next = next.or(&r.preimage(last).and(within));
        }
        if &next == last {
            return layers;
        }
        layers.push(next);
    }
}

fn single(set: &Bdd) -> Bdd {
    Bdd::from(set.sat_witness().expect("non-empty set"))
}

/// Breadth-first layers from `init` until `found` reports a non-empty subset
/// of the current layer. Returns the layers and that subset.
fn bfs_until(init: &Bdd, rules: &[Rule], mut found: impl FnMut(&Bdd) -> Option<Bdd>) -> Option<(Vec<Bdd>, Bdd)> {
    let mut layers = vec![init.clone()];
    let mut visited = init.clone();
    loop {
        let layer = layers.last().unwrap();
        if let Some(hit) = found(layer) {
            return Some((layers, hit));
        }
        let mut next = visited.not().and(&visited); // false with the right variable count
        for r in rules {
            next = next.or(&r.image(layer));
        }
        let next = next.and_not(&visited);
        if next.is_false() {
            return None;
        }
        visited = visited.or(&next);
        layers.push(next);
    }
}

/// Rule indices leading from the initial layer to the single state `end` in the last layer.
fn backtrack(layers: &[Bdd], end: &Bdd, rules: &[Rule]) -> Vec<usize> {
    let mut cur = end.clone();
    let mut path = Vec::new();
    for j in (1..layers.len()).rev() {
        let (i, pre) = rules
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.preimage(&cur).and(&layers[j - 1])))
            .find(|(_, p)| !p.is_false())
            .expect("every layer state has a predecessor in the previous layer");
        path.push(i);
        cur = single(&pre);
    }
    path.reverse();
    path
}

/// Rule indices leading from the single state `start` into `layers[0]`.
fn descend(start: &Bdd, rules: &[Rule], layers: &[Bdd]) -> Vec<usize> {
    let mut j = layers.iter().position(|l| !l.and(start).is_false()).expect("start reaches the target");
    let mut cur = start.clone();
    let mut path = Vec::new();
    while j > 0 {
        let (i, next) = rules
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.image(&cur).and(&layers[j - 1])))
            .find(|(_, n)| !n.is_false())
            .expect("a step gets closer to the target");
        path.push(i);
        cur = single(&next);
        j -= 1;
    }
    path
}

struct Encoding<'a> {
    net: &'a WorkflowNet,
    vars: BddVariableSet,
    place_var: Vec<BddVariable>,
    cons_var: Vec<BddVariable>,
    constraints: Vec<Constraint>,
}

impl<'a> Encoding<'a> {
    fn new(net: &'a WorkflowNet, spec: Option<&DeclareSpec>) -> Self {
        let constraints: Vec<Constraint> = spec.map(|s| s.constraints().to_vec()).unwrap_or_default();
        // anchor each constraint to the place that would produce it
        let derived = synthesize_unchecked(net);
        let mut anchored: Vec<Vec<usize>> = vec![Vec::new(); net.places().len()];
        let mut loose = Vec::new();
        let mut used = vec![false; net.places().len()];
        for (ci, c) in constraints.iter().enumerate() {
            match (0..net.places().len()).find(|&p| !used[p] && &derived.constraints()[p] == c) {
                Some(p) => {
                    used[p] = true;
                    anchored[p].push(ci);
                }
                None => loose.push(ci),
            }
        }
        let mut order: Vec<usize> = (0..net.places().len()).collect();
        order.sort_by(|&a, &b| natural_cmp(&net.places()[a], &net.places()[b]));

        let mut builder = BddVariableSetBuilder::new();
        let mut place_var = vec![None; net.places().len()];
        let mut cons_var = vec![None; constraints.len()];
        for &p in &order {
            place_var[p] = Some(builder.make_variable(&format!("p{p}")));
            for &ci in &anchored[p] {
                cons_var[ci] = Some(builder.make_variable(&format!("c{ci}")));
            }
        }
        for ci in loose {
            cons_var[ci] = Some(builder.make_variable(&format!("c{ci}")));
        }
        Encoding {
            net,
            vars: builder.build(),
            place_var: place_var.into_iter().map(Option::unwrap).collect(),
            cons_var: cons_var.into_iter().map(Option::unwrap).collect(),
            constraints,
        }
    }

    fn net_guard(&self, t: usize) -> Vec<(BddVariable, bool)> {
        self.net.inputs(t).iter().map(|&p| (self.place_var[p], true)).collect()
    }

    fn net_assign(&self, t: usize) -> Vec<(BddVariable, bool)> {
        let outs = self.net.outputs(t);
        let mut a: Vec<(BddVariable, bool)> = outs.iter().map(|&p| (self.place_var[p], true)).collect();
        a.extend(self.net.inputs(t).iter().filter(|p| !outs.contains(p)).map(|&p| (self.place_var[p], false)));
        a
    }

    fn spec_guard(&self, t: usize) -> Vec<(BddVariable, bool)> {
        let sym = &self.net.transitions()[t];
        let mut g = Vec::new();
        for (ci, c) in self.constraints.iter().enumerate() {
            let v = self.cons_var[ci];
            match c.template() {
                Template::AlternatePrecedence if c.params()[1].contains(sym) => g.push((v, true)),
                Template::AtMostOne if c.params()[0].contains(sym) => g.push((v, false)),
                _ => {}
            }
        }
        g
    }

    fn spec_assign(&self, t: usize) -> Vec<(BddVariable, bool)> {
        let sym = &self.net.transitions()[t];
        let mut a = Vec::new();
        for (ci, c) in self.constraints.iter().enumerate() {
            let v = self.cons_var[ci];
            match c.template() {
                Template::AlternatePrecedence => {
                    if c.params()[0].contains(sym) {
                        a.push((v, true));
                    } else if c.params()[1].contains(sym) {
                        a.push((v, false));
                    }
                }
                Template::AtMostOne => {
                    if c.params()[0].contains(sym) {
                        a.push((v, true));
                    }
                }
                Template::End => a.push((v, c.params()[0].contains(sym))),
            }
        }
        a
    }

    fn transitions(&self) -> std::ops::Range<usize> {
        0..self.net.transitions().len()
    }

    fn net_rules(&self) -> Vec<Rule> {
        self.transitions().map(|t| Rule::new(&self.vars, &self.net_guard(t), &self.net_assign(t))).collect()
    }

    fn spec_rules(&self) -> Vec<Rule> {
        self.transitions().map(|t| Rule::new(&self.vars, &self.spec_guard(t), &self.spec_assign(t))).collect()
    }

    fn product_rules(&self) -> Vec<Rule> {
        self.transitions()
            .map(|t| {
                let mut g = self.net_guard(t);
                g.extend(self.spec_guard(t));
                let mut a = self.net_assign(t);
                a.extend(self.spec_assign(t));
                Rule::new(&self.vars, &g, &a)
            })
            .collect()
    }

    fn cube(&self, lits: &[(BddVariable, bool)]) -> Bdd {
        self.vars.mk_conjunctive_clause(&BddPartialValuation::from_values(lits))
    }

    /// Exactly one token, on `place`.
    fn only(&self, place: usize) -> Bdd {
        let lits: Vec<(BddVariable, bool)> = (0..self.place_var.len()).map(|p| (self.place_var[p], p == place)).collect();
        self.cube(&lits)
    }

    fn net_init(&self) -> Bdd {
        self.only(self.net.source())
    }

    fn net_final(&self) -> Bdd {
        self.only(self.net.sink())
    }

    fn spec_init(&self) -> Bdd {
        let lits: Vec<(BddVariable, bool)> = self.cons_var.iter().map(|&v| (v, false)).collect();
        self.cube(&lits)
    }

    fn spec_accepting(&self) -> Bdd {
        let lits: Vec<(BddVariable, bool)> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.template() == Template::End)
            .map(|(ci, _)| (self.cons_var[ci], true))
            .collect();
        self.cube(&lits)
    }

    /// Markings in which `t` is enabled and would put a second token on a place.
    fn overflow(&self, t: usize) -> Bdd {
        let ins = self.net.inputs(t);
        let mut any = self.vars.mk_false();
        for &p in self.net.outputs(t).iter().filter(|p| !ins.contains(p)) {
            any = any.or(&self.vars.mk_var(self.place_var[p]));
        }
        any.and(&self.cube(&self.net_guard(t)))
    }

    fn marking(&self, v: &BddValuation) -> Marking {
        Marking::from_counts(self.place_var.iter().map(|&x| v.value(x) as u32).collect())
    }

    fn names(&self, path: &[usize]) -> Vec<String> {
        path.iter().map(|&t| self.net.transitions()[t].clone()).collect()
    }

    fn place_vars(&self) -> &[BddVariable] {
        &self.place_var
    }

    /// Reachable markings, or an unsafe firing with a shortest path to it.
    fn reach_safe(&self, rules: &[Rule]) -> Result<Bdd, (String, Vec<String>)> {
        let init = self.net_init();
        let reach = forward(&init, rules);
        let overflows: Vec<Bdd> = self.transitions().map(|t| self.overflow(t)).collect();
        if overflows.iter().all(|o| reach.and(o).is_false()) {
            return Ok(reach);
        }
        // the fixpoint above may contain markings reached after an unsafe step;
        // redo it layer by layer and stop at the first genuine overflow
        let mut hit_t = 0;
        let (layers, hit) = bfs_until(&init, rules, |layer| {
            overflows.iter().enumerate().find_map(|(t, o)| {
                let h = layer.and(o);
                (!h.is_false()).then(|| {
                    hit_t = t;
                    h
                })
            })
        })
        .expect("an overflow exists");
        let end = single(&hit);
        let mut path = backtrack(&layers, &end, rules);
        let m = self.marking(&end.sat_witness().unwrap());
        let over = self.net.fire_index(&m, hit_t).expect("enabled");
        path.push(hit_t);
        Err((self.net.format_marking(&over), self.names(&path)))
    }
}

/// Safety and soundness of `net`, decided symbolically.
pub fn analyze(net: &WorkflowNet) -> SymbolicAnalysis {
    let enc = Encoding::new(net, None);
    let rules = enc.net_rules();
    let reach = match enc.reach_safe(&rules) {
        Ok(r) => r,
        Err((marking, path)) => {
            return SymbolicAnalysis { report: SoundnessReport::unsafe_net(marking, path), reachable_markings: f64::NAN }
        }
    };
    let init = enc.net_init();
    let fin = enc.net_final();
    let co = backward(&fin, &rules, &reach);
    let mut witnesses = Vec::new();

    let path_to = |target: &Bdd| -> (String, Vec<String>) {
        let end = single(target);
        let (layers, hit) = bfs_until(&init, &rules, |layer| {
            let h = layer.and(&end);
            (!h.is_false()).then_some(h)
        })
        .expect("target is reachable");
        let path = backtrack(&layers, &hit, &rules);
        (net.format_marking(&enc.marking(&hit.sat_witness().unwrap())), enc.names(&path))
    };

    let stuck = reach.and_not(&co);
    if !stuck.is_false() {
        let mut dead_end = stuck.clone();
        for r in &rules {
            dead_end = dead_end.and_not(&r.guard);
        }
        let target = if dead_end.is_false() { &stuck } else { &dead_end };
        let (marking, path) = path_to(target);
        witnesses.push(Witness::NoOptionToComplete { marking, path });
    }
    let improper = reach.and(&enc.vars.mk_var(enc.place_var[net.sink()])).and_not(&fin);
    if !improper.is_false() {
        let (marking, path) = path_to(&improper);
        witnesses.push(Witness::ImproperCompletion { marking, path });
    }
    let mut no_dead = true;
    for (t, r) in rules.iter().enumerate() {
        if reach.and(&r.guard).is_false() {
            no_dead = false;
            witnesses.push(Witness::DeadTransition { transition: net.transitions()[t].clone() });
        }
    }
    SymbolicAnalysis {
        report: SoundnessReport {
            safe: true,
            option_to_complete: stuck.is_false(),
            proper_completion: improper.is_false(),
            no_dead_transitions: no_dead,
            witnesses,
        },
        reachable_markings: reach.cardinality() / 2f64.powi(enc.vars.num_vars() as i32 - enc.place_vars().len() as i32),
    }
}

enum Bad {
    /// Accepting on one side only.
    Mismatch,
    /// The net can fire `t` and still complete; the specification rejects `t`.
    NetOnly(usize),
    /// The specification accepts `t` and can still reach acceptance; the net cannot fire `t`.
    SpecOnly(usize),
}

/// Language equivalence of the runs of `net` and the traces accepted by `spec`.
///
/// The net must be safe; alphabets are assumed equal.
pub fn verify_equivalence(net: &WorkflowNet, spec: &DeclareSpec) -> Result<EquivalenceWitness, VerifyError> {
    let enc = Encoding::new(net, Some(spec));
    let net_rules = enc.net_rules();
    let spec_rules = enc.spec_rules();
    let prod_rules = enc.product_rules();
    let net_reach = enc.reach_safe(&net_rules).map_err(|(marking, path)| VerifyError::Unsafe { marking, path })?;

    let net_acc = enc.net_final();
    let spec_acc = enc.spec_accepting();
    let mismatch = net_acc.xor(&spec_acc);
    let init = enc.net_init().and(&enc.spec_init());
    let reach = forward(&init, &prod_rules);

    let net_only: Vec<Bdd> = enc
        .transitions()
        .map(|t| reach.and(&net_rules[t].guard).and_not(&spec_rules[t].guard))
        .collect();
    let spec_only: Vec<Bdd> = enc
        .transitions()
        .map(|t| reach.and(&spec_rules[t].guard).and_not(&net_rules[t].guard))
        .collect();

    let co_net = if net_only.iter().any(|b| !b.is_false()) {
        Some(backward(&net_acc, &net_rules, &net_reach))
    } else {
        None
    };
    // specification states entered on a step the net cannot take
    let mut entered = enc.vars.mk_false();
    for (t, b) in spec_only.iter().enumerate() {
        if !b.is_false() {
            entered = entered.or(&spec_rules[t].image(b).exists(enc.place_vars()));
        }
    }
    let spec_fwd = forward(&entered, &spec_rules);
    let co_spec = backward(&spec_acc, &spec_rules, &spec_fwd);

    let mut bad = !reach.and(&mismatch).is_false();
    if let Some(co) = &co_net {
        bad |= net_only.iter().enumerate().any(|(t, b)| !net_rules[t].image(b).and(co).is_false());
    }
    bad |= spec_only.iter().enumerate().any(|(t, b)| !spec_rules[t].image(b).and(&co_spec).is_false());
    if !bad {
        return Ok(EquivalenceWitness::Equivalent);
    }

    // shortest distinguishing prefix over the product, then extend it to acceptance
    let co_net = co_net.unwrap_or_else(|| enc.vars.mk_false());
    let net_pre: Vec<Bdd> = net_rules.iter().map(|r| r.preimage(&co_net)).collect();
    let spec_pre: Vec<Bdd> = spec_rules.iter().map(|r| r.preimage(&co_spec)).collect();
    let mut kind = Bad::Mismatch;
    let (layers, hit) = bfs_until(&init, &prod_rules, |layer| {
        let m = layer.and(&mismatch);
        if !m.is_false() {
            kind = Bad::Mismatch;
            return Some(m);
        }
        for t in enc.transitions() {
            let a = layer.and(&net_rules[t].guard).and_not(&spec_rules[t].guard).and(&net_pre[t]);
            if !a.is_false() {
                kind = Bad::NetOnly(t);
                return Some(a);
            }
            let b = layer.and(&spec_rules[t].guard).and_not(&net_rules[t].guard).and(&spec_pre[t]);
            if !b.is_false() {
                kind = Bad::SpecOnly(t);
                return Some(b);
            }
        }
        None
    })
    .expect("a distinguishing configuration was found by the fixpoint");
    let end = single(&hit);
    let mut path = backtrack(&layers, &end, &prod_rules);
    let left_accepts = match kind {
        Bad::Mismatch => !end.and(&net_acc).is_false(),
        Bad::NetOnly(t) => {
            let after = net_rules[t].image(&end);
            path.push(t);
            path.extend(descend(&after, &net_rules, &backward_layers(&net_acc, &net_rules, &net_reach)));
            true
        }
        Bad::SpecOnly(t) => {
            let after = spec_rules[t].image(&end);
            path.push(t);
            path.extend(descend(&after, &spec_rules, &backward_layers(&spec_acc, &spec_rules, &spec_fwd)));
            false
        }
    };
    Ok(EquivalenceWitness::Distinguished { witness: enc.names(&path), left_accepts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order_follows_numbers() {
        let mut ids = vec!["p_gen_10", "p2", "p_gen_2", "p1", "p10"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, vec!["p1", "p2", "p10", "p_gen_2", "p_gen_10"]);
    }
}
