//! Library results compared against small, independent reference implementations.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;

use wfdeclare_core::automata::{constraint_fsa, Fsa};
use wfdeclare_core::benchgen::{linear_fit, BenchMode};
use wfdeclare_core::conformance::{check, EventLog};
use wfdeclare_core::ltlf::{evaluate_all, satisfies};
use wfdeclare_core::net::{parse_pnml, write_pnml};
use wfdeclare_core::statespace::explore;
use wfdeclare_core::synthesis::{spec_fsa, spec_fsa_fold, synthesize_unchecked, verify_equivalence, Engine, VerifyOptions};
use wfdeclare_core::{Constraint, DeclareSpec, EquivalenceWitness, Formula, WorkflowNet};

const SIGMA: [&str; 3] = ["a", "b", "c"];

fn fixture(name: &str) -> WorkflowNet {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_pnml(&std::fs::read(path).unwrap()).unwrap()
}

// ---------------------------------------------------------------------------
// LTLf: quantifier-style semantics evaluated instant by instant

fn naive(f: &Formula, t: &[&str], i: usize) -> bool {
    let n = t.len();
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => t[i] == a,
        Formula::Not(x) => !naive(x, t, i),
        Formula::And(a, b) => naive(a, t, i) && naive(b, t, i),
        Formula::Or(a, b) => naive(a, t, i) || naive(b, t, i),
        Formula::Implies(a, b) => !naive(a, t, i) || naive(b, t, i),
        Formula::Next(x) => i + 1 < n && naive(x, t, i + 1),
        Formula::Yesterday(x) => i > 0 && naive(x, t, i - 1),
        Formula::Until(a, b) => (i..n).any(|k| naive(b, t, k) && (i..k).all(|j| naive(a, t, j))),
        Formula::Since(a, b) => (0..=i).any(|k| naive(b, t, k) && (k + 1..=i).all(|j| naive(a, t, j))),
        Formula::Eventually(x) => (i..n).any(|k| naive(x, t, k)),
        Formula::Always(x) => (i..n).all(|k| naive(x, t, k)),
    }
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        proptest::sample::select(SIGMA.to_vec()).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::yesterday),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::since(a, b)),
        ]
    })
}

fn trace(max: usize) -> impl Strategy<Value = Vec<&'static str>> {
    proptest::collection::vec(proptest::sample::select(SIGMA.to_vec()), 1..=max)
}

proptest! {
    #[test]
    fn evaluator_matches_quantifier_semantics(f in formula(), t in trace(7)) {
        let fast = evaluate_all(&f, &t);
        let slow: Vec<bool> = (0..t.len()).map(|i| naive(&f, &t, i)).collect();
        prop_assert_eq!(fast, slow);
    }
}

// ---------------------------------------------------------------------------
// Templates: direct definitions over positions

fn direct(c: &Constraint, t: &[&str]) -> bool {
    let p = c.params();
    let inn = |k: usize, s: &BTreeSet<String>| s.contains(t[k]);
    match c.template().name() {
        "AtMostOne" => (0..t.len()).filter(|&k| inn(k, &p[0])).count() <= 1,
        "End" => t.last().is_some_and(|s| p[0].contains(*s)),
        _ => (0..t.len())
            .filter(|&j| inn(j, &p[1]))
            .all(|j| (0..j).any(|i| inn(i, &p[0]) && (i + 1..j).all(|k| !inn(k, &p[1])))),
    }
}

fn subset(alphabet: &'static [&'static str]) -> impl Strategy<Value = BTreeSet<String>> {
    proptest::sample::subsequence(alphabet.to_vec(), 1..=alphabet.len())
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn constraint(alphabet: &'static [&'static str]) -> impl Strategy<Value = Constraint> {
    prop_oneof![
        subset(alphabet).prop_map(|s| Constraint::at_most_one(s).unwrap()),
        subset(alphabet).prop_map(|s| Constraint::end(s).unwrap()),
        (subset(alphabet), subset(alphabet)).prop_map(|(y, x)| Constraint::alt_prec(y, x).unwrap()),
    ]
}

const SIGMA4: [&str; 4] = ["a", "b", "c", "d"];

proptest! {
    #[test]
    fn template_evaluator_and_automaton_agree_with_direct_definition(c in constraint(&SIGMA4), t in proptest::collection::vec(proptest::sample::select(SIGMA4.to_vec()), 1..=8)) {
        let sigma: Vec<String> = SIGMA4.iter().map(|s| s.to_string()).collect();
        let fsa = constraint_fsa(&c, &sigma).unwrap();
        let want = direct(&c, &t);
        prop_assert_eq!(satisfies(&t, &c.formula()), want);
        prop_assert_eq!(fsa.accepts(&t).unwrap(), want);
    }
}

// ---------------------------------------------------------------------------
// Specification automaton against the conjunction of constraint formulas

fn spec_strategy() -> impl Strategy<Value = DeclareSpec> {
    proptest::collection::vec(constraint(&SIGMA), 1..=4).prop_map(|cs| DeclareSpec::new(&SIGMA, cs).unwrap())
}

fn words(alphabet: &[&'static str], max: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for a in alphabet {
                let mut v: Vec<&str> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_automaton_is_the_conjunction(spec in spec_strategy()) {
        let nary = spec_fsa(&spec);
        let fold = spec_fsa_fold(&spec);
        prop_assert!(nary.equivalent(&fold).unwrap().is_equivalent());
        for w in words(&SIGMA, 5).into_iter().filter(|w| !w.is_empty()) {
            let want = spec.constraints().iter().all(|c| direct(c, &w));
            prop_assert_eq!(nary.accepts(&w).unwrap(), want, "{:?}", w);
            prop_assert_eq!(spec.accepts(&w), want);
        }
    }
}

// ---------------------------------------------------------------------------
// DFA toolkit against brute-force language comparison

fn dfa() -> impl Strategy<Value = Fsa> {
    (1usize..=5).prop_flat_map(|n| {
        let edges = proptest::collection::vec(proptest::option::weighted(0.85, 0..n), n * 2);
        let acc = proptest::collection::vec(any::<bool>(), n);
        (Just(n), edges, acc).prop_map(|(n, edges, acc)| {
            let alpha = ["a", "b"];
            let trans: Vec<(usize, &str, usize)> = edges
                .iter()
                .enumerate()
                .filter_map(|(i, e)| e.map(|to| (i / 2, alpha[i % 2], to)))
                .collect();
            let accepting: Vec<usize> = (0..n).filter(|&q| acc[q]).collect();
            Fsa::new(&alpha, n, 0, &accepting, &trans).unwrap()
        })
    })
}

fn language(f: &Fsa, max: usize) -> BTreeSet<Vec<&'static str>> {
    words(&["a", "b"], max).into_iter().filter(|w| f.accepts(w).unwrap()).collect()
}

proptest! {
    #[test]
    fn minimize_preserves_language_and_is_idempotent(f in dfa()) {
        let m = f.minimize();
        prop_assert_eq!(language(&f, 8), language(&m, 8));
        prop_assert!(m.state_count() <= f.complete().state_count());
        prop_assert_eq!(m.minimize().state_count(), m.state_count());
        prop_assert!(f.equivalent(&m).unwrap().is_equivalent());
    }

    #[test]
    fn equivalence_and_witnesses_match_brute_force(f in dfa(), g in dfa()) {
        // two complete DFAs with at most 6 states each differ on a word of length < 12
        let same = language(&f, 11) == language(&g, 11);
        match f.equivalent(&g).unwrap() {
            EquivalenceWitness::Equivalent => prop_assert!(same),
            EquivalenceWitness::Distinguished { witness, left_accepts } => {
                prop_assert!(!same);
                prop_assert_eq!(f.accepts(&witness).unwrap(), left_accepts);
                prop_assert_eq!(g.accepts(&witness).unwrap(), !left_accepts);
                let shortest = words(&["a", "b"], 11)
                    .into_iter()
                    .find(|w| f.accepts(w).unwrap() != g.accepts(w).unwrap())
                    .unwrap();
                prop_assert_eq!(witness.len(), shortest.len());
            }
        }
    }

    #[test]
    fn product_is_intersection(f in dfa(), g in dfa()) {
        let p = f.product(&g).unwrap();
        let want: BTreeSet<_> = language(&f, 7).intersection(&language(&g, 7)).cloned().collect();
        prop_assert_eq!(language(&p, 7), want);
        prop_assert_eq!(language(&f.trim(), 7), language(&f, 7));
    }
}

// ---------------------------------------------------------------------------
// Reachability: string-keyed breadth-first firing

type M = BTreeMap<String, u32>;

fn fire(net: &WorkflowNet, m: &M, t: &str) -> Option<M> {
    let pre = net.preset(t).unwrap();
    if pre.iter().any(|p| m.get(*p).copied().unwrap_or(0) == 0) {
        return None;
    }
    let mut next = m.clone();
    for p in pre {
        let c = next.get_mut(p).unwrap();
        *c -= 1;
        if *c == 0 {
            next.remove(p);
        }
    }
    for p in net.postset(t).unwrap() {
        *next.entry(p.to_string()).or_default() += 1;
    }
    Some(next)
}

fn oracle_graph(net: &WorkflowNet) -> (usize, usize) {
    let init: M = [(net.source_id().to_string(), 1)].into();
    let mut seen: HashSet<M> = [init.clone()].into();
    let mut queue = VecDeque::from([init]);
    let mut edges = 0;
    while let Some(m) = queue.pop_front() {
        for t in net.transitions() {
            if let Some(n) = fire(net, &m, t) {
                edges += 1;
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
    }
    (seen.len(), edges)
}

fn oracle_runs(net: &WorkflowNet, max: usize) -> BTreeSet<Vec<String>> {
    let fin: M = [(net.sink_id().to_string(), 1)].into();
    let mut out = BTreeSet::new();
    let mut stack = vec![([(net.source_id().to_string(), 1)].into(), Vec::<String>::new())];
    while let Some((m, path)) = stack.pop() {
        if m == fin {
            out.insert(path.clone());
        }
        if path.len() == max {
            continue;
        }
        for t in net.transitions() {
            if let Some(n) = fire(net, &m, t) {
                let mut p = path.clone();
                p.push(t.clone());
                stack.push((n, p));
            }
        }
    }
    out
}

#[test]
fn reachability_graph_matches_firing_oracle() {
    let mut nets = vec![fixture("loop_net.pnml"), fixture("nfc_net.pnml")];
    nets.extend(BenchMode::ConstraintCount.chain(3).map(|s| s.net().clone()));
    nets.extend(BenchMode::FormulaSize.chain(3).map(|s| s.net().clone()));
    for net in nets {
        let r = explore(&net, 1_000_000).unwrap();
        assert_eq!((r.state_count(), r.edge_count()), oracle_graph(&net));
        let runs: BTreeSet<Vec<String>> = r.fsa().accepted_strings(16).into_iter().collect();
        assert_eq!(runs, oracle_runs(&net, 16));
    }
}

// ---------------------------------------------------------------------------
// Equivalence engines on generated nets with weakened or strengthened specifications

#[test]
fn engines_agree_on_generated_nets() {
    let explicit = VerifyOptions { engine: Engine::Explicit, ..VerifyOptions::default() };
    let symbolic = VerifyOptions { engine: Engine::Symbolic, ..VerifyOptions::default() };
    let mut nets: Vec<WorkflowNet> = BenchMode::ConstraintCount.chain(3).map(|s| s.net().clone()).collect();
    nets.extend(BenchMode::FormulaSize.chain(2).map(|s| s.net().clone()));
    for net in nets {
        let spec = synthesize_unchecked(&net);
        let mut variants = vec![spec.clone()];
        variants.extend((0..spec.constraints().len()).map(|i| spec.without(i)));
        let t = net.transitions();
        let mut extra = spec.constraints().to_vec();
        extra.push(Constraint::at_most_one([t[0].as_str()]).unwrap());
        variants.push(DeclareSpec::new(t, extra).unwrap());
        for v in variants {
            let a = verify_equivalence(&net, &v, &explicit).unwrap();
            let b = verify_equivalence(&net, &v, &symbolic).unwrap();
            let len = |w: &EquivalenceWitness| match w {
                EquivalenceWitness::Equivalent => None,
                EquivalenceWitness::Distinguished { witness, .. } => Some(witness.len()),
            };
            assert_eq!(len(&a), len(&b));
            for w in [a, b] {
                if let EquivalenceWitness::Distinguished { witness, left_accepts } = w {
                    assert_eq!(net.is_run(&witness), left_accepts);
                    assert_eq!(v.accepts(&witness), !left_accepts);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// PNML round trip

#[test]
fn pnml_round_trip_on_generated_nets() {
    for s in BenchMode::ConstraintCount.chain(4).chain(BenchMode::FormulaSize.chain(4)) {
        let text = write_pnml(s.net());
        let back = parse_pnml(text.as_bytes()).unwrap();
        assert_eq!(back.places(), s.net().places());
        assert_eq!(back.transitions(), s.net().transitions());
        assert_eq!(back.arcs(), s.net().arcs());
        assert_eq!(write_pnml(&back), text);
    }
}

// ---------------------------------------------------------------------------
// Least squares against Cramer's rule on the normal equations

fn cramer(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let r = (n * sxy - sx * sy) / (det * (n * syy - sy * sy)).sqrt();
    (slope, intercept, r * r)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn linear_fit_matches_normal_equations(
        ys in proptest::collection::vec(-1e3f64..1e3, 3..40),
        outlier in 1e3f64..1e4,
    ) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let mut ys = ys;
        ys[0] += outlier;
        let fit = linear_fit(&xs, &ys).unwrap();
        let (slope, intercept, r2) = cramer(&xs, &ys);
        prop_assert!(close(fit.slope, slope), "{} {}", fit.slope, slope);
        prop_assert!(close(fit.intercept, intercept), "{} {}", fit.intercept, intercept);
        prop_assert!(close(fit.r2, r2), "{} {}", fit.r2, r2);
    }
}

// ---------------------------------------------------------------------------
// Conformance report invariants

fn traces() -> impl Strategy<Value = Vec<Vec<&'static str>>> {
    proptest::collection::vec(trace(6), 1..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fitness_report_invariants(spec in spec_strategy(), ts in traces(), seed in any::<u64>()) {
        let named: Vec<(String, Vec<String>)> = ts
            .iter()
            .enumerate()
            .map(|(i, t)| (format!("c{i:03}"), t.iter().map(|s| s.to_string()).collect()))
            .collect();
        let report = check(&EventLog::new(named.clone()).unwrap(), &spec).unwrap();
        for (c, r) in spec.constraints().iter().zip(&report.constraints) {
            prop_assert_eq!(r.satisfied + r.violated, ts.len());
            let want = ts.iter().filter(|t| satisfies(t, &c.formula())).count();
            prop_assert_eq!(r.satisfied, want);
            prop_assert_eq!(r.fitness, want as f64 / ts.len() as f64);
        }
        let binned: usize = report.bins.iter().map(|b| b.constraints.len()).sum();
        prop_assert_eq!(binned + report.violation_free.len(), spec.constraints().len());

        let mut shuffled = named;
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let again = check(&EventLog::new(shuffled).unwrap(), &spec).unwrap();
        prop_assert_eq!(report, again);
    }
}
