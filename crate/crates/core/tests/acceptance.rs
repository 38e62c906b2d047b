//! Acceptance suite: one PASS/FAIL line per criterion, then a single verdict.
//!
//! The criteria run sequentially inside one test so that the timing-based
//! checks do not compete with each other for cores.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use wfdeclare_core::automata::{constraint_fsa, end_fsa};
use wfdeclare_core::benchgen::{audit, run_benchmark, BenchMode, BenchOptions};
use wfdeclare_core::conformance::{check, EventLog};
use wfdeclare_core::ltlf::satisfies;
use wfdeclare_core::net::parse_pnml;
use wfdeclare_core::statespace::{analyze, explore, Witness, DEFAULT_STATE_LIMIT};
use wfdeclare_core::synthesis::{spec_fsa, synthesize, synthesize_unchecked, verify_equivalence, SynthesisError, VerifyOptions};
use wfdeclare_core::{Constraint, DeclareSpec, EquivalenceWitness, WorkflowNet};

const GOLDEN_TIME: Duration = Duration::from_secs(1);
const EQUIVALENCE_TIME: Duration = Duration::from_secs(60);
const TREND_TIME: Duration = Duration::from_secs(600);
const MIN_R2: f64 = 0.95;
const RUN_LEN: usize = 14;
const RUN_LEN_WITH_LOOP: usize = 22;
const SPEC_LEN: usize = 10;
const CHAIN: usize = 50;
const AUDIT_EVERY: usize = 10;
const AUDIT_LIMIT: usize = 50_000;
const BENCH_ITERATIONS: usize = 200;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> WorkflowNet {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_pnml(&std::fs::read(path).unwrap()).unwrap()
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn loop_net_constraints() -> BTreeSet<Constraint> {
    [
        Constraint::at_most_one(["t_a"]),
        Constraint::alt_prec(["t_a", "t_w"], ["t_b"]),
        Constraint::alt_prec(["t_b"], ["t_c", "t_d"]),
        Constraint::alt_prec(["t_c", "t_d"], ["t_e"]),
        Constraint::alt_prec(["t_e"], ["t_f"]),
        Constraint::alt_prec(["t_e"], ["t_g"]),
        Constraint::alt_prec(["t_f"], ["t_u"]),
        Constraint::alt_prec(["t_g"], ["t_u"]),
        Constraint::alt_prec(["t_u"], ["t_v", "t_w"]),
        Constraint::end(["t_v"]),
    ]
    .into_iter()
    .map(Result::unwrap)
    .collect()
}

fn loop_spec() -> DeclareSpec {
    let net = fixture("loop_net.pnml");
    DeclareSpec::new(net.transitions(), loop_net_constraints().into_iter().collect()).unwrap()
}

fn c1_golden_synthesis() -> Outcome {
    let start = Instant::now();
    let net = fixture("loop_net.pnml");
    let report = analyze(&net, DEFAULT_STATE_LIMIT).map_err(|e| e.to_string())?;
    let spec = synthesize(&net, &report).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let got: BTreeSet<Constraint> = spec.constraints().iter().cloned().collect();
    let want = loop_net_constraints();
    if got != want || spec.constraints().len() != want.len() {
        return Err(format!("got {:?}", spec.constraints().iter().map(ToString::to_string).collect::<Vec<_>>()));
    }
    if elapsed >= GOLDEN_TIME {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("10/10 constraints match in {:.3} s", elapsed.as_secs_f64()))
}

fn c2_equivalence() -> Outcome {
    let start = Instant::now();
    let opts = VerifyOptions::default();
    for name in ["loop_net.pnml", "nfc_net.pnml"] {
        let net = fixture(name);
        let spec = synthesize_unchecked(&net);
        match verify_equivalence(&net, &spec, &opts).map_err(|e| e.to_string())? {
            EquivalenceWitness::Equivalent => {}
            other => return Err(format!("{name}: {other:?}")),
        }
    }
    let mut audited = 0;
    let mut symbolic = 0;
    for mode in [BenchMode::ConstraintCount, BenchMode::FormulaSize] {
        for (i, state) in mode.chain(CHAIN).enumerate() {
            let k = i + 1;
            if k % AUDIT_EVERY == 0 {
                let a = audit(&state, k, AUDIT_LIMIT).map_err(|e| format!("{}: {e}", mode.as_str()))?;
                audited += 1;
                symbolic += a.symbolic as usize;
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= EQUIVALENCE_TIME {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "2 bundled nets + {audited} audited chain nets equivalent ({symbolic} decided symbolically), 0 counterexamples, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

fn c3_runs_satisfy_constraints() -> Outcome {
    let net = fixture("loop_net.pnml");
    let rfsa = explore(&net, DEFAULT_STATE_LIMIT).map_err(|e| e.to_string())?;
    let spec = loop_spec();
    let mut checked = [0usize; 2];
    for (slot, max) in [RUN_LEN, RUN_LEN_WITH_LOOP].into_iter().enumerate() {
        for run in rfsa.fsa().accepted_strings(max) {
            if !net.is_run(&run) {
                return Err(format!("{run:?} is not a run"));
            }
            if let Some(c) = spec.constraints().iter().find(|c| !satisfies(&run, &c.formula())) {
                return Err(format!("run {run:?} violates {c}"));
            }
            checked[slot] += 1;
        }
    }
    let with_loop = rfsa.fsa().accepted_strings(RUN_LEN_WITH_LOOP).iter().filter(|r| r.contains(&"t_w".to_string())).count();
    if with_loop == 0 {
        return Err("no run unrolls the loop".into());
    }
    Ok(format!(
        "{} runs of length <= {RUN_LEN} and {} of length <= {RUN_LEN_WITH_LOOP} ({with_loop} through t_w) satisfy all 10 formulas",
        checked[0], checked[1]
    ))
}

fn c4_spec_strings_are_runs() -> Outcome {
    let net = fixture("loop_net.pnml");
    let accepted = spec_fsa(&loop_spec()).accepted_strings(SPEC_LEN);
    if accepted.is_empty() {
        return Err("specification accepts nothing".into());
    }
    if let Some(w) = accepted.iter().find(|w| !net.is_run(w)) {
        return Err(format!("{w:?} is accepted but does not replay"));
    }
    Ok(format!("{} accepted strings of length <= {SPEC_LEN} all replay as runs", accepted.len()))
}

fn all_words(alphabet: &[String], max: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max {
        frontier = frontier
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut v = w.clone();
                    v.push(a.clone());
                    v
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn subsets(alphabet: &[String]) -> Vec<Vec<String>> {
    (1u32..(1 << alphabet.len()))
        .map(|mask| (0..alphabet.len()).filter(|i| mask & (1 << i) != 0).map(|i| alphabet[i].clone()).collect())
        .collect()
}

fn c5_template_oracle() -> Outcome {
    let mut pairs = 0usize;
    let mut overlapping = 0usize;
    for size in 1..=4 {
        let alphabet: Vec<String> = ["a", "b", "c", "d"][..size].iter().map(|s| s.to_string()).collect();
        let words = all_words(&alphabet, 6);
        let sets = subsets(&alphabet);
        let mut constraints = Vec::new();
        for s in &sets {
            constraints.push(Constraint::at_most_one(s.clone()).unwrap());
            constraints.push(Constraint::end(s.clone()).unwrap());
            for x in &sets {
                if s.iter().any(|a| x.contains(a)) {
                    overlapping += 1;
                }
                constraints.push(Constraint::alt_prec(s.clone(), x.clone()).unwrap());
            }
        }
        for c in &constraints {
            let fsa = constraint_fsa(c, &alphabet).unwrap();
            let formula = c.formula();
            for w in &words {
                if fsa.accepts(w).unwrap() != satisfies(w, &formula) {
                    return Err(format!("{c} disagrees on {w:?}"));
                }
                pairs += 1;
            }
        }
    }
    // the empty trace is the single place where automaton and formula part ways
    let sigma = strings(&["a", "b"]);
    let end = Constraint::end(["a"]).unwrap();
    let empty: [&str; 0] = [];
    let end_fsa = end_fsa(&end.params()[0], &sigma).unwrap();
    if end_fsa.accepts(&empty).unwrap() || !satisfies(&empty, &end.formula()) {
        return Err("empty-trace End discrepancy is not as documented".into());
    }
    Ok(format!("{pairs} (constraint, trace) pairs agree, {overlapping} overlapping AltPrec instances; empty-trace End case pinned"))
}

fn c6_trends() -> Outcome {
    let start = Instant::now();
    for mode in [BenchMode::ConstraintCount, BenchMode::FormulaSize] {
        for state in mode.chain(BENCH_ITERATIONS) {
            let spec = synthesize_unchecked(state.net());
            if spec.literal_count() != state.net().arc_count() || spec.constraints().len() != state.net().places().len() {
                return Err(format!("{}: size bookkeeping broken", mode.as_str()));
            }
        }
    }
    let opts = BenchOptions { iterations: BENCH_ITERATIONS, audit_every: 0, ..BenchOptions::default() };
    let series = run_benchmark(&opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let line = format!(
        "literal count = |F| on {} nets; R2_lin = {:.4} over {BENCH_ITERATIONS} iterations (beta {:.2e} ms/iteration), {:.1} s",
        2 * BENCH_ITERATIONS,
        series.fit.r2,
        series.fit.slope,
        elapsed.as_secs_f64()
    );
    if series.fit.r2 < MIN_R2 || elapsed >= TREND_TIME {
        return Err(line);
    }
    Ok(line)
}

fn c7_model_traces() -> Outcome {
    let sigma = strings(&["a", "b", "c", "d", "e", "f", "g", "u", "v", "w"]);
    let constraints = vec![
        Constraint::at_most_one(["a"]).unwrap(),
        Constraint::end(["v"]).unwrap(),
        Constraint::alt_prec(["e"], ["f"]).unwrap(),
        Constraint::alt_prec(["a", "w"], ["b"]).unwrap(),
        Constraint::alt_prec(["u"], ["v", "w"]).unwrap(),
    ];
    let spec = DeclareSpec::new(&sigma, constraints).unwrap();
    let fsa = spec_fsa(&spec);
    let cases: [(&[&str], &[&str]); 3] = [
        (&["a", "b", "c", "e", "f", "g", "u", "v"], &[]),
        (&["a", "b", "c"], &["End({v})"]),
        (&["a", "b", "c", "f", "u", "w", "b"], &["End({v})", "AlternatePrecedence({e},{f})"]),
    ];
    for (trace, rejecting) in cases {
        let rejected: BTreeSet<String> = spec.violated_by(trace).iter().map(ToString::to_string).collect();
        let want: BTreeSet<String> = rejecting.iter().map(|s| s.to_string()).collect();
        if rejected != want {
            return Err(format!("{trace:?}: rejected by {rejected:?}, expected {want:?}"));
        }
        if fsa.accepts(trace).unwrap() != want.is_empty() {
            return Err(format!("{trace:?}: specification automaton disagrees"));
        }
    }
    Ok("1 model trace accepted; 2 traces rejected by exactly the expected constraints".into())
}

fn c8_conformance() -> Outcome {
    let net = fixture("loop_net.pnml");
    let spec = loop_spec();
    let runs: Vec<Vec<String>> = explore(&net, DEFAULT_STATE_LIMIT).unwrap().fsa().accepted_strings(RUN_LEN_WITH_LOOP).into_iter().take(80).collect();
    if runs.len() != 80 {
        return Err(format!("only {} runs available", runs.len()));
    }
    type Mutation = fn(&[String]) -> Option<Vec<String>>;
    let classes: [(&str, Constraint, Mutation); 4] = [
        ("truncate", Constraint::end(["t_v"]).unwrap(), |r| Some(r[..r.len() - 1].to_vec())),
        ("drop-first", Constraint::alt_prec(["t_a", "t_w"], ["t_b"]).unwrap(), |r| Some(r[1..].to_vec())),
        ("repeat-first", Constraint::at_most_one(["t_a"]).unwrap(), |r| {
            let mut v = vec![r[0].clone()];
            v.extend(r.iter().cloned());
            Some(v)
        }),
        ("swap-b-c", Constraint::alt_prec(["t_b"], ["t_c", "t_d"]).unwrap(), |r| {
            (r[2] == "t_c").then(|| {
                let mut v = r.to_vec();
                v.swap(1, 2);
                v
            })
        }),
    ];
    let mut traces: Vec<(String, Vec<String>)> = runs.iter().enumerate().map(|(i, r)| (format!("run-{i:03}"), r.clone())).collect();
    for (name, _, mutate) in &classes {
        let mutants: Vec<Vec<String>> = runs.iter().rev().filter_map(|r| mutate(r)).take(5).collect();
        for (j, m) in mutants.into_iter().enumerate() {
            if net.is_run(&m) {
                return Err(format!("{name} mutant {m:?} is still a run"));
            }
            traces.push((format!("{name}-{j}"), m));
        }
    }
    if traces.len() != 100 {
        return Err(format!("log has {} traces", traces.len()));
    }
    let log = EventLog::new(traces.clone()).unwrap();
    let report = check(&log, &spec).unwrap();

    let targeted: Vec<String> = classes.iter().map(|(_, c, _)| c.to_string()).collect();
    for r in &report.constraints {
        let hit = targeted.contains(&r.constraint);
        if hit && r.fitness >= 1.0 {
            return Err(format!("{} untouched by its mutation class", r.constraint));
        }
        if !hit && r.fitness != 1.0 {
            return Err(format!("{} has fitness {} but no mutation targets it", r.constraint, r.fitness));
        }
    }
    let mut pairs = 0;
    for (_, t) in &traces {
        for c in spec.constraints() {
            let fsa = constraint_fsa(c, spec.alphabet()).unwrap();
            if fsa.accepts(t).unwrap() != satisfies(t, &c.formula()) {
                return Err(format!("{c} verdicts differ on {t:?}"));
            }
            pairs += 1;
        }
    }
    Ok(format!(
        "6 untouched constraints at fitness 1.0, 4 targeted below 1.0 (min {:.2}); {pairs}/1000 FSA/evaluator verdicts agree",
        report.constraints.iter().map(|c| c.fitness).fold(1.0, f64::min)
    ))
}

fn c9_negative_inputs() -> Outcome {
    let cases: [(&str, &str); 4] = [
        ("loop_net_deadlock.pnml", "option to complete"),
        ("loop_net_improper.pnml", "proper completion"),
        ("loop_net_dead.pnml", "no dead transitions"),
        ("loop_net_unsafe.pnml", "safety"),
    ];
    for (name, property) in cases {
        let net = fixture(name);
        let report = analyze(&net, DEFAULT_STATE_LIMIT).map_err(|e| e.to_string())?;
        if !report.failures().contains(&property) {
            return Err(format!("{name}: {property} not flagged ({:?})", report.failures()));
        }
        let has_witness = report.witnesses.iter().any(|w| {
            matches!(
                (property, w),
                ("option to complete", Witness::NoOptionToComplete { .. })
                    | ("proper completion", Witness::ImproperCompletion { .. })
                    | ("no dead transitions", Witness::DeadTransition { .. })
                    | ("safety", Witness::Unsafe { .. })
            )
        });
        if !has_witness {
            return Err(format!("{name}: no witness for {property}"));
        }
        match synthesize(&net, &report) {
            Err(SynthesisError::Refused(why)) if why.contains(&property) => {}
            other => return Err(format!("{name}: synthesize returned {other:?}")),
        }
    }
    Ok("4/4 mutant classes flagged with witnesses and refused".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("C1 golden synthesis", c1_golden_synthesis),
        ("C2 mechanical equivalence", c2_equivalence),
        ("C3 runs satisfy the specification", c3_runs_satisfy_constraints),
        ("C4 specification strings are runs", c4_spec_strings_are_runs),
        ("C5 template automata vs evaluator", c5_template_oracle),
        ("C6 complexity trends", c6_trends),
        ("C7 model-trace fixtures", c7_model_traces),
        ("C8 conformance sanity", c8_conformance),
        ("C9 negative inputs", c9_negative_inputs),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let line = match &outcome {
            Ok(detail) => format!("PASS {name}: {detail}"),
            Err(detail) => {
                failed.push(name);
                format!("FAIL {name}: {detail}")
            }
        };
        writeln!(err, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
