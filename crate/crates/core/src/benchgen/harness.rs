use std::hint::black_box;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use super::{ExpansionState, MemoryMeter};
use crate::automata::EquivalenceWitness;
use crate::statespace::{self, ExploreError};
use crate::symbolic;
use crate::synthesis::{synthesize, synthesize_unchecked, verify_equivalence, Engine, VerifyError, VerifyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMode {
    /// Full four-rule iterations; the number of places grows.
    ConstraintCount,
    /// Repeated conditional expansion; two constraints grow.
    FormulaSize,
}

impl BenchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchMode::ConstraintCount => "constraint-count",
            BenchMode::FormulaSize => "formula-size",
        }
    }

    /// The state after `k` steps of this mode.
    pub fn state(self, k: usize) -> ExpansionState {
        match self {
            BenchMode::ConstraintCount => (0..k).fold(ExpansionState::base(), |s, _| s.expand_iteration()),
            BenchMode::FormulaSize => ExpansionState::sequential_base().expand_conditional(k),
        }
    }

    /// States after 1, 2, ..., `iterations` steps.
    pub fn chain(self, iterations: usize) -> impl Iterator<Item = ExpansionState> {
        let mut state = match self {
            BenchMode::ConstraintCount => ExpansionState::base(),
            BenchMode::FormulaSize => ExpansionState::sequential_base(),
        };
        (0..iterations).map(move |_| {
            state = match self {
                BenchMode::ConstraintCount => state.clone().expand_iteration(),
                BenchMode::FormulaSize => state.clone().expand_conditional(1),
            };
            state.clone()
        })
    }
}

impl FromStr for BenchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constraint-count" => Ok(BenchMode::ConstraintCount),
            "formula-size" => Ok(BenchMode::FormulaSize),
            other => Err(format!("unknown mode `{other}` (expected constraint-count or formula-size)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub mode: BenchMode,
    pub iterations: usize,
    /// Audit every n-th iteration; 0 disables audits.
    pub audit_every: usize,
    pub repetitions: usize,
    /// Explicit-state bound during audits; larger nets go to the BDD engine.
    pub audit_state_limit: usize,
    /// Each timed batch repeats the call until at least this much time passed.
    pub min_batch: Duration,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            mode: BenchMode::ConstraintCount,
            iterations: 200,
            audit_every: 10,
            repetitions: 3,
            audit_state_limit: 50_000,
            min_batch: Duration::from_millis(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub iteration: usize,
    pub places: usize,
    pub transitions: usize,
    pub arcs: usize,
    pub constraints: usize,
    pub literals: usize,
    pub time_ms: f64,
    pub mem_mb: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub iteration: usize,
    /// Whether the explicit state bound was exceeded and the BDD engine decided.
    pub symbolic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least two points")]
    TooFewPoints,
    #[error("{xs} x values but {ys} y values")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("all x values are equal")]
    DegenerateX,
}

/// Ordinary least squares `y = slope * x + intercept`. R² is 1 when all
/// `y` are equal.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.len() < 2 {
        return Err(FitError::TooFewPoints);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LinearFit { slope, intercept, r2 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSeries {
    pub mode: BenchMode,
    #[serde(skip)]
    pub meter: MemoryMeter,
    pub repetitions: usize,
    pub records: Vec<BenchRecord>,
    pub audits: Vec<Audit>,
    /// Fit of `time_ms` against the iteration index.
    pub fit: LinearFit,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("a benchmark needs at least 2 iterations, got {0}")]
    TooFewIterations(usize),
    #[error("iteration {iteration}: generated net violates {}", failures.join(", "))]
    Unsound { iteration: usize, failures: Vec<&'static str> },
    #[error("iteration {iteration}: specification differs from the net on {}", witness.join(" "))]
    NotEquivalent { iteration: usize, witness: Vec<String> },
    #[error("iteration {iteration}: {source}")]
    Verify { iteration: usize, source: VerifyError },
}

const BATCHES: usize = 5;

/// Per-call time of `f` in milliseconds: the fastest of several batches, each
/// sized to last at least `min_batch`.
fn time_ms<R>(min_batch: Duration, mut f: impl FnMut() -> R) -> f64 {
    let mut batch = |n: u32| {
        let start = Instant::now();
        for _ in 0..n {
            black_box(f());
        }
        start.elapsed()
    };
    let mut n: u32 = 1;
    while n < 1 << 20 && batch(n) < min_batch {
        n *= 2;
    }
    (0..BATCHES).map(|_| batch(n).as_secs_f64() * 1e3 / n as f64).fold(f64::INFINITY, f64::min)
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

/// Checks safety, soundness and equivalence of one generated net.
pub fn audit(state: &ExpansionState, iteration: usize, limit: usize) -> Result<Audit, BenchError> {
    let net = state.net();
    let (report, symbolic) = match statespace::analyze(net, limit) {
        Ok(r) => (r, false),
        Err(ExploreError::StateLimit { .. }) => (symbolic::analyze(net).report, true),
        Err(e) => return Err(BenchError::Verify { iteration, source: e.into() }),
    };
    let spec = synthesize(net, &report).map_err(|_| BenchError::Unsound { iteration, failures: report.failures() })?;
    let opts = VerifyOptions { engine: Engine::Auto, state_limit: limit };
    match verify_equivalence(net, &spec, &opts) {
        Ok(EquivalenceWitness::Equivalent) => Ok(Audit { iteration, symbolic }),
        Ok(EquivalenceWitness::Distinguished { witness, .. }) => Err(BenchError::NotEquivalent { iteration, witness }),
        Err(source) => Err(BenchError::Verify { iteration, source }),
    }
}

/// Grows a chain of nets, timing synthesis on each and auditing at the
/// configured cadence.
pub fn run_benchmark(opts: &BenchOptions) -> Result<BenchSeries, BenchError> {
    if opts.iterations < 2 {
        return Err(BenchError::TooFewIterations(opts.iterations));
    }
    let meter = MemoryMeter::detect();
    let mut records = Vec::with_capacity(opts.iterations);
    let mut audits = Vec::new();
    let mut nets = Vec::with_capacity(opts.iterations);
    for (i, state) in opts.mode.chain(opts.iterations).enumerate() {
        let iteration = i + 1;
        let net = state.net();
        let (spec, bytes) = meter.measure(|| synthesize_unchecked(net));
        records.push(BenchRecord {
            iteration,
            places: net.places().len(),
            transitions: net.transitions().len(),
            arcs: net.arc_count(),
            constraints: spec.constraints().len(),
            literals: spec.literal_count(),
            time_ms: 0.0,
            mem_mb: bytes as f64 / (1024.0 * 1024.0),
        });
        if opts.audit_every > 0 && iteration % opts.audit_every == 0 {
            audits.push(audit(&state, iteration, opts.audit_state_limit)?);
        }
        nets.push(state.net().clone());
    }
    // whole passes over the chain, so a stall lands on different iterations each time
    let mut samples = vec![Vec::with_capacity(opts.repetitions.max(1)); nets.len()];
    for _ in 0..opts.repetitions.max(1) {
        for (net, slot) in nets.iter().zip(&mut samples) {
            slot.push(time_ms(opts.min_batch, || synthesize_unchecked(net)));
        }
    }
    for (record, slot) in records.iter_mut().zip(samples) {
        record.time_ms = median(slot);
    }
    let xs: Vec<f64> = records.iter().map(|r| r.iteration as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.time_ms).collect();
    let fit = linear_fit(&xs, &ys).expect("iterations are distinct and at least two");
    Ok(BenchSeries { mode: opts.mode, meter, repetitions: opts.repetitions, records, audits, fit })
}

#[derive(Serialize)]
struct FitStats {
    r2: f64,
    beta: f64,
    intercept: f64,
    x: &'static str,
    y: &'static str,
    iterations: usize,
    audited: Vec<usize>,
}

/// Writes the series as CSV with `#` comment lines describing the metrics,
/// followed by a one-line JSON object with the fit.
pub fn write_csv(series: &BenchSeries, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "# mode = {}", series.mode.as_str())?;
    writeln!(out, "# time_ms = median over {} passes of the best per-call synthesis time", series.repetitions)?;
    writeln!(out, "# mem_mb = {}", series.meter.describe())?;
    let mut w = csv::Writer::from_writer(&mut *out);
    w.write_record(["iteration", "places", "transitions", "arcs", "constraints", "time_ms", "mem_mb"])?;
    for r in &series.records {
        w.write_record([
            r.iteration.to_string(),
            r.places.to_string(),
            r.transitions.to_string(),
            r.arcs.to_string(),
            r.constraints.to_string(),
            format!("{:.6}", r.time_ms),
            format!("{:.6}", r.mem_mb),
        ])?;
    }
    w.flush()?;
    drop(w);
    let stats = FitStats {
        r2: series.fit.r2,
        beta: series.fit.slope,
        intercept: series.fit.intercept,
        x: "iteration",
        y: "time_ms",
        iterations: series.records.len(),
        audited: series.audits.iter().map(|a| a.iteration).collect(),
    };
    let stats = serde_json::to_string(&stats).expect("plain data serializes");
    writeln!(out, "{stats}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_of_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn fit_conventions() {
        let f = linear_fit(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((f.slope, f.r2), (0.0, 1.0));
        assert_eq!(linear_fit(&[1.0, 2.0], &[3.0, 7.0]).unwrap().r2, 1.0);
        assert_eq!(linear_fit(&[2.0, 2.0], &[1.0, 3.0]), Err(FitError::DegenerateX));
        assert_eq!(linear_fit(&[1.0], &[1.0]), Err(FitError::TooFewPoints));
    }

    #[test]
    fn two_iterations_fit_perfectly() {
        let opts = BenchOptions { iterations: 2, audit_every: 1, ..Default::default() };
        let series = run_benchmark(&opts).unwrap();
        assert_eq!(series.records.len(), 2);
        assert_eq!(series.fit.r2, 1.0);
        assert_eq!(series.audits.len(), 2);
        let mut out = Vec::new();
        write_csv(&series, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("iteration,places,transitions,arcs,constraints,time_ms,mem_mb\n"));
        assert!(text.lines().last().unwrap().starts_with("{\"r2\":"));
    }
}
