use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use wfdeclare_core::benchgen::{self, BenchError, BenchMode, BenchOptions, PeakAlloc};
use wfdeclare_core::conformance::{self, AlphabetPolicy, IngestOptions, LogFormat};
use wfdeclare_core::net::{parse_pnml, write_pnml, PnmlError};
use wfdeclare_core::statespace::{self, explore, ExploreError, DEFAULT_STATE_LIMIT};
use wfdeclare_core::synthesis::{
    parse_spec, serialize, spec_fsa, synthesize, synthesize_unchecked, verify_equivalence, Engine, SpecFormat,
    VerifyError, VerifyOptions,
};
use wfdeclare_core::{symbolic, DeclareSpec, EquivalenceWitness, SoundnessReport, WorkflowNet};

#[global_allocator]
static ALLOC: PeakAlloc = PeakAlloc;

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT: u8 = 2;
const OUTPUT: u8 = 3;
const RESOURCE: u8 = 4;

/// Translate Workflow nets into Declare specifications and check them.
///
/// Exit codes: 0 success, 1 negative result (unsound, not equivalent,
/// violations), 2 input error, 3 output error, 4 resource bound exceeded.
#[derive(Parser)]
#[command(name = "wfdeclare", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check structure, safety and soundness of a net.
    Validate(ValidateArgs),
    /// Write the specification of a safe and sound net.
    Synthesize(SynthesizeArgs),
    /// Check that a specification accepts exactly the runs of a net.
    Verify(VerifyArgs),
    /// Per-constraint fitness of an event log.
    Check(CheckArgs),
    /// Write a chain of generated nets as PNML files.
    Gen(GenArgs),
    /// Time synthesis over a chain of generated nets.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    /// Machine-readable JSON on standard output; everything else goes to standard error.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Explicit,
    Symbolic,
    Auto,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Explicit => Engine::Explicit,
            EngineArg::Symbolic => Engine::Symbolic,
            EngineArg::Auto => Engine::Auto,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Pnml,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Error,
    SkipEvent,
    SkipTrace,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ConstraintCount,
    FormulaSize,
}

impl From<ModeArg> for BenchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ConstraintCount => BenchMode::ConstraintCount,
            ModeArg::FormulaSize => BenchMode::FormulaSize,
        }
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// PNML net.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Write the reachability graph in DOT format here.
    #[arg(long, value_name = "PATH", requires = "format")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, requires = "out")]
    format: Option<FormatArg>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_STATE_LIMIT)]
    state_limit: usize,
    #[arg(long, value_enum, default_value = "explicit")]
    engine: EngineArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SynthesizeArgs {
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// text or json for the specification, dot for its automaton.
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Synthesize even if the net is unsafe or unsound.
    #[arg(long)]
    force: bool,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_STATE_LIMIT)]
    state_limit: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Specification to compare (text or .json); synthesized from the net when absent.
    #[arg(long, value_name = "PATH")]
    spec: Option<PathBuf>,
    #[arg(long)]
    force: bool,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_STATE_LIMIT)]
    state_limit: usize,
    #[arg(long, value_enum, default_value = "explicit")]
    engine: EngineArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CheckArgs {
    /// A PNML net (its specification is synthesized) or a specification file.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Event log, CSV or XES (by extension).
    #[arg(long, value_name = "PATH")]
    log: PathBuf,
    /// Report file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "json")]
    format: Option<FormatArg>,
    #[arg(long, value_enum, default_value = "error")]
    alphabet_policy: PolicyArg,
    #[arg(long)]
    sort_by_time: bool,
    #[arg(long)]
    force: bool,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_STATE_LIMIT)]
    state_limit: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "constraint-count")]
    mode: ModeArg,
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    iterations: u64,
    /// Directory for the PNML files.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Audit every n-th net for soundness and equivalence; 0 disables.
    #[arg(long, value_name = "N", default_value_t = 10)]
    audit_every: usize,
    /// Explicit-state bound during audits.
    #[arg(long, value_name = "N", default_value_t = 50_000)]
    state_limit: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "constraint-count")]
    mode: ModeArg,
    #[arg(long, value_name = "N", default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    iterations: u64,
    #[arg(long, value_name = "N", default_value_t = 10)]
    audit_every: usize,
    #[arg(long, value_name = "N", default_value_t = 50_000)]
    state_limit: usize,
    /// CSV file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type Outcome = Result<u8, Failure>;

/// Human-readable output, on standard error when JSON owns standard output.
struct Console {
    json: bool,
}

impl Console {
    fn say(&self, text: &str) {
        if self.json {
            eprintln!("{text}");
        } else {
            println!("{text}");
        }
    }

    fn emit(&self, value: serde_json::Value) {
        if self.json {
            println!("{value:#}");
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(INPUT, format!("cannot read {}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| Failure::new(OUTPUT, format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| Failure::new(OUTPUT, format!("cannot write to standard output: {e}"))),
    }
}

fn load_net(path: &Path) -> Result<WorkflowNet, Failure> {
    parse_pnml(&read(path)?).map_err(|e| Failure::new(INPUT, format!("{}: {e}", path.display())))
}

fn report_for(net: &WorkflowNet, engine: Engine, limit: usize) -> Result<SoundnessReport, Failure> {
    let explicit = || {
        statespace::analyze(net, limit).map_err(|e| match e {
            ExploreError::StateLimit { limit } => {
                Failure::new(RESOURCE, format!("state space exceeds the limit of {limit} markings"))
            }
            ExploreError::Unsafe { .. } => unreachable!("analyze reports unsafety"),
        })
    };
    match engine {
        Engine::Explicit => explicit(),
        Engine::Symbolic => Ok(symbolic::analyze(net).report),
        Engine::Auto => match explicit() {
            Err(f) if f.code == RESOURCE => Ok(symbolic::analyze(net).report),
            other => other,
        },
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe(console: &Console, report: &SoundnessReport) {
    console.say(&format!("safe: {}, sound: {}", yes(report.safe), yes(report.safe && report.is_sound())));
    if report.safe {
        console.say(&format!("  option to complete: {}", yes(report.option_to_complete)));
        console.say(&format!("  proper completion: {}", yes(report.proper_completion)));
        console.say(&format!("  no dead transitions: {}", yes(report.no_dead_transitions)));
    }
    for w in &report.witnesses {
        console.say(&format!("witness: {w}"));
    }
}

fn cmd_validate(a: ValidateArgs) -> Outcome {
    let console = Console { json: a.common.json };
    let net = match parse_pnml(&read(&a.input)?) {
        Ok(n) => n,
        Err(PnmlError::NotWorkflowNet(violations)) => {
            console.say("structure: not a Workflow net");
            for v in &violations {
                console.say(&format!("  {v}"));
            }
            console.emit(json!({
                "workflow_net": false,
                "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
            }));
            return Ok(NEGATIVE);
        }
        Err(e) => return Err(Failure::new(INPUT, format!("{}: {e}", a.input.display()))),
    };
    console.say(&format!(
        "structure: Workflow net with {} places, {} transitions, {} arcs",
        net.places().len(),
        net.transitions().len(),
        net.arc_count()
    ));
    let report = report_for(&net, a.engine.into(), a.state_limit)?;
    describe(&console, &report);
    console.emit(json!({ "workflow_net": true, "report": report, "sound": report.is_safe_and_sound() }));
    if let Some(out) = &a.out {
        if a.format != Some(FormatArg::Dot) {
            return Err(Failure::new(INPUT, "validate writes only --format dot"));
        }
        let rfsa = explore(&net, a.state_limit).map_err(|e| match e {
            ExploreError::StateLimit { .. } => Failure::new(RESOURCE, e.to_string()),
            ExploreError::Unsafe { .. } => Failure::new(NEGATIVE, format!("no reachability graph: {e}")),
        })?;
        write_out(Some(out), &rfsa.to_dot())?;
    }
    Ok(if report.is_safe_and_sound() { OK } else { NEGATIVE })
}

/// The net's specification, refusing unsafe or unsound nets unless forced.
fn spec_of(console: &Console, net: &WorkflowNet, force: bool, limit: usize) -> Result<DeclareSpec, Failure> {
    let report = match report_for(net, Engine::Explicit, limit) {
        Err(f) if f.code == RESOURCE && force => None,
        other => Some(other?),
    };
    match report {
        Some(r) if r.is_safe_and_sound() => Ok(synthesize(net, &r).expect("report is clean")),
        _ if force => {
            eprintln!("WARNING: --force given; the net is not known to be safe and sound, so the specification may not match its runs");
            Ok(synthesize_unchecked(net))
        }
        Some(r) => {
            describe(console, &r);
            Err(Failure::new(NEGATIVE, synthesize(net, &r).unwrap_err().to_string()))
        }
        None => unreachable!(),
    }
}

fn cmd_synthesize(a: SynthesizeArgs) -> Outcome {
    let console = Console { json: a.common.json };
    let net = load_net(&a.input)?;
    let spec = spec_of(&console, &net, a.force, a.state_limit)?;
    let body = match a.format {
        FormatArg::Text => serialize(&spec, SpecFormat::Text),
        FormatArg::Json => serialize(&spec, SpecFormat::Json),
        FormatArg::Dot => spec_fsa(&spec).to_dot(),
        FormatArg::Pnml => return Err(Failure::new(INPUT, "synthesize writes text, json or dot")),
    };
    if a.out.is_none() && a.common.json {
        return Err(Failure::new(INPUT, "--json needs --out so the specification does not mix with the summary"));
    }
    write_out(a.out.as_deref(), &body)?;
    let counts = format!("constraints={} literals={}", spec.constraints().len(), spec.literal_count());
    if a.out.is_some() {
        console.say(&counts);
    } else {
        eprintln!("{counts}");
    }
    console.emit(json!({ "constraints": spec.constraints().len(), "literals": spec.literal_count() }));
    Ok(OK)
}

/// Reads a specification file; text files get the net's alphabet when one is given.
fn load_spec(path: &Path, alphabet: Option<&[String]>) -> Result<DeclareSpec, Failure> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| Failure::new(INPUT, format!("{} is not UTF-8", path.display())))?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let format = if json { SpecFormat::Json } else { SpecFormat::Text };
    let spec = parse_spec(&text, format).map_err(|e| Failure::new(INPUT, format!("{}: {e}", path.display())))?;
    match alphabet {
        Some(sigma) if !json && spec.alphabet().iter().all(|s| sigma.contains(s)) => {
            Ok(DeclareSpec::new(sigma, spec.constraints().to_vec()).expect("symbols are in the alphabet"))
        }
        _ => Ok(spec),
    }
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let console = Console { json: a.common.json };
    let net = load_net(&a.input)?;
    let spec = match &a.spec {
        Some(p) => load_spec(p, Some(net.transitions()))?,
        None => spec_of(&console, &net, a.force, a.state_limit)?,
    };
    let opts = VerifyOptions { engine: a.engine.into(), state_limit: a.state_limit };
    match verify_equivalence(&net, &spec, &opts) {
        Ok(EquivalenceWitness::Equivalent) => {
            console.say("equivalent");
            console.emit(json!({ "equivalent": true }));
            Ok(OK)
        }
        Ok(EquivalenceWitness::Distinguished { witness, left_accepts }) => {
            let side = if left_accepts { "run of the net rejected by the specification" } else { "accepted by the specification but not a run of the net" };
            console.say(&format!("not equivalent: <{}> is {side}", witness.join(",")));
            console.emit(json!({ "equivalent": false, "witness": witness, "net_accepts": left_accepts }));
            Ok(NEGATIVE)
        }
        Err(e @ VerifyError::StateLimit { .. }) => Err(Failure::new(RESOURCE, e.to_string())),
        Err(e) => {
            console.say(&format!("not equivalent: {e}"));
            console.emit(json!({ "equivalent": false, "error": e.to_string() }));
            Ok(NEGATIVE)
        }
    }
}

fn cmd_check(a: CheckArgs) -> Outcome {
    let console = Console { json: a.common.json };
    let is_net = a.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("pnml"));
    let spec = if is_net {
        let net = load_net(&a.input)?;
        spec_of(&console, &net, a.force, a.state_limit)?
    } else {
        load_spec(&a.input, None)?
    };
    let policy = match a.alphabet_policy {
        PolicyArg::Error => AlphabetPolicy::Error,
        PolicyArg::SkipEvent => AlphabetPolicy::SkipEvent,
        PolicyArg::SkipTrace => AlphabetPolicy::SkipTrace,
    };
    let opts = IngestOptions { policy, alphabet: Some(spec.alphabet().to_vec()), sort_by_time: a.sort_by_time };
    let format = LogFormat::from_path(&a.log.to_string_lossy());
    let log = conformance::ingest(&read(&a.log)?, format, &opts)
        .map_err(|e| Failure::new(INPUT, format!("{}: {e}", a.log.display())))?;
    let report = conformance::check(&log, &spec).map_err(|e| Failure::new(INPUT, e.to_string()))?;
    let as_json = a.common.json || a.format == Some(FormatArg::Json);
    match a.format {
        None | Some(FormatArg::Text) | Some(FormatArg::Json) => {}
        Some(_) => return Err(Failure::new(INPUT, "check writes text or json")),
    }
    let body = if as_json { report.to_json() } else { report.to_text() };
    match (&a.out, a.common.json) {
        (Some(p), _) => {
            write_out(Some(p), &body)?;
            console.say(&report.to_text());
        }
        (None, true) => {
            eprint!("{}", report.to_text());
            write_out(None, &body)?;
        }
        (None, false) => write_out(None, &body)?,
    }
    Ok(if report.all_satisfied() { OK } else { NEGATIVE })
}

fn bench_failure(e: BenchError) -> Failure {
    let code = match &e {
        BenchError::Verify { source: VerifyError::StateLimit { .. }, .. } => RESOURCE,
        BenchError::TooFewIterations(_) => INPUT,
        _ => NEGATIVE,
    };
    Failure::new(code, e.to_string())
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let console = Console { json: a.common.json };
    fs::create_dir_all(&a.out).map_err(|e| Failure::new(OUTPUT, format!("cannot create {}: {e}", a.out.display())))?;
    let mode: BenchMode = a.mode.into();
    let mut files = Vec::new();
    for (i, state) in mode.chain(a.iterations as usize).enumerate() {
        let k = i + 1;
        if a.audit_every > 0 && k % a.audit_every == 0 {
            benchgen::audit(&state, k, a.state_limit).map_err(bench_failure)?;
        }
        let path = a.out.join(format!("{}_{k:04}.pnml", mode.as_str()));
        write_out(Some(&path), &write_pnml(state.net()))?;
        files.push(path.display().to_string());
    }
    console.say(&format!("wrote {} nets to {}", files.len(), a.out.display()));
    console.emit(json!({ "files": files }));
    Ok(OK)
}

fn cmd_bench(a: BenchArgs) -> Outcome {
    let console = Console { json: a.common.json };
    let opts = BenchOptions {
        mode: a.mode.into(),
        iterations: a.iterations as usize,
        audit_every: a.audit_every,
        audit_state_limit: a.state_limit,
        ..BenchOptions::default()
    };
    let series = benchgen::run_benchmark(&opts).map_err(bench_failure)?;
    let mut csv = Vec::new();
    benchgen::write_csv(&series, &mut csv).map_err(|e| Failure::new(OUTPUT, e.to_string()))?;
    let csv = String::from_utf8(csv).expect("CSV is UTF-8");
    if a.out.is_none() && a.common.json {
        return Err(Failure::new(INPUT, "--json needs --out so the CSV does not mix with the summary"));
    }
    write_out(a.out.as_deref(), &csv)?;
    let summary = format!(
        "{} iterations, R2_lin = {:.4}, beta = {:.6} ms/iteration, {} audits passed",
        series.records.len(),
        series.fit.r2,
        series.fit.slope,
        series.audits.len()
    );
    if a.out.is_some() {
        console.say(&summary);
    } else {
        eprintln!("{summary}");
    }
    console.emit(json!({ "r2": series.fit.r2, "beta": series.fit.slope, "audits": series.audits.len() }));
    Ok(OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Check(a) => cmd_check(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
