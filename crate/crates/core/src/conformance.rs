//! Event-log ingestion and per-constraint fitness.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};
use serde::Serialize;
use thiserror::Error;

use crate::automata::constraint_fsa;
use crate::synthesis::DeclareSpec;

/// Most violating case ids kept per constraint.
pub const SAMPLE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFormat {
    /// Header `case,activity[,timestamp]`.
    Csv,
    /// `<log><trace><event>` with `concept:name` strings.
    Xes,
}

impl LogFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &str) -> LogFormat {
        if path.to_ascii_lowercase().ends_with(".xes") {
            LogFormat::Xes
        } else {
            LogFormat::Csv
        }
    }
}

/// What to do with events whose activity is outside the specification alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphabetPolicy {
    #[default]
    Error,
    SkipEvent,
    SkipTrace,
}

impl FromStr for AlphabetPolicy {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error" => Ok(AlphabetPolicy::Error),
            "skip-event" => Ok(AlphabetPolicy::SkipEvent),
            "skip-trace" => Ok(AlphabetPolicy::SkipTrace),
            other => Err(IngestError::UnknownPolicy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub policy: AlphabetPolicy,
    /// Alphabet the policy is checked against; `None` accepts every activity.
    pub alphabet: Option<Vec<String>>,
    /// Order each trace by timestamp instead of file order.
    pub sort_by_time: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("unknown alphabet policy `{0}` (expected error, skip-event or skip-trace)")]
    UnknownPolicy(String),
    #[error("CSV: {0}")]
    Csv(String),
    #[error("CSV header lacks a `{0}` column")]
    MissingColumn(&'static str),
    #[error("malformed XES: {0}")]
    Xml(String),
    #[error("trace {0} has no concept:name")]
    UnnamedTrace(usize),
    #[error("duplicate case id `{0}`")]
    DuplicateCase(String),
    #[error("case `{case}`: activity `{activity}` is not in the alphabet")]
    UnknownActivity { case: String, activity: String },
    #[error("log contains no traces")]
    Empty,
}

/// Traces keyed by case id, in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    traces: Vec<(String, Vec<String>)>,
}

impl EventLog {
    /// Builds a log directly; empty traces are dropped.
    pub fn new(traces: Vec<(String, Vec<String>)>) -> Result<Self, IngestError> {
        let mut seen = BTreeSet::new();
        for (case, _) in &traces {
            if !seen.insert(case.as_str()) {
                return Err(IngestError::DuplicateCase(case.clone()));
            }
        }
        let traces: Vec<_> = traces.into_iter().filter(|(_, t)| !t.is_empty()).collect();
        if traces.is_empty() {
            return Err(IngestError::Empty);
        }
        Ok(EventLog { traces })
    }

    pub fn traces(&self) -> &[(String, Vec<String>)] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Every activity that occurs in the log.
    pub fn alphabet(&self) -> BTreeSet<&str> {
        self.traces.iter().flat_map(|(_, t)| t.iter().map(String::as_str)).collect()
    }
}

struct RawEvent {
    activity: String,
    timestamp: Option<String>,
}

/// Parses a log and applies the alphabet policy.
pub fn ingest(bytes: &[u8], format: LogFormat, opts: &IngestOptions) -> Result<EventLog, IngestError> {
    let raw = match format {
        LogFormat::Csv => read_csv(bytes)?,
        LogFormat::Xes => read_xes(bytes)?,
    };
    let allowed: Option<BTreeSet<&str>> = opts.alphabet.as_ref().map(|a| a.iter().map(String::as_str).collect());
    let mut traces = Vec::with_capacity(raw.len());
    'cases: for (case, mut events) in raw {
        if opts.sort_by_time {
            sort_by_time(&mut events);
        }
        let mut trace = Vec::with_capacity(events.len());
        for e in events {
            if allowed.as_ref().is_some_and(|a| !a.contains(e.activity.as_str())) {
                match opts.policy {
                    AlphabetPolicy::Error => return Err(IngestError::UnknownActivity { case, activity: e.activity }),
                    AlphabetPolicy::SkipEvent => continue,
                    AlphabetPolicy::SkipTrace => continue 'cases,
                }
            }
            trace.push(e.activity);
        }
        traces.push((case, trace));
    }
    EventLog::new(traces)
}

/// Stable sort; numeric when every timestamp parses as a number, else
/// lexicographic (which orders ISO 8601 stamps correctly). Events without a
/// timestamp keep their position relative to each other and go last.
fn sort_by_time(events: &mut [RawEvent]) {
    let numeric = events.iter().filter_map(|e| e.timestamp.as_deref()).all(|t| t.trim().parse::<f64>().is_ok());
    if numeric {
        let key = |e: &RawEvent| e.timestamp.as_deref().map(|t| t.trim().parse::<f64>().unwrap());
        events.sort_by(|a, b| match (key(a), key(b)) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
    } else {
        events.sort_by(|a, b| match (&a.timestamp, &b.timestamp) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
    }
}

fn read_csv(bytes: &[u8]) -> Result<Vec<(String, Vec<RawEvent>)>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let header = reader.headers().map_err(|e| IngestError::Csv(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let case_col = col("case").ok_or(IngestError::MissingColumn("case"))?;
    let act_col = col("activity").ok_or(IngestError::MissingColumn("activity"))?;
    let ts_col = col("timestamp");

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut out: Vec<(String, Vec<RawEvent>)> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| IngestError::Csv(e.to_string()))?;
        let field = |i: usize| {
            row.get(i).map(str::to_string).ok_or_else(|| {
                let line = row.position().map_or(0, |p| p.line());
                IngestError::Csv(format!("line {line}: missing field {}", i + 1))
            })
        };
        let case = field(case_col)?;
        let activity = field(act_col)?;
        if activity.is_empty() {
            let line = row.position().map_or(0, |p| p.line());
            return Err(IngestError::Csv(format!("line {line}: empty activity")));
        }
        let timestamp = ts_col.and_then(|i| row.get(i)).filter(|s| !s.is_empty()).map(str::to_string);
        let slot = *index.entry(case.clone()).or_insert_with(|| {
            out.push((case, Vec::new()));
            out.len() - 1
        });
        out[slot].1.push(RawEvent { activity, timestamp });
    }
    Ok(out)
}

fn string_attr(e: &BytesStart<'_>) -> Result<(Option<String>, Option<String>), IngestError> {
    let mut key = None;
    let mut value = None;
    for a in e.attributes() {
        let a = a.map_err(|err| IngestError::Xml(err.to_string()))?;
        let v = a.normalized_value(XmlVersion::Implicit1_0).map_err(|err| IngestError::Xml(err.to_string()))?;
        match a.key.local_name().as_ref() {
            "key" => key = Some(v.into_owned()),
            "value" => value = Some(v.into_owned()),
            _ => {}
        }
    }
    Ok((key, value))
}

fn read_xes(bytes: &[u8]) -> Result<Vec<(String, Vec<RawEvent>)>, IngestError> {
    let mut reader = Reader::from_reader(bytes);
    let mut buf = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    let mut out = Vec::new();
    let mut trace_name: Option<String> = None;
    let mut events: Vec<RawEvent> = Vec::new();
    let mut event: Option<RawEvent> = None;
    let mut traces = 0usize;

    loop {
        let ev = reader.read_event_into(&mut buf).map_err(|e| IngestError::Xml(e.to_string()))?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(ev, Event::Empty(_));
                let name = e.local_name().as_ref().to_string();
                let parent = stack.last().map(String::as_str);
                match (name.as_str(), parent) {
                    ("trace", Some("log")) => {
                        traces += 1;
                        trace_name = None;
                        events.clear();
                    }
                    ("event", Some("trace")) => {
                        event = Some(RawEvent { activity: String::new(), timestamp: None });
                    }
                    ("string", Some("trace")) => {
                        if let (Some(k), Some(v)) = string_attr(e)? {
                            if k == "concept:name" {
                                trace_name = Some(v);
                            }
                        }
                    }
                    ("string" | "date", Some("event")) => {
                        let (key, value) = string_attr(e)?;
                        if let (Some(k), Some(v), Some(current)) = (key, value, event.as_mut()) {
                            match (name.as_str(), k.as_str()) {
                                ("string", "concept:name") => current.activity = v,
                                ("date", "time:timestamp") => current.timestamp = Some(v),
                                _ => {}
                            }
                        }
                    }
                    _ => {}
                }
                if stack.is_empty() && name != "log" {
                    return Err(IngestError::Xml(format!("root element is <{name}>, expected <log>")));
                }
                if !empty {
                    stack.push(name);
                } else if name == "event" && parent == Some("trace") {
                    return Err(IngestError::Xml(format!("event without concept:name in trace {traces}")));
                } else if name == "trace" && parent == Some("log") {
                    let case = trace_name.take().ok_or(IngestError::UnnamedTrace(traces))?;
                    out.push((case, Vec::new()));
                }
            }
            Event::End(_) => {
                let name = stack.pop().unwrap_or_default();
                match name.as_str() {
                    "event" if stack.last().map(String::as_str) == Some("trace") => {
                        let e = event.take().expect("open event");
                        if e.activity.is_empty() {
                            return Err(IngestError::Xml(format!("event without concept:name in trace {traces}")));
                        }
                        events.push(e);
                    }
                    "trace" if stack.last().map(String::as_str) == Some("log") => {
                        let case = trace_name.take().ok_or(IngestError::UnnamedTrace(traces))?;
                        out.push((case, std::mem::take(&mut events)));
                    }
                    _ => {}
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !stack.is_empty() {
        return Err(IngestError::Xml(format!("unexpected end of document inside <{}>", stack.last().unwrap())));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConformanceError {
    #[error("log activity `{0}` is not in the specification alphabet")]
    UnknownActivity(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintFitness {
    pub constraint: String,
    pub satisfied: usize,
    pub violated: usize,
    pub fitness: f64,
    /// Smallest violating case ids, at most [`SAMPLE_CAP`].
    pub violating_cases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitnessBin {
    pub label: &'static str,
    pub lower: f64,
    pub upper: f64,
    /// Indices into [`FitnessReport::constraints`].
    pub constraints: Vec<usize>,
}

/// Fitness bands for violated constraints; each is `[lower, upper)`.
pub const BANDS: [(&str, f64, f64); 4] =
    [("[0.0,0.1)", 0.0, 0.1), ("[0.1,0.5)", 0.1, 0.5), ("[0.5,0.9)", 0.5, 0.9), ("[0.9,1.0)", 0.9, 1.0)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitnessReport {
    pub traces: usize,
    pub constraints: Vec<ConstraintFitness>,
    pub bins: Vec<FitnessBin>,
    /// Indices of constraints no trace violates.
    pub violation_free: Vec<usize>,
}

impl FitnessReport {
    pub fn all_satisfied(&self) -> bool {
        self.constraints.iter().all(|c| c.violated == 0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let width = self.constraints.iter().map(|c| c.constraint.len()).max().unwrap_or(0).max("constraint".len());
        let mut s = String::new();
        writeln!(s, "{:<width$}  {:>9}  {:>8}  {:>7}", "constraint", "satisfied", "violated", "fitness").unwrap();
        for c in &self.constraints {
            writeln!(s, "{:<width$}  {:>9}  {:>8}  {:>7.4}", c.constraint, c.satisfied, c.violated, c.fitness).unwrap();
        }
        writeln!(s).unwrap();
        for b in &self.bins {
            writeln!(s, "{}: {} constraint(s)", b.label, b.constraints.len()).unwrap();
        }
        writeln!(s, "violation-free: {} constraint(s)", self.violation_free.len()).unwrap();
        s
    }
}

/// Replays every trace on every constraint automaton.
pub fn check(log: &EventLog, spec: &DeclareSpec) -> Result<FitnessReport, ConformanceError> {
    let index: HashMap<&str, usize> = spec.alphabet().iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let encoded: Vec<Vec<usize>> = log
        .traces()
        .iter()
        .map(|(_, t)| {
            t.iter()
                .map(|a| index.get(a.as_str()).copied().ok_or_else(|| ConformanceError::UnknownActivity(a.clone())))
                .collect()
        })
        .collect::<Result<_, _>>()?;

    let mut constraints = Vec::with_capacity(spec.constraints().len());
    for c in spec.constraints() {
        let fsa = constraint_fsa(c, spec.alphabet()).expect("constraint symbols are in the alphabet");
        let mut satisfied = 0;
        let mut sample: BTreeSet<&str> = BTreeSet::new();
        for ((case, _), word) in log.traces().iter().zip(&encoded) {
            let mut q = Some(fsa.initial());
            for &a in word {
                q = q.and_then(|s| fsa.step(s, a));
            }
            if q.is_some_and(|s| fsa.is_accepting(s)) {
                satisfied += 1;
            } else {
                sample.insert(case);
                if sample.len() > SAMPLE_CAP {
                    sample.pop_last();
                }
            }
        }
        let violated = log.len() - satisfied;
        constraints.push(ConstraintFitness {
            constraint: c.to_string(),
            satisfied,
            violated,
            fitness: satisfied as f64 / log.len() as f64,
            violating_cases: sample.into_iter().map(str::to_string).collect(),
        });
    }

    let bins = BANDS
        .iter()
        .map(|&(label, lower, upper)| FitnessBin {
            label,
            lower,
            upper,
            constraints: (0..constraints.len())
                .filter(|&i| constraints[i].violated > 0 && constraints[i].fitness >= lower && constraints[i].fitness < upper)
                .collect(),
        })
        .collect();
    let violation_free = (0..constraints.len()).filter(|&i| constraints[i].violated == 0).collect();
    Ok(FitnessReport { traces: log.len(), constraints, bins, violation_free })
}
