//! Reading and writing the place/transition subset of PNML.
//!
//! Accepted shape: `pnml > net > page* > {place, transition, arc}`. Initial
//! markings are ignored (the source place always holds the single initial
//! token), `name/text` children become display labels, and arcs with a weight
//! other than 1 or a non-normal type are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};
use thiserror::Error;

use super::{validate_structure, NetError, PetriNet, Violation, WorkflowNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PnmlError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("document has no <pnml><net> element")]
    NoNet,
    #[error("document contains more than one <net>")]
    MultipleNets,
    #[error("<{element}> is missing the `{attribute}` attribute")]
    MissingAttribute { element: String, attribute: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("arc `{arc}` references unknown node `{node}`")]
    UnknownEndpoint { arc: String, node: String },
    #[error("arc `{arc}` does not connect a place and a transition")]
    NotBipartite { arc: String },
    #[error("arc {from} -> {to} is declared more than once")]
    DuplicateArc { from: String, to: String },
    #[error("arc `{arc}` has weight {weight}; only weight 1 is supported")]
    ArcWeight { arc: String, weight: String },
    #[error("arc `{arc}` has unsupported type `{kind}`")]
    ArcType { arc: String, kind: String },
    #[error("not a Workflow net: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotWorkflowNet(Vec<Violation>),
}

#[derive(Default)]
struct RawArc {
    id: String,
    source: String,
    target: String,
    weight: Option<String>,
    kind: Option<String>,
}

#[derive(Default)]
struct Collected {
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<RawArc>,
    labels: BTreeMap<String, String>,
    nets: usize,
}

fn attr(e: &BytesStart<'_>, name: &str) -> Result<Option<String>, PnmlError> {
    for a in e.attributes() {
        let a = a.map_err(|err| PnmlError::Xml(err.to_string()))?;
        if a.key.local_name().as_ref() == name {
            let v = a
                .normalized_value(XmlVersion::Implicit1_0)
                .map_err(|err| PnmlError::Xml(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required_id(e: &BytesStart<'_>, element: &str) -> Result<String, PnmlError> {
    attr(e, "id")?.ok_or_else(|| PnmlError::MissingAttribute { element: element.into(), attribute: "id".into() })
}

fn collect(bytes: &[u8]) -> Result<Collected, PnmlError> {
    let mut reader = Reader::from_reader(bytes);
    let mut buf = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    let mut out = Collected::default();
    // id of the place/transition/arc currently open
    let mut owner: Option<String> = None;
    let mut text = String::new();
    let mut saw_root = false;

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| PnmlError::Xml(e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let name = e.local_name().as_ref().to_string();
                if stack.is_empty() {
                    if saw_root || name != "pnml" {
                        return Err(PnmlError::NoNet);
                    }
                    saw_root = true;
                }
                let parent = stack.last().map(String::as_str);
                match (name.as_str(), parent) {
                    ("net", Some("pnml")) => {
                        out.nets += 1;
                        if out.nets > 1 {
                            return Err(PnmlError::MultipleNets);
                        }
                    }
                    ("place", Some("net" | "page")) => {
                        let id = required_id(e, "place")?;
                        out.places.push(id.clone());
                        owner = Some(id);
                    }
                    ("transition", Some("net" | "page")) => {
                        let id = required_id(e, "transition")?;
                        out.transitions.push(id.clone());
                        owner = Some(id);
                    }
                    ("arc", Some("net" | "page")) => {
                        let id = required_id(e, "arc")?;
                        let source = attr(e, "source")?.ok_or_else(|| PnmlError::MissingAttribute {
                            element: "arc".into(),
                            attribute: "source".into(),
                        })?;
                        let target = attr(e, "target")?.ok_or_else(|| PnmlError::MissingAttribute {
                            element: "arc".into(),
                            attribute: "target".into(),
                        })?;
                        let kind = attr(e, "type")?;
                        out.arcs.push(RawArc { id: id.clone(), source, target, kind, weight: None });
                        owner = Some(id);
                    }
                    ("type", Some("arc")) => {
                        if let (Some(v), Some(arc)) = (attr(e, "value")?, out.arcs.last_mut()) {
                            arc.kind = Some(v);
                        }
                    }
                    _ => {}
                }
                if !empty {
                    stack.push(name);
                    text.clear();
                } else if matches!(name.as_str(), "place" | "transition" | "arc") {
                    owner = None;
                }
            }
            Event::Text(ref t) => text.push_str(&t.xml10_content()),
            Event::CData(ref t) => text.push_str(t),
            Event::GeneralRef(ref r) => {
                let raw = format!("&{};", r.xml10_content());
                let resolved = quick_xml::escape::unescape(&raw).map_err(|e| PnmlError::Xml(e.to_string()))?;
                text.push_str(&resolved);
            }
            Event::End(_) => {
                let name = stack.pop().unwrap_or_default();
                if name == "text" {
                    let path: Vec<&str> = stack.iter().rev().take(2).map(String::as_str).collect();
                    let value = text.trim().to_string();
                    match (path.as_slice(), owner.as_ref()) {
                        (["name", "place" | "transition"], Some(id)) => {
                            out.labels.insert(id.clone(), value);
                        }
                        (["inscription", "arc"], Some(_)) => {
                            if let Some(arc) = out.arcs.last_mut() {
                                arc.weight = Some(value);
                            }
                        }
                        _ => {}
                    }
                }
                if matches!(name.as_str(), "place" | "transition" | "arc") {
                    owner = None;
                }
                text.clear();
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !stack.is_empty() {
        return Err(PnmlError::Xml(format!("unexpected end of document inside <{}>", stack.last().unwrap())));
    }
    if out.nets == 0 {
        return Err(PnmlError::NoNet);
    }
    Ok(out)
}

/// Parses PNML into a plain Petri net without checking the Workflow-net conditions.
pub fn parse_petri_net(bytes: &[u8]) -> Result<PetriNet, PnmlError> {
    let c = collect(bytes)?;
    let mut ids = BTreeSet::new();
    for id in c.places.iter().chain(&c.transitions).chain(c.arcs.iter().map(|a| &a.id)) {
        if !ids.insert(id.as_str()) {
            return Err(PnmlError::DuplicateId(id.clone()));
        }
    }
    let places: BTreeSet<&str> = c.places.iter().map(String::as_str).collect();
    let transitions: BTreeSet<&str> = c.transitions.iter().map(String::as_str).collect();
    let mut pairs = BTreeSet::new();
    for a in &c.arcs {
        for end in [&a.source, &a.target] {
            if !places.contains(end.as_str()) && !transitions.contains(end.as_str()) {
                return Err(PnmlError::UnknownEndpoint { arc: a.id.clone(), node: end.clone() });
            }
        }
        let bipartite = (places.contains(a.source.as_str()) && transitions.contains(a.target.as_str()))
            || (transitions.contains(a.source.as_str()) && places.contains(a.target.as_str()));
        if !bipartite {
            return Err(PnmlError::NotBipartite { arc: a.id.clone() });
        }
        if let Some(w) = &a.weight {
            if w.parse::<u64>().ok() != Some(1) {
                return Err(PnmlError::ArcWeight { arc: a.id.clone(), weight: w.clone() });
            }
        }
        if let Some(k) = &a.kind {
            if k != "normal" {
                return Err(PnmlError::ArcType { arc: a.id.clone(), kind: k.clone() });
            }
        }
        if !pairs.insert((a.source.as_str(), a.target.as_str())) {
            return Err(PnmlError::DuplicateArc { from: a.source.clone(), to: a.target.clone() });
        }
    }
    let mut net = PetriNet::new(
        c.places.iter().cloned(),
        c.transitions.iter().cloned(),
        c.arcs.iter().map(|a| (a.source.as_str(), a.target.as_str())),
    )
    .map_err(|e| match e {
        NetError::DuplicateId(id) => PnmlError::DuplicateId(id),
        other => PnmlError::Xml(other.to_string()),
    })?;
    for (id, label) in c.labels {
        net.set_label(&id, label).expect("label owner is a node");
    }
    Ok(net)
}

/// Parses PNML and checks that the result is a Workflow net.
pub fn parse_pnml(bytes: &[u8]) -> Result<WorkflowNet, PnmlError> {
    let net = parse_petri_net(bytes)?;
    let violations = validate_structure(&net);
    if !violations.is_empty() {
        return Err(PnmlError::NotWorkflowNet(violations));
    }
    Ok(WorkflowNet::new(net).expect("validated"))
}

/// Serializes a net as PNML. Output is deterministic for a given net.
pub fn write_pnml(net: &WorkflowNet) -> String {
    let taken: BTreeSet<&str> = net.places().iter().chain(net.transitions()).map(String::as_str).collect();
    let mut prefix = String::from("a");
    while taken.iter().any(|id| id.starts_with(prefix.as_str())) {
        prefix.insert(0, '_');
    }
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<pnml>\n  <net id=\"net\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n    <page id=\"page\">\n");
    for p in net.places() {
        let _ = write!(s, "      <place id=\"{}\">", escape(p));
        if let Some(l) = net.label(p) {
            let _ = write!(s, "<name><text>{}</text></name>", escape(l));
        }
        if p == net.source_id() {
            s.push_str("<initialMarking><text>1</text></initialMarking>");
        }
        s.push_str("</place>\n");
    }
    for t in net.transitions() {
        let label = net.label(t).unwrap_or(t);
        let _ = writeln!(s, "      <transition id=\"{}\"><name><text>{}</text></name></transition>", escape(t), escape(label));
    }
    for (k, (from, to)) in net.arcs().into_iter().enumerate() {
        let _ = writeln!(
            s,
            "      <arc id=\"{prefix}{k}\" source=\"{}\" target=\"{}\"/>",
            escape(from),
            escape(to)
        );
    }
    s.push_str("    </page>\n  </net>\n</pnml>\n");
    s
}
