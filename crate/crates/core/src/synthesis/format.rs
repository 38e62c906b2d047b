use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::DeclareSpec;
use crate::ltlf::{Constraint, ConstraintError, Template};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecFormat {
    /// One `Template({a,b},{c})` line per constraint.
    Text,
    Json,
}

impl FromStr for SpecFormat {
    type Err = SpecFormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(SpecFormat::Text),
            "json" => Ok(SpecFormat::Json),
            other => Err(SpecFormatError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecFormatError {
    #[error("unknown specification format `{0}`")]
    UnknownFormat(String),
    #[error("line {line}: {source}")]
    Line { line: usize, source: ConstraintError },
    #[error("invalid JSON specification: {0}")]
    Json(String),
    #[error("specification has no constraints")]
    Empty,
    #[error("constraint mentions `{0}`, which is not in the alphabet")]
    UnknownSymbol(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSpec {
    alphabet: Vec<String>,
    constraints: Vec<JsonConstraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonConstraint {
    template: Template,
    params: Vec<Vec<String>>,
}

/// Renders a specification. Both formats are deterministic and end with a newline.
pub fn serialize(spec: &DeclareSpec, format: SpecFormat) -> String {
    match format {
        SpecFormat::Text => spec.constraints.iter().map(|c| format!("{c}\n")).collect(),
        SpecFormat::Json => {
            let doc = JsonSpec {
                alphabet: spec.alphabet.clone(),
                constraints: spec
                    .constraints
                    .iter()
                    .map(|c| JsonConstraint {
                        template: c.template(),
                        params: c.params().iter().map(|s| s.iter().cloned().collect()).collect(),
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
            s.push('\n');
            s
        }
    }
}

/// Parses either format. The text format carries no alphabet, so the
/// alphabet is the set of symbols mentioned by the constraints.
pub fn parse_spec(input: &str, format: SpecFormat) -> Result<DeclareSpec, SpecFormatError> {
    let spec = match format {
        SpecFormat::Text => {
            let mut constraints = Vec::new();
            for (i, line) in input.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let c: Constraint = line.parse().map_err(|source| SpecFormatError::Line { line: i + 1, source })?;
                constraints.push(c);
            }
            let alphabet: BTreeSet<String> =
                constraints.iter().flat_map(|c| c.symbols()).map(str::to_string).collect();
            DeclareSpec { alphabet: alphabet.into_iter().collect(), constraints }
        }
        SpecFormat::Json => {
            let doc: JsonSpec = serde_json::from_str(input).map_err(|e| SpecFormatError::Json(e.to_string()))?;
            let constraints = doc
                .constraints
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    let params = c.params.into_iter().map(|p| p.into_iter().collect()).collect();
                    Constraint::new(c.template, params).map_err(|source| SpecFormatError::Line { line: i + 1, source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            DeclareSpec::new(&doc.alphabet, constraints).map_err(|e| match e {
                super::SynthesisError::UnknownSymbol(s) => SpecFormatError::UnknownSymbol(s),
                other => SpecFormatError::Json(other.to_string()),
            })?
        }
    };
    if spec.constraints.is_empty() {
        return Err(SpecFormatError::Empty);
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DeclareSpec {
        DeclareSpec::new(
            &["a", "b", "c"],
            vec![
                Constraint::at_most_one(["a"]).unwrap(),
                Constraint::alt_prec(["a"], ["b", "c"]).unwrap(),
                Constraint::end(["c", "b"]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn text_round_trip() {
        let s = serialize(&sample(), SpecFormat::Text);
        assert_eq!(s, "AtMostOne({a})\nAlternatePrecedence({a},{b,c})\nEnd({b,c})\n");
        assert_eq!(parse_spec(&s, SpecFormat::Text).unwrap(), sample());
    }

    #[test]
    fn json_round_trip() {
        let s = serialize(&sample(), SpecFormat::Json);
        assert!(s.contains("\"template\": \"AlternatePrecedence\""));
        assert_eq!(parse_spec(&s, SpecFormat::Json).unwrap(), sample());
    }

    #[test]
    fn rejects_unknown_format_and_symbols() {
        assert!("yaml".parse::<SpecFormat>().is_err());
        let bad = r#"{"alphabet":["a"],"constraints":[{"template":"End","params":[["z"]]}]}"#;
        assert_eq!(parse_spec(bad, SpecFormat::Json), Err(SpecFormatError::UnknownSymbol("z".into())));
        assert_eq!(parse_spec("", SpecFormat::Text), Err(SpecFormatError::Empty));
    }
}
