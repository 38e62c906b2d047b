use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Template {
    AtMostOne,
    End,
    AlternatePrecedence,
}

impl Template {
    pub fn name(self) -> &'static str {
        match self {
            Template::AtMostOne => "AtMostOne",
            Template::End => "End",
            Template::AlternatePrecedence => "AlternatePrecedence",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Template::AlternatePrecedence => 2,
            _ => 1,
        }
    }
}

impl FromStr for Template {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AtMostOne" => Ok(Template::AtMostOne),
            "End" => Ok(Template::End),
            "AlternatePrecedence" => Ok(Template::AlternatePrecedence),
            other => Err(ConstraintError::UnknownTemplate(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("{template} takes {expected} parameter set(s), got {got}")]
    Arity { template: &'static str, expected: usize, got: usize },
    #[error("parameter sets must be non-empty")]
    EmptyParameter,
    #[error("cannot parse constraint `{0}`")]
    Syntax(String),
}

/// A template instance. Every parameter is a non-empty set of symbols read as
/// a disjunction. `AlternatePrecedence` stores `(preceding, following)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    template: Template,
    params: Vec<BTreeSet<String>>,
}

fn to_set<S: AsRef<str>>(xs: impl IntoIterator<Item = S>) -> BTreeSet<String> {
    xs.into_iter().map(|s| s.as_ref().to_string()).collect()
}

impl Constraint {
    pub fn new(template: Template, params: Vec<BTreeSet<String>>) -> Result<Self, ConstraintError> {
        if params.len() != template.arity() {
            return Err(ConstraintError::Arity { template: template.name(), expected: template.arity(), got: params.len() });
        }
        if params.iter().any(BTreeSet::is_empty) {
            return Err(ConstraintError::EmptyParameter);
        }
        Ok(Constraint { template, params })
    }

    pub fn at_most_one<S: AsRef<str>>(a: impl IntoIterator<Item = S>) -> Result<Self, ConstraintError> {
        Self::new(Template::AtMostOne, vec![to_set(a)])
    }

    pub fn end<S: AsRef<str>>(a: impl IntoIterator<Item = S>) -> Result<Self, ConstraintError> {
        Self::new(Template::End, vec![to_set(a)])
    }

    /// Every symbol of `x` is preceded by a symbol of `y` with no other symbol of `x` in between.
    pub fn alt_prec<S: AsRef<str>, T: AsRef<str>>(
        y: impl IntoIterator<Item = S>,
        x: impl IntoIterator<Item = T>,
    ) -> Result<Self, ConstraintError> {
        Self::new(Template::AlternatePrecedence, vec![to_set(y), to_set(x)])
    }

    pub fn template(&self) -> Template {
        self.template
    }

    pub fn params(&self) -> &[BTreeSet<String>] {
        &self.params
    }

    /// Total number of symbol occurrences across parameter sets.
    pub fn literal_count(&self) -> usize {
        self.params.iter().map(BTreeSet::len).sum()
    }

    pub fn symbols(&self) -> BTreeSet<&str> {
        self.params.iter().flatten().map(String::as_str).collect()
    }

    /// The LTLf formula of the constraint.
    pub fn formula(&self) -> Formula {
        match self.template {
            Template::AtMostOne => {
                let a = Formula::any_of(&self.params[0]);
                Formula::always(Formula::implies(a.clone(), Formula::not(Formula::next(Formula::eventually(a)))))
            }
            Template::End => Formula::always(Formula::eventually(Formula::any_of(&self.params[0]))),
            Template::AlternatePrecedence => {
                let y = Formula::any_of(&self.params[0]);
                let x = Formula::any_of(&self.params[1]);
                Formula::always(Formula::implies(
                    x.clone(),
                    Formula::yesterday(Formula::since(Formula::not(x), y)),
                ))
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self
            .params
            .iter()
            .map(|s| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}({})", self.template.name(), sets.join(","))
    }
}

impl FromStr for Constraint {
    type Err = ConstraintError;

    /// Parses the `Template({a,b},{c})` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || ConstraintError::Syntax(s.to_string());
        let s = s.trim();
        let open = s.find('(').ok_or_else(syntax)?;
        let body = s[open + 1..].strip_suffix(')').ok_or_else(syntax)?;
        let template: Template = s[..open].trim().parse()?;
        let mut params = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let inner = rest.strip_prefix('{').ok_or_else(syntax)?;
            let close = inner.find('}').ok_or_else(syntax)?;
            let set: BTreeSet<String> = inner[..close]
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(str::to_string)
                .collect();
            params.push(set);
            rest = inner[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(syntax());
                }
            } else if !rest.is_empty() {
                return Err(syntax());
            }
        }
        Constraint::new(template, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas_match_templates() {
        let c = Constraint::alt_prec(["a", "w"], ["b"]).unwrap();
        assert_eq!(c.formula().to_string(), "G(b -> Y(!b S (a | w)))");
        assert_eq!(Constraint::end(["v"]).unwrap().formula().to_string(), "GFv");
        assert_eq!(Constraint::at_most_one(["a"]).unwrap().formula().to_string(), "G(a -> !XFa)");
    }

    #[test]
    fn text_round_trip() {
        let c = Constraint::alt_prec(["t_u"], ["t_w", "t_v"]).unwrap();
        assert_eq!(c.to_string(), "AlternatePrecedence({t_u},{t_v,t_w})");
        assert_eq!(c.to_string().parse::<Constraint>().unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Constraint::end(Vec::<&str>::new()), Err(ConstraintError::EmptyParameter));
        assert!("End({a},{b})".parse::<Constraint>().is_err());
        assert!("Response({a},{b})".parse::<Constraint>().is_err());
        assert!("End({a}".parse::<Constraint>().is_err());
    }
}
