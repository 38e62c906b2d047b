//! Linear temporal logic on finite traces, with past operators.
//!
//! Instants are 1-based: a trace of length `n` has instants `1..=n`.
//! Evaluation fills one boolean column per subformula, so the cost is
//! linear in `|formula| * |trace|`.

mod constraint;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use constraint::{Constraint, ConstraintError, Template};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("instant {instant} is outside 1..={len}")]
    InstantOutOfRange { instant: usize, len: usize },
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Strong next: false at the last instant.
    Next(Box<Formula>),
    /// Strong yesterday: false at the first instant.
    Yesterday(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

impl Formula {
    pub fn atom(s: impl Into<String>) -> Self {
        Formula::Atom(s.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn yesterday(f: Formula) -> Self {
        Formula::Yesterday(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn since(a: Formula, b: Formula) -> Self {
        Formula::Since(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    /// Disjunction of the atoms in `symbols`, in sorted order. Panics on an empty set.
    pub fn any_of<S: AsRef<str>>(symbols: impl IntoIterator<Item = S>) -> Self {
        let set: BTreeSet<String> = symbols.into_iter().map(|s| s.as_ref().to_string()).collect();
        set.into_iter()
            .map(Formula::Atom)
            .reduce(Formula::or)
            .expect("non-empty symbol set")
    }

    /// Conjunction of `parts` in order; `True` when empty.
    pub fn all_of(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Atom(a) => {
                    out.insert(a.as_str());
                }
                Formula::True | Formula::False => {}
                Formula::Not(x) | Formula::Next(x) | Formula::Yesterday(x) | Formula::Eventually(x) | Formula::Always(x) => {
                    stack.push(x)
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Until(a, b) | Formula::Since(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(x) | Formula::Next(x) | Formula::Yesterday(x) | Formula::Eventually(x) | Formula::Always(x) => 1 + x.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Until(a, b) | Formula::Since(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Truth value on the empty trace: `G` holds, atoms, `F`, `X`, `Y`, `U`
    /// and `S` do not, and the boolean connectives combine as usual.
    pub fn holds_on_empty(&self) -> bool {
        match self {
            Formula::True | Formula::Always(_) => true,
            Formula::False
            | Formula::Atom(_)
            | Formula::Next(_)
            | Formula::Yesterday(_)
            | Formula::Until(..)
            | Formula::Since(..)
            | Formula::Eventually(_) => false,
            Formula::Not(x) => !x.holds_on_empty(),
            Formula::And(a, b) => a.holds_on_empty() && b.holds_on_empty(),
            Formula::Or(a, b) => a.holds_on_empty() || b.holds_on_empty(),
            Formula::Implies(a, b) => !a.holds_on_empty() || b.holds_on_empty(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::Next(x) => write!(f, "X{x}"),
            Formula::Yesterday(x) => write!(f, "Y{x}"),
            Formula::Eventually(x) => write!(f, "F{x}"),
            Formula::Always(x) => write!(f, "G{x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
            Formula::Since(a, b) => write!(f, "({a} S {b})"),
        }
    }
}

/// Truth value of `f` at every instant of `trace` (index 0 is instant 1).
pub fn evaluate_all<S: AsRef<str>>(f: &Formula, trace: &[S]) -> Vec<bool> {
    let n = trace.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => trace.iter().map(|s| s.as_ref() == a).collect(),
        Formula::Not(x) => evaluate_all(x, trace).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip(evaluate_all(a, trace), evaluate_all(b, trace), |x, y| x && y),
        Formula::Or(a, b) => zip(evaluate_all(a, trace), evaluate_all(b, trace), |x, y| x || y),
        Formula::Implies(a, b) => zip(evaluate_all(a, trace), evaluate_all(b, trace), |x, y| !x || y),
        Formula::Next(x) => {
            let v = evaluate_all(x, trace);
            (0..n).map(|i| i + 1 < n && v[i + 1]).collect()
        }
        Formula::Yesterday(x) => {
            let v = evaluate_all(x, trace);
            (0..n).map(|i| i > 0 && v[i - 1]).collect()
        }
        Formula::Until(a, b) => {
            let (l, r) = (evaluate_all(a, trace), evaluate_all(b, trace));
            let mut out = vec![false; n];
            for i in (0..n).rev() {
                out[i] = r[i] || (l[i] && i + 1 < n && out[i + 1]);
            }
            out
        }
        Formula::Since(a, b) => {
            let (l, r) = (evaluate_all(a, trace), evaluate_all(b, trace));
            let mut out = vec![false; n];
            for i in 0..n {
                out[i] = r[i] || (l[i] && i > 0 && out[i - 1]);
            }
            out
        }
        Formula::Eventually(x) => {
            let v = evaluate_all(x, trace);
            let mut out = vec![false; n];
            for i in (0..n).rev() {
                out[i] = v[i] || (i + 1 < n && out[i + 1]);
            }
            out
        }
        Formula::Always(x) => {
            let v = evaluate_all(x, trace);
            let mut out = vec![true; n];
            for i in (0..n).rev() {
                out[i] = v[i] && (i + 1 >= n || out[i + 1]);
            }
            out
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Truth value of `f` at instant `i` (1-based) of a non-empty trace.
pub fn eval<S: AsRef<str>>(f: &Formula, trace: &[S], i: usize) -> Result<bool, EvalError> {
    if i == 0 || i > trace.len() {
        return Err(EvalError::InstantOutOfRange { instant: i, len: trace.len() });
    }
    Ok(evaluate_all(f, trace)[i - 1])
}

/// Like [`eval`], but first checks that every atom of `f` and every symbol of
/// `trace` belongs to `alphabet`.
pub fn eval_in<S: AsRef<str>, A: AsRef<str>>(f: &Formula, trace: &[S], i: usize, alphabet: &[A]) -> Result<bool, EvalError> {
    let known = |s: &str| alphabet.iter().any(|a| a.as_ref() == s);
    if let Some(a) = f.atoms().into_iter().find(|a| !known(a)) {
        return Err(EvalError::UnknownSymbol(a.to_string()));
    }
    if let Some(s) = trace.iter().find(|s| !known(s.as_ref())) {
        return Err(EvalError::UnknownSymbol(s.as_ref().to_string()));
    }
    eval(f, trace, i)
}

/// Whole-trace satisfaction: the value at instant 1, or
/// [`Formula::holds_on_empty`] for the empty trace.
pub fn satisfies<S: AsRef<str>>(trace: &[S], f: &Formula) -> bool {
    if trace.is_empty() {
        return f.holds_on_empty();
    }
    evaluate_all(f, trace)[0]
}
