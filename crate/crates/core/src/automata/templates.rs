use std::collections::BTreeSet;

use super::{Fsa, FsaError};
use crate::ltlf::{Constraint, Template};

fn check(set: &BTreeSet<String>, alphabet: &[String]) -> Result<(), FsaError> {
    if set.is_empty() {
        return Err(FsaError::EmptyParameter);
    }
    match set.iter().find(|s| alphabet.binary_search(s).is_err()) {
        Some(s) => Err(FsaError::UnknownSymbol(s.clone())),
        None => Ok(()),
    }
}

fn sorted(alphabet: &[String]) -> Vec<String> {
    let mut a = alphabet.to_vec();
    a.sort();
    a.dedup();
    a
}

/// `s0` and `s1` accept, `s2` traps. Each occurrence of a symbol in `a` moves one state right.
pub fn atmostone_fsa(a: &BTreeSet<String>, alphabet: &[String]) -> Result<Fsa, FsaError> {
    let alphabet = sorted(alphabet);
    check(a, &alphabet)?;
    let delta = (0..3u32)
        .map(|q| {
            (0..alphabet.len() as u32)
                .map(|s| {
                    let hit = a.contains(&alphabet[s as usize]);
                    (s, if hit { (q + 1).min(2) } else { q })
                })
                .collect()
        })
        .collect();
    Ok(Fsa::from_rows(alphabet, delta, 0, vec![true, true, false]))
}

/// Accepts exactly when the last symbol read is in `a`; the initial state rejects.
pub fn end_fsa(a: &BTreeSet<String>, alphabet: &[String]) -> Result<Fsa, FsaError> {
    let alphabet = sorted(alphabet);
    check(a, &alphabet)?;
    let row: Vec<(u32, u32)> = (0..alphabet.len() as u32)
        .map(|s| (s, a.contains(&alphabet[s as usize]) as u32))
        .collect();
    Ok(Fsa::from_rows(alphabet, vec![row.clone(), row], 0, vec![false, true]))
}

/// Tracks whether a symbol of `y` occurred since the last symbol of `x`.
///
/// `s0` is unarmed, `s1` armed, `s2` the trap. Reading a symbol of `x` while
/// unarmed traps; otherwise a symbol of `y` arms, a symbol of `x` not in `y`
/// disarms, and anything else leaves the state unchanged.
pub fn altprec_fsa(y: &BTreeSet<String>, x: &BTreeSet<String>, alphabet: &[String]) -> Result<Fsa, FsaError> {
    let alphabet = sorted(alphabet);
    check(y, &alphabet)?;
    check(x, &alphabet)?;
    let delta = (0..3u32)
        .map(|q| {
            (0..alphabet.len() as u32)
                .map(|s| {
                    let sym = &alphabet[s as usize];
                    let next = if q == 2 || (q == 0 && x.contains(sym)) {
                        2
                    } else if y.contains(sym) {
                        1
                    } else if x.contains(sym) {
                        0
                    } else {
                        q
                    };
                    (s, next)
                })
                .collect()
        })
        .collect();
    Ok(Fsa::from_rows(alphabet, delta, 0, vec![true, true, false]))
}

/// The template automaton of a constraint over `alphabet`.
pub fn constraint_fsa(c: &Constraint, alphabet: &[String]) -> Result<Fsa, FsaError> {
    match c.template() {
        Template::AtMostOne => atmostone_fsa(&c.params()[0], alphabet),
        Template::End => end_fsa(&c.params()[0], alphabet),
        Template::AlternatePrecedence => altprec_fsa(&c.params()[0], &c.params()[1], alphabet),
    }
}
