//! Deterministic finite automata over string symbols.
//!
//! States are dense indices. The transition function is partial: a missing
//! entry sends the automaton to an implicit rejecting sink.

mod dot;
mod templates;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

pub use templates::{altprec_fsa, atmostone_fsa, constraint_fsa, end_fsa};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsaError {
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("state {0} is out of range")]
    StateOutOfRange(usize),
    #[error("state {state} has two transitions on `{symbol}`")]
    Nondeterministic { state: usize, symbol: String },
    #[error("parameter set is empty")]
    EmptyParameter,
    #[error("product exceeds the limit of {limit} states")]
    StateLimit { limit: usize },
}

/// Result of a language-equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceWitness {
    Equivalent,
    /// `witness` is accepted by exactly one side; `left_accepts` says which.
    Distinguished { witness: Vec<String>, left_accepts: bool },
}

impl EquivalenceWitness {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceWitness::Equivalent)
    }
}

/// A deterministic, possibly incomplete, finite automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsa {
    alphabet: Vec<String>,
    // per state: (symbol index, target) sorted by symbol index
    delta: Vec<Vec<(u32, u32)>>,
    initial: usize,
    accepting: Vec<bool>,
    labels: Option<Vec<String>>,
}

impl Fsa {
    /// Builds an automaton. `alphabet` is sorted and deduplicated; transitions
    /// are `(from, symbol, to)` triples.
    pub fn new<S: AsRef<str>>(
        alphabet: &[S],
        states: usize,
        initial: usize,
        accepting: &[usize],
        transitions: &[(usize, S, usize)],
    ) -> Result<Self, FsaError> {
        let mut alpha: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        alpha.sort();
        alpha.dedup();
        if initial >= states {
            return Err(FsaError::StateOutOfRange(initial));
        }
        let mut acc = vec![false; states];
        for &q in accepting {
            *acc.get_mut(q).ok_or(FsaError::StateOutOfRange(q))? = true;
        }
        let mut delta = vec![Vec::new(); states];
        for (from, sym, to) in transitions {
            if *from >= states {
                return Err(FsaError::StateOutOfRange(*from));
            }
            if *to >= states {
                return Err(FsaError::StateOutOfRange(*to));
            }
            let a = alpha
                .binary_search_by(|x| x.as_str().cmp(sym.as_ref()))
                .map_err(|_| FsaError::UnknownSymbol(sym.as_ref().to_string()))?;
            delta[*from].push((a as u32, *to as u32));
        }
        for (q, row) in delta.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(FsaError::Nondeterministic { state: q, symbol: alpha[w[0].0 as usize].clone() });
            }
        }
        Ok(Fsa { alphabet: alpha, delta, initial, accepting: acc, labels: None })
    }

    /// Builds from already-indexed rows; rows must be sorted by symbol.
    pub(crate) fn from_rows(alphabet: Vec<String>, delta: Vec<Vec<(u32, u32)>>, initial: usize, accepting: Vec<bool>) -> Self {
        debug_assert!(delta.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)));
        Fsa { alphabet, delta, initial, accepting, labels: None }
    }

    /// The canonical automaton of the empty language.
    pub fn empty_language(alphabet: Vec<String>) -> Self {
        Fsa { alphabet, delta: vec![Vec::new()], initial: 0, accepting: vec![false], labels: None }
    }

    /// Attaches a display label to every state.
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.delta.len());
        self.labels = Some(labels);
        self
    }

    pub fn label(&self, q: usize) -> String {
        match &self.labels {
            Some(l) => l[q].clone(),
            None => format!("s{q}"),
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn edge_count(&self) -> usize {
        self.delta.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.delta.len()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.binary_search_by(|x| x.as_str().cmp(symbol)).ok()
    }

    /// Outgoing `(symbol index, target)` pairs of `q`.
    pub fn edges(&self, q: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.delta[q].iter().map(|&(a, t)| (a as usize, t as usize))
    }

    pub fn step(&self, q: usize, symbol: usize) -> Option<usize> {
        let row = &self.delta[q];
        row.binary_search_by_key(&(symbol as u32), |e| e.0).ok().map(|i| row[i].1 as usize)
    }

    /// The state reached after reading `word`, if the run does not fall off.
    pub fn run<S: AsRef<str>>(&self, word: &[S]) -> Result<Option<usize>, FsaError> {
        let mut q = self.initial;
        for s in word {
            let a = self.symbol_index(s.as_ref()).ok_or_else(|| FsaError::UnknownSymbol(s.as_ref().to_string()))?;
            match self.step(q, a) {
                Some(n) => q = n,
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> Result<bool, FsaError> {
        Ok(self.run(word)?.is_some_and(|q| self.accepting[q]))
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|r| r.len() == self.alphabet.len())
    }

    /// Adds a rejecting sink (only when needed) so that every transition is defined.
    pub fn complete(&self) -> Fsa {
        if self.is_complete() {
            return self.clone();
        }
        let k = self.alphabet.len() as u32;
        let sink = self.delta.len() as u32;
        let mut delta: Vec<Vec<(u32, u32)>> = self
            .delta
            .iter()
            .map(|row| {
                let mut full = Vec::with_capacity(k as usize);
                let mut it = row.iter().peekable();
                for a in 0..k {
                    match it.peek() {
                        Some(&&(b, t)) if b == a => {
                            full.push((a, t));
                            it.next();
                        }
                        _ => full.push((a, sink)),
                    }
                }
                full
            })
            .collect();
        delta.push((0..k).map(|a| (a, sink)).collect());
        let mut accepting = self.accepting.clone();
        accepting.push(false);
        let labels = self.labels.clone().map(|mut l| {
            l.push("sink".into());
            l
        });
        Fsa { alphabet: self.alphabet.clone(), delta, initial: self.initial, accepting, labels }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.delta.len()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for &(_, t) in &self.delta[q] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back(t as usize);
                }
            }
        }
        seen
    }

    fn reverse(&self) -> Vec<Vec<usize>> {
        let mut rev = vec![Vec::new(); self.delta.len()];
        for (q, row) in self.delta.iter().enumerate() {
            for &(_, t) in row {
                rev[t as usize].push(q);
            }
        }
        rev
    }

    /// Shortest distance from each state to an accepting state (`usize::MAX` if none).
    pub fn distance_to_accept(&self) -> Vec<usize> {
        let rev = self.reverse();
        let mut dist = vec![usize::MAX; self.delta.len()];
        let mut queue = VecDeque::new();
        for q in 0..self.delta.len() {
            if self.accepting[q] {
                dist[q] = 0;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &p in &rev[q] {
                if dist[p] == usize::MAX {
                    dist[p] = dist[q] + 1;
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    /// Keeps only the states reachable from the initial state that can also
    /// reach an accepting state. An empty language yields [`Fsa::empty_language`].
    pub fn trim(&self) -> Fsa {
        let reach = self.reachable();
        let dist = self.distance_to_accept();
        let keep: Vec<bool> = (0..self.delta.len()).map(|q| reach[q] && dist[q] != usize::MAX).collect();
        if !keep[self.initial] {
            return Fsa::empty_language(self.alphabet.clone());
        }
        self.restrict(&keep)
    }

    /// Sub-automaton on the kept states, renumbered in BFS order from the initial state.
    fn restrict(&self, keep: &[bool]) -> Fsa {
        let mut index = vec![u32::MAX; self.delta.len()];
        let mut order = vec![self.initial];
        index[self.initial] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for &(_, t) in &self.delta[q] {
                let t = t as usize;
                if keep[t] && index[t] == u32::MAX {
                    index[t] = order.len() as u32;
                    order.push(t);
                }
            }
        }
        let delta = order
            .iter()
            .map(|&q| {
                self.delta[q]
                    .iter()
                    .filter(|&&(_, t)| keep[t as usize])
                    .map(|&(a, t)| (a, index[t as usize]))
                    .collect()
            })
            .collect();
        let accepting = order.iter().map(|&q| self.accepting[q]).collect();
        let labels = self.labels.as_ref().map(|l| order.iter().map(|&q| l[q].clone()).collect());
        Fsa { alphabet: self.alphabet.clone(), delta, initial: 0, accepting, labels }
    }

    /// The minimal complete automaton for the same language (Hopcroft's
    /// partition refinement). Incomplete inputs are completed first.
    pub fn minimize(&self) -> Fsa {
        let reach = self.reachable();
        let a = self.restrict(&reach).complete();
        let n = a.delta.len();
        let k = a.alphabet.len();
        // inverse transitions per symbol
        let mut inv: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); n]; k];
        for (q, row) in a.delta.iter().enumerate() {
            for &(s, t) in row {
                inv[s as usize][t as usize].push(q as u32);
            }
        }
        let mut part = Partition::new(n, &a.accepting);
        let mut pending: Vec<Vec<bool>> = Vec::new();
        let mut work: Vec<(usize, usize)> = Vec::new();
        for b in 0..part.blocks.len() {
            pending.push(vec![true; k]);
            for s in 0..k {
                work.push((b, s));
            }
        }
        let mut touched: Vec<usize> = Vec::new();
        let mut hits = vec![0usize; n];
        while let Some((b, s)) = work.pop() {
            pending[b][s] = false;
            let splitter: Vec<u32> = part.blocks[b].clone();
            for &q in &splitter {
                for &p in &inv[s][q as usize] {
                    let blk = part.block_of[p as usize];
                    if part.mark(p as usize) {
                        if hits[blk] == 0 {
                            touched.push(blk);
                        }
                        hits[blk] += 1;
                    }
                }
            }
            for blk in touched.drain(..) {
                hits[blk] = 0;
                if let Some(new) = part.split(blk) {
                    pending.push(vec![false; k]);
                    for c in 0..k {
                        if pending[blk][c] {
                            pending[new][c] = true;
                            work.push((new, c));
                        } else {
                            let smaller = if part.blocks[new].len() <= part.blocks[blk].len() { new } else { blk };
                            pending[smaller][c] = true;
                            work.push((smaller, c));
                        }
                    }
                }
            }
        }
        let m = part.blocks.len();
        let mut delta = vec![Vec::new(); m];
        let mut accepting = vec![false; m];
        for (b, states) in part.blocks.iter().enumerate() {
            let rep = states[0] as usize;
            accepting[b] = a.accepting[rep];
            delta[b] = a.delta[rep].iter().map(|&(s, t)| (s, part.block_of[t as usize] as u32)).collect();
        }
        let quotient = Fsa {
            alphabet: a.alphabet.clone(),
            delta,
            initial: part.block_of[a.initial],
            accepting,
            labels: None,
        };
        quotient.restrict(&vec![true; m])
    }

    /// Language equivalence by union-find state merging on the completed
    /// automata. When the languages differ, the witness is a shortest string
    /// accepted by exactly one side.
    pub fn equivalent(&self, other: &Fsa) -> Result<EquivalenceWitness, FsaError> {
        if self.alphabet != other.alphabet {
            return Err(FsaError::AlphabetMismatch);
        }
        let a = self.complete();
        let b = other.complete();
        let off = a.delta.len();
        let mut uf = UnionFind::new(off + b.delta.len());
        let acc = |q: usize| if q < off { a.accepting[q] } else { b.accepting[q - off] };
        let succ = |q: usize, s: usize| {
            if q < off {
                a.delta[q][s].1 as usize
            } else {
                off + b.delta[q - off][s].1 as usize
            }
        };
        let mut stack = vec![(a.initial, off + b.initial)];
        uf.union(a.initial, off + b.initial);
        let mut same = true;
        while let Some((p, q)) = stack.pop() {
            if acc(p) != acc(q) {
                same = false;
                break;
            }
            for s in 0..a.alphabet.len() {
                let (x, y) = (succ(p, s), succ(q, s));
                if uf.union(x, y) {
                    stack.push((x, y));
                }
            }
        }
        if same {
            return Ok(EquivalenceWitness::Equivalent);
        }
        let (word, left_accepts) = shortest_distinguishing(&a, &b).expect("languages differ");
        Ok(EquivalenceWitness::Distinguished { witness: word, left_accepts })
    }

    /// Synchronous product on reachable pairs; accepting where both accept.
    pub fn product(&self, other: &Fsa) -> Result<Fsa, FsaError> {
        product_all(&[self, other], false)
    }

    /// All accepted strings of length at most `max_len`, in length-lexicographic order.
    pub fn accepted_strings(&self, max_len: usize) -> Vec<Vec<String>> {
        let dist = self.distance_to_accept();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut path = Vec::new();
        self.collect_accepted(self.initial, max_len, &dist, &mut path, &mut out);
        out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        out.into_iter()
            .map(|w| w.into_iter().map(|a| self.alphabet[a].clone()).collect())
            .collect()
    }

    fn collect_accepted(&self, q: usize, budget: usize, dist: &[usize], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dist[q] > budget {
            return;
        }
        if self.accepting[q] {
            out.push(path.clone());
        }
        if budget == 0 {
            return;
        }
        for &(a, t) in &self.delta[q] {
            path.push(a as usize);
            self.collect_accepted(t as usize, budget - 1, dist, path, out);
            path.pop();
        }
    }

    /// Whether the reachable parts of two automata are identical up to renaming of states.
    pub fn isomorphic(&self, other: &Fsa) -> bool {
        if self.alphabet != other.alphabet {
            return false;
        }
        let mut map: HashMap<usize, usize> = HashMap::from([(self.initial, other.initial)]);
        let mut back: HashMap<usize, usize> = HashMap::from([(other.initial, self.initial)]);
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        while let Some((p, q)) = queue.pop_front() {
            if self.accepting[p] != other.accepting[q] || self.delta[p].len() != other.delta[q].len() {
                return false;
            }
            for (&(a, x), &(b, y)) in self.delta[p].iter().zip(&other.delta[q]) {
                if a != b {
                    return false;
                }
                let (x, y) = (x as usize, y as usize);
                match (map.get(&x), back.get(&y)) {
                    (None, None) => {
                        map.insert(x, y);
                        back.insert(y, x);
                        queue.push_back((x, y));
                    }
                    (Some(&mx), Some(&by)) if mx == y && by == x => {}
                    _ => return false,
                }
            }
        }
        true
    }

    pub fn to_dot(&self) -> String {
        dot::render(self)
    }
}

/// BFS over pairs of complete automata for a shortest string accepted by exactly one.
fn shortest_distinguishing(a: &Fsa, b: &Fsa) -> Option<(Vec<String>, bool)> {
    let start = (a.initial, b.initial);
    let mut parent: HashMap<(usize, usize), ((usize, usize), usize)> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    parent.insert(start, (start, usize::MAX));
    while let Some((p, q)) = queue.pop_front() {
        if a.accepting[p] != b.accepting[q] {
            let mut word = Vec::new();
            let mut cur = (p, q);
            while cur != start {
                let (prev, sym) = parent[&cur];
                word.push(a.alphabet[sym].clone());
                cur = prev;
            }
            word.reverse();
            return Some((word, a.accepting[p]));
        }
        for s in 0..a.alphabet.len() {
            let next = (a.delta[p][s].1 as usize, b.delta[q][s].1 as usize);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(((p, q), s));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Synchronous product of several automata over a shared alphabet, built on
/// the fly from the tuple of initial states. With `prune_dead`, tuples in
/// which some component can no longer accept are dropped as soon as they are
/// generated, and the result is trimmed.
pub fn product_all(parts: &[&Fsa], prune_dead: bool) -> Result<Fsa, FsaError> {
    product_all_bounded(parts, prune_dead, usize::MAX)
}

/// [`product_all`] that gives up once more than `limit` tuples are discovered.
pub fn product_all_bounded(parts: &[&Fsa], prune_dead: bool, limit: usize) -> Result<Fsa, FsaError> {
    let first = parts.first().expect("at least one automaton");
    if parts.iter().any(|p| p.alphabet != first.alphabet) {
        return Err(FsaError::AlphabetMismatch);
    }
    let alphabet = first.alphabet.clone();
    let live: Vec<Vec<bool>> = parts
        .iter()
        .map(|p| p.distance_to_accept().into_iter().map(|d| d != usize::MAX || !prune_dead).collect())
        .collect();
    let start: Vec<u32> = parts.iter().map(|p| p.initial as u32).collect();
    if start.iter().enumerate().any(|(i, &q)| !live[i][q as usize]) {
        return Ok(Fsa::empty_language(alphabet));
    }
    let mut index: HashMap<Vec<u32>, u32> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut delta: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let tuple = states[i].clone();
        i += 1;
        let mut row = Vec::new();
        'symbol: for s in 0..alphabet.len() {
            let mut next = Vec::with_capacity(parts.len());
            for (c, p) in parts.iter().enumerate() {
                match p.step(tuple[c] as usize, s) {
                    Some(t) if live[c][t] => next.push(t as u32),
                    _ => continue 'symbol,
                }
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= limit {
                        return Err(FsaError::StateLimit { limit });
                    }
                    let id = states.len() as u32;
                    index.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            row.push((s as u32, id));
        }
        delta.push(row);
    }
    let accepting = states
        .iter()
        .map(|t| t.iter().enumerate().all(|(c, &q)| parts[c].accepting[q as usize]))
        .collect();
    let fsa = Fsa { alphabet, delta, initial: 0, accepting, labels: None };
    Ok(if prune_dead { fsa.trim() } else { fsa })
}

struct Partition {
    blocks: Vec<Vec<u32>>,
    block_of: Vec<usize>,
    pos: Vec<usize>,
    // number of marked states at the front of each block
    marked: Vec<usize>,
}

impl Partition {
    fn new(n: usize, accepting: &[bool]) -> Self {
        let mut acc = Vec::new();
        let mut rej = Vec::new();
        for q in 0..n {
            if accepting[q] { acc.push(q as u32) } else { rej.push(q as u32) }
        }
        let blocks: Vec<Vec<u32>> = [acc, rej].into_iter().filter(|b| !b.is_empty()).collect();
        let mut block_of = vec![0; n];
        let mut pos = vec![0; n];
        for (b, states) in blocks.iter().enumerate() {
            for (i, &q) in states.iter().enumerate() {
                block_of[q as usize] = b;
                pos[q as usize] = i;
            }
        }
        let marked = vec![0; blocks.len()];
        Partition { blocks, block_of, pos, marked }
    }

    /// Moves `q` into the marked prefix of its block; false if already marked.
    fn mark(&mut self, q: usize) -> bool {
        let b = self.block_of[q];
        let i = self.pos[q];
        let m = self.marked[b];
        if i < m {
            return false;
        }
        let other = self.blocks[b][m] as usize;
        self.blocks[b].swap(i, m);
        self.pos[other] = i;
        self.pos[q] = m;
        self.marked[b] += 1;
        true
    }

    /// Splits the marked prefix off block `b` when it is a proper subset.
    fn split(&mut self, b: usize) -> Option<usize> {
        let m = std::mem::take(&mut self.marked[b]);
        if m == self.blocks[b].len() {
            return None;
        }
        let moved: Vec<u32> = self.blocks[b].drain(..m).collect();
        for (i, &q) in self.blocks[b].iter().enumerate() {
            self.pos[q as usize] = i;
        }
        let new = self.blocks.len();
        for (i, &q) in moved.iter().enumerate() {
            self.block_of[q as usize] = new;
            self.pos[q as usize] = i;
        }
        self.blocks.push(moved);
        self.marked.push(0);
        Some(new)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two classes were distinct.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab_even_a() -> Fsa {
        // even number of a's
        Fsa::new(&["a", "b"], 2, 0, &[0], &[(0, "a", 1), (0, "b", 0), (1, "a", 0), (1, "b", 1)]).unwrap()
    }

    #[test]
    fn rejects_nondeterminism() {
        let r = Fsa::new(&["a"], 2, 0, &[1], &[(0, "a", 1), (0, "a", 0)]);
        assert!(matches!(r, Err(FsaError::Nondeterministic { .. })));
    }

    #[test]
    fn minimize_merges_duplicate_states() {
        // three-state copy of the even-a automaton
        let big = Fsa::new(
            &["a", "b"],
            3,
            0,
            &[0, 2],
            &[(0, "a", 1), (0, "b", 2), (1, "a", 2), (1, "b", 1), (2, "a", 1), (2, "b", 0)],
        )
        .unwrap();
        let m = big.minimize();
        assert_eq!(m.state_count(), 2);
        assert!(m.isomorphic(&ab_even_a()));
    }

    #[test]
    fn equivalence_finds_shortest_witness() {
        let odd = Fsa::new(&["a", "b"], 2, 0, &[1], &[(0, "a", 1), (0, "b", 0), (1, "a", 0), (1, "b", 1)]).unwrap();
        let r = ab_even_a().equivalent(&odd).unwrap();
        assert_eq!(r, EquivalenceWitness::Distinguished { witness: vec![], left_accepts: true });
        assert!(ab_even_a().equivalent(&ab_even_a()).unwrap().is_equivalent());
    }

    #[test]
    fn trim_of_empty_language_is_canonical() {
        let dead = Fsa::new(&["a"], 2, 0, &[], &[(0, "a", 1)]).unwrap();
        let t = dead.trim();
        assert_eq!(t.state_count(), 1);
        assert_eq!(t.edge_count(), 0);
        assert!(!t.is_accepting(0));
    }

    #[test]
    fn accepted_strings_are_length_bounded() {
        let words = ab_even_a().accepted_strings(2);
        assert_eq!(words, vec![vec![], vec!["b".to_string()], vec!["a".into(), "a".into()], vec!["b".into(), "b".into()]]);
    }
}
