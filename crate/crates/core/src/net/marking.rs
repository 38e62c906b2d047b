use std::fmt;

/// Token counts indexed by place position in the owning net.
///
/// Two markings of the same net compare equal exactly when every place holds
/// the same number of tokens, so `Marking` is its own canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(Vec<u32>);

impl Marking {
    /// All places empty.
    pub fn empty(places: usize) -> Self {
        Marking(vec![0; places])
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Marking(counts)
    }

    pub fn get(&self, place: usize) -> u32 {
        self.0.get(place).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// `(place, count)` for every place holding at least one token.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().enumerate().filter(|(_, &c)| c > 0).map(|(p, &c)| (p, c))
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn add_token(&mut self, place: usize) {
        self.0[place] += 1;
    }

    pub(crate) fn remove_token(&mut self, place: usize) {
        self.0[place] -= 1;
    }
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.support()).finish()
    }
}
