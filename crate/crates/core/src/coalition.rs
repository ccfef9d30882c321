use std::cmp::Ordering;
use std::fmt;

/// Hard limit on the number of players: coalitions are 64-bit masks.
pub const MAX_PLAYERS: usize = 64;

/// A set of players, stored as a bitmask over player indices.
///
/// Coalitions order by size first and then by mask value, which is the
/// order every enumeration in this crate reports results in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The grand coalition over `n` players.
    pub fn grand(n: usize) -> Self {
        assert!(n <= MAX_PLAYERS, "at most {MAX_PLAYERS} players");
        if n == MAX_PLAYERS {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_PLAYERS);
        Coalition(1u64 << i)
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        players
            .into_iter()
            .fold(Coalition::EMPTY, |acc, i| acc.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_PLAYERS && self.0 >> i & 1 == 1
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        Coalition(self.0 | Coalition::singleton(i).0)
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        Coalition(self.0 & !Coalition::singleton(i).0)
    }

    pub fn insert(&mut self, i: usize) {
        *self = self.with(i);
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Self {
        Coalition(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Scatters the low bits of `compact` onto the members of `self`, in
    /// increasing member order. `Coalition(0b1010).deposit(0b10) == {3}`.
    pub fn deposit(self, compact: u64) -> Coalition {
        let mut out = 0u64;
        let mut mask = self.0;
        let mut k = 0;
        while mask != 0 {
            let low = mask & mask.wrapping_neg();
            if compact >> k & 1 == 1 {
                out |= low;
            }
            mask ^= low;
            k += 1;
        }
        Coalition(out)
    }

    /// Inverse of [`Coalition::deposit`]: gathers the bits of `sub` that lie on
    /// the members of `self` into the low bits of the result.
    pub fn extract(self, sub: Coalition) -> u64 {
        let mut out = 0u64;
        for (k, i) in self.iter().enumerate() {
            if sub.contains(i) {
                out |= 1 << k;
            }
        }
        out
    }

    /// Every subset of `self`, smallest mask first.
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.0,
            next: Some(0),
        }
    }
}

impl Ord for Coalition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Coalition::from_players(iter)
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

pub struct Subsets {
    universe: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Coalition;

    fn next(&mut self) -> Option<Coalition> {
        let cur = self.next?;
        // standard "next submask in increasing order" step
        let succ = cur.wrapping_sub(self.universe) & self.universe;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(Coalition(cur))
    }
}

/// The family `{ S : include ⊆ S ⊆ universe, S ∩ exclude = ∅ }`.
///
/// `I_{i,j}` is `CoalitionFamily::new(n, {i}, {j})`; the family is never
/// materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoalitionFamily {
    pub include: Coalition,
    pub exclude: Coalition,
    pub universe: Coalition,
}

impl CoalitionFamily {
    pub fn new(n: usize, include: Coalition, exclude: Coalition) -> Self {
        CoalitionFamily {
            include,
            exclude,
            universe: Coalition::grand(n),
        }
    }

    pub fn all(n: usize) -> Self {
        Self::new(n, Coalition::EMPTY, Coalition::EMPTY)
    }

    /// `I_{i,j}`: coalitions containing `i` but not `j`.
    pub fn containing_excluding(n: usize, i: usize, j: usize) -> Self {
        Self::new(n, Coalition::singleton(i), Coalition::singleton(j))
    }

    pub fn is_empty(&self) -> bool {
        !self.include.is_disjoint(self.exclude) || !self.include.is_subset_of(self.universe)
    }

    pub fn free(&self) -> Coalition {
        self.universe.difference(self.include).difference(self.exclude)
    }

    pub fn contains(&self, s: Coalition) -> bool {
        self.include.is_subset_of(s) && s.is_disjoint(self.exclude) && s.is_subset_of(self.universe)
    }

    /// Number of members; `None` when it does not fit in a `u64`.
    pub fn size(&self) -> Option<u64> {
        if self.is_empty() {
            return Some(0);
        }
        1u64.checked_shl(self.free().len() as u32)
    }

    /// The `k`-th member in mask order of the free players.
    pub fn nth(&self, k: u64) -> Coalition {
        self.include.union(self.free().deposit(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = Coalition> + '_ {
        let empty = self.is_empty();
        self.free()
            .subsets()
            .filter(move |_| !empty)
            .map(move |s| s.union(self.include))
    }
}
