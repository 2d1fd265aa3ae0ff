//! Small bitset over the agents of one side of a market.

use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

/// Largest side a market may have. Choice tables hold `2^n` entries.
pub const MAX_SIDE: usize = 16;

/// A subset of one side of the market, stored as a bitmask over agent indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentSet(u32);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        AgentSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// Every agent of a side with `n` members.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_SIDE);
        AgentSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(index: usize) -> Self {
        AgentSet(1 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(Self::EMPTY, |s, i| s.with(i))
    }

    pub fn with(self, index: usize) -> Self {
        AgentSet(self.0 | (1 << index))
    }

    pub fn without(self, index: usize) -> Self {
        AgentSet(self.0 & !(1 << index))
    }

    pub fn contains(self, index: usize) -> bool {
        index < 32 && self.0 & (1 << index) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: AgentSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: AgentSet) -> Self {
        AgentSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AgentSet) -> Self {
        AgentSet(self.0 & other.0)
    }

    pub fn difference(self, other: AgentSet) -> Self {
        AgentSet(self.0 & !other.0)
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, ascending by bitmask (starting with the empty set).
    pub fn subsets(self) -> impl Iterator<Item = AgentSet> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some(cur.wrapping_sub(mask) & mask)
            };
            Some(AgentSet(cur))
        })
    }

    /// Subsets of `self` in canonical order: larger sets first, ties broken by
    /// ascending bitmask. Validator counterexamples are reported in this order.
    pub fn canonical_subsets(self) -> Vec<AgentSet> {
        let mut all: Vec<AgentSet> = self.subsets().collect();
        all.sort_by_key(|s| (std::cmp::Reverse(s.len()), s.0));
        all
    }
}

impl BitOr for AgentSet {
    type Output = AgentSet;
    fn bitor(self, rhs: AgentSet) -> AgentSet {
        self.union(rhs)
    }
}

impl BitAnd for AgentSet {
    type Output = AgentSet;
    fn bitand(self, rhs: AgentSet) -> AgentSet {
        self.intersection(rhs)
    }
}

impl Sub for AgentSet {
    type Output = AgentSet;
    fn sub(self, rhs: AgentSet) -> AgentSet {
        self.difference(rhs)
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_indices(iter)
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_ascending_and_complete() {
        let s = AgentSet::from_indices([0, 2, 3]);
        let subs: Vec<u32> = s.subsets().map(|x| x.bits()).collect();
        assert_eq!(subs, vec![0, 1, 4, 5, 8, 9, 12, 13]);
        assert_eq!(AgentSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn canonical_order_puts_large_sets_first() {
        let order = AgentSet::full(3).canonical_subsets();
        let bits: Vec<u32> = order.iter().map(|s| s.bits()).collect();
        assert_eq!(bits, vec![7, 3, 5, 6, 1, 2, 4, 0]);
    }

    #[test]
    fn set_ops() {
        let a = AgentSet::from_indices([0, 1]);
        let b = AgentSet::from_indices([1, 2]);
        assert_eq!(a | b, AgentSet::full(3));
        assert_eq!(a & b, AgentSet::singleton(1));
        assert_eq!(a - b, AgentSet::singleton(0));
        assert!(AgentSet::singleton(1).is_subset(a));
        assert!(!a.is_subset(b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(AgentSet::full(16).len(), 16);
    }
}
