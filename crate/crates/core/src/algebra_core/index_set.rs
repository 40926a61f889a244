use std::fmt;

use crate::error::{Error, Result};

pub const MAX_GENERATORS: usize = 62;

/// Sorted set of generator indices, stored as a bitmask. Bit `i` is generator `i + 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSet(pub u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    /// Build from 1-based generator indices. Repeats are rejected.
    pub fn from_indices(indices: &[usize]) -> Result<IndexSet> {
        let mut m = 0u64;
        for &i in indices {
            if i == 0 || i > MAX_GENERATORS {
                return Err(Error::GeneratorOutOfRange { index: i, gens: MAX_GENERATORS });
            }
            let bit = 1u64 << (i - 1);
            if m & bit != 0 {
                return Err(Error::Parse(format!("repeated generator {i}")));
            }
            m |= bit;
        }
        Ok(IndexSet(m))
    }

    pub fn single(i: usize) -> IndexSet {
        debug_assert!(i >= 1 && i <= MAX_GENERATORS);
        IndexSet(1u64 << (i - 1))
    }

    /// All generators `1..=n`.
    pub fn full(n: usize) -> IndexSet {
        if n == 0 {
            IndexSet(0)
        } else {
            IndexSet(u64::MAX >> (64 - n))
        }
    }

    /// Generators `lo..=hi`.
    pub fn range(lo: usize, hi: usize) -> IndexSet {
        if hi < lo {
            return IndexSet(0);
        }
        IndexSet(IndexSet::full(hi).0 & !IndexSet::full(lo - 1).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= 64 && self.0 & (1u64 << (i - 1)) != 0
    }

    pub fn union(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 | o.0)
    }

    pub fn intersect(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 & o.0)
    }

    pub fn minus(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 & !o.0)
    }

    pub fn sym_diff(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 ^ o.0)
    }

    pub fn is_disjoint(self, o: IndexSet) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_subset(self, o: IndexSet) -> bool {
        self.0 & !o.0 == 0
    }

    /// Highest generator index present, or 0.
    pub fn max_index(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// 1-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.len());
        let mut m = self.0;
        while m != 0 {
            let t = m.trailing_zeros() as usize;
            v.push(t + 1);
            m &= m - 1;
        }
        v
    }

    /// Number of generators in `self` strictly below `i`.
    pub fn rank_below(self, i: usize) -> usize {
        (self.0 & ((1u64 << (i - 1)) - 1)).count_ones() as usize
    }

    /// Parity of the number of inversions when `self` (sorted) is followed by
    /// `other` (sorted), counting pairs (a in self, b in other) with a > b.
    pub fn merge_parity(self, other: IndexSet) -> u32 {
        let mut a = self.0 >> 1;
        let b = other.0;
        let mut s = 0u32;
        while a != 0 {
            s += (a & b).count_ones();
            a >>= 1;
        }
        s & 1
    }

    /// Sign of sorting the concatenation `self ++ other`; zero if they overlap.
    pub fn merge_sign(self, other: IndexSet) -> i32 {
        if !self.is_disjoint(other) {
            return 0;
        }
        if self.merge_parity(other) == 0 {
            1
        } else {
            -1
        }
    }

    /// Iterate over all subsets of `self`.
    pub fn subsets(self) -> impl Iterator<Item = IndexSet> {
        let full = self.0;
        let mut cur: Option<u64> = Some(0);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some((c.wrapping_sub(full)) & full) };
            Some(IndexSet(c))
        })
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().iter().map(|i| format!("e{i}")).collect();
        write!(f, "{}", parts.join("^"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_sign(a: &[usize], b: &[usize]) -> i32 {
        let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
        let mut sign = 1;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        sign
    }

    #[test]
    fn merge_sign_matches_bubble_sort() {
        for a in 0u64..64 {
            for b in 0u64..64 {
                let (sa, sb) = (IndexSet(a), IndexSet(b));
                let expect = if a & b != 0 { 0 } else { brute_sign(&sa.indices(), &sb.indices()) };
                assert_eq!(sa.merge_sign(sb), expect, "{a:b} {b:b}");
            }
        }
    }

    #[test]
    fn subsets_enumerates_all() {
        let s = IndexSet::from_indices(&[1, 3, 4]).unwrap();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
    }

    #[test]
    fn ranges() {
        assert_eq!(IndexSet::range(2, 4).indices(), vec![2, 3, 4]);
        assert_eq!(IndexSet::full(3).indices(), vec![1, 2, 3]);
        assert!(IndexSet::from_indices(&[1, 1]).is_err());
        assert!(IndexSet::from_indices(&[63]).is_err());
    }
}
