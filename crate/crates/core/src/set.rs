//! Dense bit-sets over the element indices `0..n` of a finite loop.

use std::fmt;

/// A subset of `0..n`, stored one bit per element.
///
/// Ordering compares the underlying words, which gives the deterministic
/// "sorted by bit-set encoding" order used for enumeration results.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    words: Vec<u64>,
    universe: usize,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for x in 0..universe {
            set.insert(x);
        }
        set
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(universe: usize, elements: I) -> Self {
        let mut set = Self::empty(universe);
        for x in elements {
            set.insert(x);
        }
        set
    }

    /// Size of the ambient index range, not the number of members.
    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Returns `true` if `x` was not already present.
    pub fn insert(&mut self, x: usize) -> bool {
        assert!(x < self.universe, "element {x} outside 0..{}", self.universe);
        let (w, b) = (x / 64, x % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, x: usize) {
        if x < self.universe {
            self.words[x / 64] &= !(1 << (x % 64));
        }
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        x < self.universe && self.words[x / 64] & (1 << (x % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            universe: self.universe,
        }
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
            universe: self.universe,
        }
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
