//! Fixed-width bit vector backing [`Subset`](crate::Subset) and
//! [`EventSet`](crate::EventSet).

use std::fmt;

const WORD: usize = 64;

/// A set over the universe `0..len`. The trailing bits of the last word are
/// always zero so that equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub(crate) fn full(len: usize) -> Self {
        let mut set = Self {
            len,
            words: vec![!0; len.div_ceil(WORD)],
        };
        set.clear_tail();
        set
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub(crate) fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub(crate) fn contains(&self, idx: usize) -> bool {
        idx < self.len && self.words[idx / WORD] & (1 << (idx % WORD)) != 0
    }

    pub(crate) fn insert(&mut self, idx: usize) -> bool {
        assert!(idx < self.len, "index {idx} outside universe of {}", self.len);
        let word = &mut self.words[idx / WORD];
        let mask = 1 << (idx % WORD);
        let fresh = *word & mask == 0;
        *word |= mask;
        fresh
    }

    pub(crate) fn remove(&mut self, idx: usize) -> bool {
        if idx >= self.len {
            return false;
        }
        let word = &mut self.words[idx / WORD];
        let mask = 1 << (idx % WORD);
        let present = *word & mask != 0;
        *word &= !mask;
        present
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "bit sets over different universes");
        let mut out = Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        };
        out.clear_tail();
        out
    }

    pub(crate) fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub(crate) fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub(crate) fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub(crate) fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub(crate) fn complement(&self) -> Self {
        let mut out = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    pub(crate) fn is_subset(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "bit sets over different universes");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0)
    }

    pub(crate) fn is_disjoint(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "bit sets over different universes");
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & b == 0)
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + bit)
            })
        })
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
