//! Dense fixed-width bitsets used by the pair-list engine.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct Bitset {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl Bitset {
    pub fn empty(len: usize) -> Self {
        Bitset {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut words = vec![!0u64; words_for(len)];
        let tail = len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
        if len == 0 {
            words.clear();
        }
        Bitset { len, words }
    }

    #[inline]
    pub fn test(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn clear_all(&mut self) {
        for w in &mut self.words {
            *w = 0;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> SetBits<'_> {
        SetBits {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

}

/// Non-empty intersection test over raw word slices (shorter slice wins).
#[inline]
pub(crate) fn slices_intersect(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b.iter()).any(|(x, y)| x & y != 0)
}

pub(crate) struct SetBits<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl<'a> Iterator for SetBits<'a> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * 64 + bit)
    }
}

/// Iterate set bits of a raw word slice, ascending.
pub(crate) fn iter_bits(words: &[u64]) -> SetBits<'_> {
    SetBits {
        words,
        word_idx: 0,
        current: words.first().copied().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_has_exact_tail() {
        let b = Bitset::full(67);
        assert_eq!(b.count(), 67);
        assert!(b.test(66));
        let mut c = b.clone();
        c.clear(66);
        assert_eq!(c.count(), 66);
    }

    #[test]
    fn iter_ascending() {
        let mut b = Bitset::empty(130);
        for i in [0usize, 5, 63, 64, 129] {
            b.set(i);
        }
        let got: alloc::vec::Vec<usize> = b.iter().collect();
        assert_eq!(got, alloc::vec![0, 5, 63, 64, 129]);
    }
}
