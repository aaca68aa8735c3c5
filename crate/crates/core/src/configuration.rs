use crate::error::{Error, Result};

/// A subset of the edges of a fixed graph, bit-indexed by edge id.
///
/// This is the state of the random-cluster chain and the argument of every
/// oracle enumeration.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    pub fn empty(len: usize) -> Self {
        Configuration {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut c = Self::empty(len);
        for i in 0..len {
            c.set(i, true);
        }
        c
    }

    /// Builds a configuration of `len` edges from the low bits of `mask`.
    /// Only usable for `len <= 64`; this is the oracle's enumeration order.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64);
        Configuration {
            words: vec![mask & mask_low(len)],
            len,
        }
    }

    /// Inverse of `from_mask` for small configurations.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, open: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[i / 64];
        if open {
            *w |= 1u64 << (i % 64);
        } else {
            *w &= !(1u64 << (i % 64));
        }
    }

    pub fn count_open(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_open(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Coordinatewise `self <= other`, the partial order of the monotone coupling.
    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// Checks that this configuration indexes exactly `expected` edges.
    pub fn check_len(&self, expected: usize, what: &str) -> Result<()> {
        if self.len != expected {
            return Err(Error::validation(format!(
                "{what}: configuration indexes {} edges, expected {expected}",
                self.len
            )));
        }
        Ok(())
    }
}

impl std::fmt::Debug for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Configuration[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, "]")
    }
}

fn mask_low(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_order() {
        let lo = Configuration::from_mask(0b0101, 4);
        let hi = Configuration::from_mask(0b1101, 4);
        assert!(lo.is_subset_of(&hi));
        assert!(!hi.is_subset_of(&lo));
        assert!(lo.is_subset_of(&lo));
        assert_eq!(hi.count_open(), 3);
    }

    #[test]
    fn set_get_roundtrip_across_words() {
        let mut c = Configuration::empty(130);
        c.set(0, true);
        c.set(64, true);
        c.set(129, true);
        assert!(c.get(0) && c.get(64) && c.get(129));
        assert!(!c.get(63));
        assert_eq!(c.count_open(), 3);
        c.set(64, false);
        assert_eq!(c.count_open(), 2);
    }
}
