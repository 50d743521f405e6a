use serde::{Deserialize, Serialize};

/// All `arity`-tuples over the digits `0..base`, indexed lexicographically.
///
/// Symbol `i` is the tuple whose base-`base` expansion (track 0 most
/// significant) equals `i`, so the all-zero tuple is always symbol 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitAlphabet {
    base: u32,
    arity: usize,
}

impl DigitAlphabet {
    pub fn new(base: u32, arity: usize) -> Self {
        assert!(base >= 2, "base must be at least 2");
        assert!(arity >= 1, "arity must be at least 1");
        assert!((base as u64).checked_pow(arity as u32).is_some_and(|s| s <= 1 << 24), "alphabet too large");
        Self { base, arity }
    }

    pub fn unary(base: u32) -> Self {
        Self::new(base, 1)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        (self.base as usize).pow(self.arity as u32)
    }

    pub fn encode(&self, digits: &[u32]) -> Option<usize> {
        if digits.len() != self.arity || digits.iter().any(|&d| d >= self.base) {
            return None;
        }
        Some(digits.iter().fold(0usize, |acc, &d| acc * self.base as usize + d as usize))
    }

    pub fn decode(&self, symbol: usize) -> Vec<u32> {
        let mut out = vec![0; self.arity];
        let mut rest = symbol;
        for slot in out.iter_mut().rev() {
            *slot = (rest % self.base as usize) as u32;
            rest /= self.base as usize;
        }
        out
    }

    /// Digit on one track of a symbol.
    pub fn digit(&self, symbol: usize, track: usize) -> u32 {
        let shift = (self.base as usize).pow((self.arity - 1 - track) as u32);
        ((symbol / shift) % self.base as usize) as u32
    }

    pub fn symbols(&self) -> std::ops::Range<usize> {
        0..self.size()
    }
}

/// Canonical most-significant-first digits of `n`; zero is the empty string.
pub fn digits_msd(mut n: u64, base: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % base as u64) as u32);
        n /= base as u64;
    }
    out.reverse();
    out
}
