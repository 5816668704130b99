//! Finite subsets of `[1..n_max]` stored as a bitset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetMask {
    n_max: u64,
    words: Vec<u64>,
}

impl SubsetMask {
    pub fn empty(n_max: u64) -> Self {
        Self { n_max, words: vec![0; n_max.div_ceil(64) as usize] }
    }

    pub fn full(n_max: u64) -> Self {
        Self::from_predicate(n_max, |_| true)
    }

    pub fn from_predicate(n_max: u64, pred: impl Fn(u64) -> bool) -> Self {
        let mut s = Self::empty(n_max);
        for i in 1..=n_max {
            if pred(i) {
                s.set(i);
            }
        }
        s
    }

    pub fn from_members(n_max: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = Self::empty(n_max);
        for v in members {
            if v == 0 || v > n_max {
                return Err(Error::DomainExceeded { value: v, n_max });
            }
            s.set(v);
        }
        Ok(s)
    }

    /// Multiples of `k` in `[1..n_max]`.
    pub fn multiples(k: u64, n_max: u64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("multiples:k needs k >= 1"));
        }
        Ok(Self::from_predicate(n_max, |i| i % k == 0))
    }

    /// Each integer kept independently with probability `density`, drawn
    /// in increasing order from ChaCha8 seeded with `seed`.
    pub fn random(density: f64, seed: u64, n_max: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(invalid(format!("density {density} is outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = Self::empty(n_max);
        for i in 1..=n_max {
            if rng.gen_bool(density) {
                s.set(i);
            }
        }
        Ok(s)
    }

    fn set(&mut self, v: u64) {
        let i = (v - 1) as usize;
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// Membership; anything outside `[1..n_max]` is not a member.
    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        if v == 0 || v > self.n_max {
            return false;
        }
        let i = (v - 1) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Like `contains` but on a `u128` product, so callers need not pre-check the range.
    #[inline]
    pub fn contains_wide(&self, v: u128) -> bool {
        v <= self.n_max as u128 && self.contains(v as u64)
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.n_max).filter(|&v| self.contains(v))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Hex digit `k` (from the left) holds integers `4k+1..=4k+4`, least
    /// significant bit first. The string has exactly `⌈n_max/4⌉` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.n_max.div_ceil(4);
        (0..digits)
            .map(|k| {
                let nibble = (0..4).fold(0u32, |acc, b| acc | (u32::from(self.contains(4 * k + b + 1)) << b));
                char::from_digit(nibble, 16).expect("nibble")
            })
            .collect()
    }

    pub fn from_hex(n_max: u64, hex: &str) -> Result<Self> {
        let hex: String = hex.chars().filter(|c| !c.is_whitespace()).collect();
        if hex.len() as u64 != n_max.div_ceil(4) {
            return Err(invalid(format!(
                "hex mask for n_max = {n_max} needs {} digits, got {}",
                n_max.div_ceil(4),
                hex.len()
            )));
        }
        let mut s = Self::empty(n_max);
        for (k, ch) in hex.chars().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| invalid(format!("bad hex digit {ch:?}")))?;
            for b in 0..4u64 {
                if nibble >> b & 1 == 1 {
                    let v = 4 * k as u64 + b + 1;
                    if v > n_max {
                        return Err(Error::DomainExceeded { value: v, n_max });
                    }
                    s.set(v);
                }
            }
        }
        Ok(s)
    }

    /// Parses the `n_max <N>` header followed by the hex digits.
    pub fn parse_hex_document(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| invalid("empty hex mask document"))?;
        let n_max = header
            .trim()
            .strip_prefix("n_max")
            .and_then(|rest| rest.trim().parse::<u64>().ok())
            .ok_or_else(|| invalid(format!("expected `n_max <N>` header, got {header:?}")))?;
        let body: String = lines.collect();
        Self::from_hex(n_max, &body)
    }

    pub fn to_hex_document(&self) -> String {
        format!("n_max {}\n{}\n", self.n_max, self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn membership_and_counts() {
        let s = SubsetMask::multiples(6, 100).unwrap();
        assert_eq!(s.len(), 16);
        assert_eq!(s.iter().count() as u64, s.len());
        assert!(s.contains(96) && !s.contains(97) && !s.contains(0) && !s.contains(102));
        assert!(SubsetMask::empty(10).is_empty());
        assert_eq!(SubsetMask::full(130).len(), 130);
        assert!(SubsetMask::from_members(5, [6]).is_err());
    }

    #[test]
    fn random_density_extremes() {
        assert_eq!(SubsetMask::random(1.0, 3, 50).unwrap().len(), 50);
        assert!(SubsetMask::random(0.0, 3, 50).unwrap().is_empty());
        assert_eq!(SubsetMask::random(0.5, 9, 500).unwrap(), SubsetMask::random(0.5, 9, 500).unwrap());
        assert!(SubsetMask::random(1.5, 0, 10).is_err());
    }

    #[test]
    fn hex_layout() {
        let s = SubsetMask::from_members(8, [1, 4, 6]).unwrap();
        assert_eq!(s.to_hex(), "92");
        assert!(SubsetMask::from_hex(6, "fc").is_err()); // bits for 7, 8 > n_max
    }

    proptest! {
        #[test]
        fn hex_document_roundtrip(n_max in 0u64..300, seed in any::<u64>(), density in 0.0f64..1.0) {
            let s = SubsetMask::random(density, seed, n_max).unwrap();
            let back = SubsetMask::parse_hex_document(&s.to_hex_document()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
