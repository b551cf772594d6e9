//! Packed bitstrings.
//!
//! Bit `i` of a string is its `i`-th character when printed, so index 0 is the
//! leftmost character of `"0011000"`. Ordering is lexicographic on that
//! character sequence, which coincides with numeric order for equal lengths
//! when the string is read most-significant-bit first.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length string over `{0,1}`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        s.clear_tail();
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::zeros(0);
        for b in bits {
            s.push(b);
        }
        s
    }

    /// The `len`-bit binary representation of `value`, most significant bit
    /// first.
    pub fn from_uint(value: u64, len: usize) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            let shift = len - 1 - i;
            if shift < 64 && (value >> shift) & 1 == 1 {
                s.set(i, true);
            }
        }
        s
    }

    /// Inverse of [`BitString::from_uint`]; only meaningful for `len <= 64`.
    pub fn to_uint(&self) -> u64 {
        self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64)
    }

    /// Indicator string of `positions` inside `{0,1}^len`.
    pub fn from_positions(len: usize, positions: &[usize]) -> Self {
        let mut s = Self::zeros(len);
        for &p in positions {
            s.set(p, true);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions holding a 1, ascending.
    pub fn ones_positions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * WORD + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "length mismatch");
        Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Hamming distance.
    pub fn distance(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// First position where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(wi, (a, b))| wi * WORD + (a ^ b).trailing_zeros() as usize)
    }

    /// Substring on `positions`, in the order given.
    pub fn project(&self, positions: &[usize]) -> Self {
        let mut s = Self::zeros(positions.len());
        for (j, &p) in positions.iter().enumerate() {
            if self.get(p) {
                s.set(j, true);
            }
        }
        s
    }

    /// Bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len);
        let mut s = Self::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                s.set(i - start, true);
            }
        }
        s
    }

    /// In-place intersection.
    pub fn and_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// In-place union.
    pub fn or_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// In-place `self & !other`.
    pub fn and_not_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Whether `self` and `other` share a 1.
    pub fn intersects(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> Self {
        let mut s = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.clear_tail();
        s
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len);
        for wi in 0..words_for(common) {
            let mut diff = self.words[wi] ^ other.words[wi];
            let tail = common - wi * WORD;
            if tail < WORD {
                diff &= (1u64 << tail) - 1;
            }
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return ((self.words[wi] >> bit) & 1).cmp(&((other.words[wi] >> bit) & 1));
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Self::zeros(0);
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => {
                    return Err(ParseError::BadCharacter {
                        line: 0,
                        column: i,
                        found: other,
                    })
                }
            }
        }
        Ok(out)
    }
}

/// All strings of `{0,1}^n` in lexicographic order.
pub fn cube(n: usize) -> Vec<BitString> {
    assert!(n < 64);
    (0..1u64 << n).map(|v| BitString::from_uint(v, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn display_round_trip() {
        for s in ["", "0", "1", "0011000", &"10".repeat(70)] {
            assert_eq!(bs(s).to_string(), s);
        }
    }

    #[test]
    fn distance_and_first_difference() {
        assert_eq!(bs("0011000").distance(&bs("1010000")), 2);
        assert_eq!(bs("0011000").first_difference(&bs("0011001")), Some(6));
        assert_eq!(bs("0011000").first_difference(&bs("0011000")), None);
        let mut long = BitString::zeros(200);
        let other = long.clone();
        long.set(130, true);
        assert_eq!(long.first_difference(&other), Some(130));
        assert_eq!(long.distance(&other), 1);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut v = vec![bs("10"), bs("01"), bs("11"), bs("00")];
        v.sort();
        assert_eq!(v, vec![bs("00"), bs("01"), bs("10"), bs("11")]);
        assert!(bs("0000011") < bs("0000101"));
        assert!(bs("01") < bs("010"));
        assert!(bs("011") > bs("0101"));
    }

    #[test]
    fn uint_encoding_is_msb_first() {
        assert_eq!(BitString::from_uint(1, 2).to_string(), "01");
        assert_eq!(BitString::from_uint(6, 3).to_uint(), 6);
        assert_eq!(
            cube(2).iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            ["00", "01", "10", "11"]
        );
    }

    #[test]
    fn project_and_slice() {
        let x = bs("0110000");
        assert_eq!(x.project(&[1, 2, 5]).to_string(), "110");
        assert_eq!(x.slice(2, 5).to_string(), "100");
        assert_eq!(x.ones_positions(), vec![1, 2]);
        assert_eq!(x.complement().to_string(), "1001111");
        assert_eq!(BitString::ones(3).to_string(), "111");
    }

    #[test]
    fn rejects_bad_characters() {
        assert!("01x".parse::<BitString>().is_err());
    }
}
