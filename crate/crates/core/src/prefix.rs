//! Finite initial segments of characteristic sequences.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite prefix `A(0)A(1)...A(n-1)` of a set's characteristic sequence.
///
/// Bits are packed most-significant first, so position `i` lives at bit
/// `63 - i % 64` of word `i / 64`. With that layout the lexicographic order
/// on equal-length prefixes is the numeric order of the word sequences.
/// Padding bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Prefix {
    words: Vec<u64>,
    len: usize,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl Prefix {
    pub fn zeros(len: usize) -> Self {
        Prefix { words: vec![0; words_for(len)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut p = Prefix { words: vec![u64::MAX; words_for(len)], len };
        p.clear_padding();
        p
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut p = Prefix::zeros(0);
        for b in bits {
            p.push(b);
        }
        p
    }

    /// The prefix of length `len` whose ones are exactly `members` (members
    /// at or beyond `len` are ignored).
    pub fn from_members<I: IntoIterator<Item = usize>>(len: usize, members: I) -> Self {
        let mut p = Prefix::zeros(len);
        for m in members {
            if m < len {
                p.set(m, true);
            }
        }
        p
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "position {pos} outside prefix of length {}", self.len);
        self.words[pos / 64] >> (63 - pos % 64) & 1 == 1
    }

    pub fn set(&mut self, pos: usize, bit: bool) {
        assert!(pos < self.len, "position {pos} outside prefix of length {}", self.len);
        let mask = 1u64 << (63 - pos % 64);
        if bit {
            self.words[pos / 64] |= mask;
        } else {
            self.words[pos / 64] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions holding a 1, ascending.
    pub fn members(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let lead = rest.leading_zeros() as usize;
                out.push(w * 64 + lead);
                rest &= !(1u64 << (63 - lead));
            }
        }
        out
    }

    /// Positions holding a 0, ascending.
    pub fn non_members(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| !self.get(i)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// First `len` bits; shorter prefixes are padded with zeros.
    pub fn resized(&self, len: usize) -> Self {
        let mut words = self.words.clone();
        words.resize(words_for(len), 0);
        let mut p = Prefix { words, len };
        p.clear_padding();
        p
    }

    /// `self · tail`, cut to `len` bits (zero padded if shorter).
    pub fn concat_truncated(&self, tail: &Prefix, len: usize) -> Self {
        let mut p = self.resized(len.min(self.len));
        for bit in tail.iter() {
            if p.len >= len {
                break;
            }
            p.push(bit);
        }
        p.resized(len)
    }

    /// Least position where the two prefixes differ, over the common length.
    pub fn first_difference(&self, other: &Prefix) -> Option<usize> {
        let n = self.len.min(other.len);
        for (w, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let diff = a ^ b;
            if diff != 0 {
                let pos = w * 64 + diff.leading_zeros() as usize;
                return (pos < n).then_some(pos);
            }
        }
        None
    }

    /// True iff every member of `self` is a member of `other` (common length).
    pub fn is_subset_of(&self, other: &Prefix) -> bool {
        let n = self.len.min(other.len);
        let a = self.resized(n);
        let b = other.resized(n);
        a.words.iter().zip(&b.words).all(|(x, y)| x & !y == 0)
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX << (64 - rem);
            }
        }
    }
}

impl fmt::Debug for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prefix({})", self.to_bit_string())
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl FromStr for Prefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Prefix::zeros(0);
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => p.push(false),
                '1' => p.push(true),
                other => {
                    return Err(Error::Parse(format!("bit {i}: expected 0 or 1, found {other:?}")))
                }
            }
        }
        Ok(p)
    }
}

/// Lexicographic comparison of equal-length prefixes.
///
/// `a < b` iff the least position where they differ holds a 1 in `b`.
pub fn lex_cmp(a: &Prefix, b: &Prefix) -> Result<Ordering> {
    if a.len != b.len {
        return Err(Error::usage(format!(
            "lex_cmp on prefixes of different lengths ({} vs {})",
            a.len, b.len
        )));
    }
    Ok(a.words.cmp(&b.words))
}

/// Lexicographic comparison after padding the shorter side with zeros.
pub fn lex_cmp_padded(a: &Prefix, b: &Prefix) -> Ordering {
    let n = a.len.max(b.len);
    a.resized(n).words.cmp(&b.resized(n).words)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Prefix {
        s.parse().unwrap()
    }

    #[test]
    fn lex_cmp_examples() {
        assert_eq!(lex_cmp(&p("011"), &p("011")).unwrap(), Ordering::Equal);
        assert_eq!(lex_cmp(&p("010"), &p("011")).unwrap(), Ordering::Less);
        assert_eq!(lex_cmp(&p("100"), &p("011")).unwrap(), Ordering::Greater);
    }

    #[test]
    fn lex_cmp_rejects_length_mismatch() {
        assert!(matches!(lex_cmp(&p("01"), &p("011")), Err(Error::Usage(_))));
    }

    #[test]
    fn packing_across_word_boundary() {
        let mut a = Prefix::zeros(130);
        a.set(64, true);
        a.set(129, true);
        assert_eq!(a.members(), vec![64, 129]);
        let b = Prefix::from_members(130, [63]);
        assert_eq!(lex_cmp(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(a.first_difference(&b), Some(63));
        assert_eq!(a.resized(64), Prefix::zeros(64));
    }

    #[test]
    fn ones_and_padding() {
        let o = Prefix::ones(70);
        assert_eq!(o.count_ones(), 70);
        assert_eq!(o.resized(3).to_bit_string(), "111");
        assert_eq!(o.resized(72).to_bit_string().matches('1').count(), 70);
    }

    #[test]
    fn concat_and_subset() {
        let s = p("101");
        let t = p("0011");
        assert_eq!(s.concat_truncated(&t, 5).to_bit_string(), "10100");
        assert_eq!(s.concat_truncated(&t, 9).to_bit_string(), "101001100");
        assert!(p("0100").is_subset_of(&p("0110")));
        assert!(!p("0101").is_subset_of(&p("0110")));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("01x".parse::<Prefix>().is_err());
        assert_eq!(p("").len(), 0);
    }
}
