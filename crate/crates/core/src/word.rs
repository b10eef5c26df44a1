//! Finite binary words and the cylinders they name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::{dyadic, Rational};

/// A finite binary word. The leftmost symbol is coordinate 1.
///
/// Ordering is lexicographic with a proper prefix sorting before its
/// extensions, which is the order used for every canonical listing.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<bool>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Word(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn child(&self, bit: bool) -> Word {
        let mut bits = Vec::with_capacity(self.0.len() + 1);
        bits.extend_from_slice(&self.0);
        bits.push(bit);
        Word(bits)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut bits = Vec::with_capacity(self.0.len() + other.0.len());
        bits.extend_from_slice(&self.0);
        bits.extend_from_slice(&other.0);
        Word(bits)
    }

    /// Parent word, `None` for the empty word.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<bool> {
        self.0.last().copied()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n.min(self.0.len())..].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// True if one of the two words is a prefix of the other.
    pub fn comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }

    /// Diameter of the cylinder `[w]` under `d(x,y) = 2^(-lcp(x,y))`.
    pub fn diameter(&self) -> Rational {
        dyadic(self.len())
    }

    pub fn complement_bits(&self) -> Word {
        Word(self.0.iter().map(|b| !b).collect())
    }

    /// All `2^n` words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = Word> {
        assert!(n < usize::BITS as usize, "word length too large to enumerate");
        (0..(1usize << n)).map(move |i| Word((0..n).map(|j| (i >> (n - 1 - j)) & 1 == 1).collect()))
    }

    /// All words of length `<= n`, shortest first, lexicographic within a length.
    pub fn all_up_to(n: usize) -> impl Iterator<Item = Word> {
        (0..=n).flat_map(Word::all_of_length)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            fmt::Display::fmt(self, f)
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bad symbol {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// Shorthand for tests and examples; panics on anything but `0`/`1`.
pub fn w(s: &str) -> Word {
    s.parse().expect("binary word literal")
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}
