//! Binary words, meets, and the orders used throughout the crate.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite word over {0,1}. Bit `i` lives in `blocks[i / 64]` at position `i % 64`;
/// bits past `len` are always zero so derived equality and hashing are structural.
#[derive(Clone, Default)]
pub struct BitString {
    len: usize,
    blocks: Vec<u64>,
}

impl BitString {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Self {
        let mut s = Self::empty();
        for b in bits {
            s.push(b);
        }
        s
    }

    /// `len` low-order bits of `value`, bit 0 first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mask = if len == 64 { !0 } else { (1u64 << len) - 1 };
        let blocks = if len == 0 { Vec::new() } else { vec![value & mask] };
        Self { len, blocks }
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, blocks: vec![0; len.div_ceil(64)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        ((self.blocks[i / 64] >> (i % 64)) & 1) as u8
    }

    /// Bit `i`, or `None` past the end.
    pub fn get(&self, i: usize) -> Option<u8> {
        (i < self.len).then(|| self.bit(i))
    }

    pub fn push(&mut self, b: u8) {
        assert!(b <= 1, "binary alphabet only");
        if self.len % 64 == 0 {
            self.blocks.push(0);
        }
        if b == 1 {
            self.blocks[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn set(&mut self, i: usize, b: u8) {
        assert!(i < self.len && b <= 1);
        let m = 1u64 << (i % 64);
        if b == 1 {
            self.blocks[i / 64] |= m;
        } else {
            self.blocks[i / 64] &= !m;
        }
    }

    pub fn child(&self, b: u8) -> Self {
        let mut s = self.clone();
        s.push(b);
        s
    }

    pub fn concat(&self, other: &BitString) -> Self {
        let mut s = self.clone();
        for i in 0..other.len {
            s.push(other.bit(i));
        }
        s
    }

    /// The initial segment of length `l` (σ↾l).
    pub fn truncate(&self, l: usize) -> Self {
        assert!(l <= self.len);
        let mut blocks = self.blocks[..l.div_ceil(64)].to_vec();
        if l % 64 != 0 {
            *blocks.last_mut().unwrap() &= (1u64 << (l % 64)) - 1;
        }
        Self { len: l, blocks }
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }

    /// Length of the longest common prefix.
    pub fn meet_len(&self, other: &BitString) -> usize {
        let m = self.len.min(other.len);
        for (k, (a, b)) in self.blocks.iter().zip(&other.blocks).enumerate() {
            let x = a ^ b;
            if x != 0 {
                return m.min(k * 64 + x.trailing_zeros() as usize);
            }
        }
        m
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && self.meet_len(other) == self.len
    }

    pub fn is_proper_prefix_of(&self, other: &BitString) -> bool {
        self.len < other.len && self.is_prefix_of(other)
    }

    pub fn comparable(&self, other: &BitString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Lexicographic order; a proper prefix precedes its extensions.
    pub fn cmp_lex(&self, other: &BitString) -> Ordering {
        let m = self.meet_len(other);
        match (self.get(m), other.get(m)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.len.cmp(&other.len),
        }
    }

    /// Value of the word read as a binary numeral, first bit most significant.
    pub fn numeral(&self) -> u128 {
        assert!(self.len <= 127);
        self.bits().fold(0u128, |acc, b| (acc << 1) | b as u128)
    }

    /// Position in the length-then-lex enumeration q₀ = ε, q₁ = 0, q₂ = 1, q₃ = 00, …
    pub fn llex_rank(&self) -> u128 {
        ((1u128 << self.len) - 1) + self.numeral()
    }

    /// Inverse of [`BitString::llex_rank`].
    pub fn from_llex_rank(rank: u128) -> Self {
        let len = (128 - (rank + 1).leading_zeros() - 1) as usize;
        let v = rank + 1 - (1u128 << len);
        Self::from_bits((0..len).rev().map(|i| ((v >> i) & 1) as u8))
    }

    /// All words of length exactly `len`, in lex order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64);
        (0..1u64 << len).map(move |v| Self::from_bits((0..len).rev().map(move |i| ((v >> i) & 1) as u8)))
    }

    /// All words of length ≤ `max_len`, length-then-lex.
    pub fn all_up_to(max_len: usize) -> Vec<BitString> {
        (0..=max_len).flat_map(Self::all_of_len).collect()
    }
}

/// Longest common initial segment.
pub fn meet(a: &BitString, b: &BitString) -> BitString {
    a.truncate(a.meet_len(b))
}

/// The order <_Q on 2^{<ω}.
pub fn cmp_q(a: &BitString, b: &BitString) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    if a.is_proper_prefix_of(b) {
        return if b.bit(a.len()) == 1 { Ordering::Less } else { Ordering::Greater };
    }
    if b.is_proper_prefix_of(a) {
        return if a.bit(b.len()) == 0 { Ordering::Less } else { Ordering::Greater };
    }
    a.cmp_lex(b)
}

/// Σ_{i<|σ|} (σ(i) − ½)·2^{−i}, exactly.
pub fn q_value(a: &BitString) -> BigRational {
    let den = BigInt::from(1) << (a.len() + 1);
    let mut num = BigInt::from(0);
    for i in 0..a.len() {
        let term = BigInt::from(1) << (a.len() - i);
        if a.bit(i) == 1 {
            num += term;
        } else {
            num -= term;
        }
    }
    BigRational::new(num, den)
}

/// A word strictly between `a` and `b` in <_Q, assuming `a <_Q b`.
pub fn q_between(a: &BitString, b: &BitString) -> BitString {
    debug_assert_eq!(cmp_q(a, b), Ordering::Less);
    // Both values are multiples of 2^-max(|a|,|b|), so a gap of 2^-(max+2) next to the longer one fits.
    if a.len() >= b.len() {
        a.child(1).child(0)
    } else {
        b.child(0).child(1)
    }
}

impl PartialEq for BitString {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.blocks == other.blocks
    }
}

impl Eq for BitString {}

impl Hash for BitString {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len.hash(state);
        self.blocks.hash(state);
    }
}

/// Length-then-lex: the canonical enumeration order.
impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.cmp_lex(other))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("e");
        }
        for b in self.bits() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s == "ε" || s.is_empty() {
            return Ok(Self::empty());
        }
        let mut w = Self::empty();
        for c in s.chars() {
            match c {
                '0' => w.push(0),
                '1' => w.push(1),
                _ => return Err(Error::Parse(format!("not a binary word: {s:?}"))),
            }
        }
        Ok(w)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses the node-set text format: one word per line, `e` for ε, blank lines and `#` comments skipped.
pub fn parse_node_set(text: &str) -> Result<Vec<BitString>> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::parse).collect()
}

/// Sorted, deduplicated, one word per line.
pub fn format_node_set<'a, I: IntoIterator<Item = &'a BitString>>(nodes: I) -> String {
    let mut v: Vec<&BitString> = nodes.into_iter().collect();
    v.sort();
    v.dedup();
    v.iter().map(|w| format!("{w}\n")).collect()
}

/// Shorthand used by tests and examples.
pub fn bs(s: &str) -> BitString {
    s.parse().expect("valid binary word")
}
