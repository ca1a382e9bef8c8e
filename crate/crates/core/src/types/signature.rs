//! Canonical signatures of embedding, tuple and weak tuple types.
//!
//! A signature is the closure tree of the tuple serialized as
//! `T ::= mark "(" C "," C ")"`, `C ::= "-" | T`, children in direction order.
//! The closure tree is built from the meet closure `M` alone: its levels are the
//! distinct lengths of `M`, and a node at level `i` is a truncation `m↾L[i]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strings::BitString;

/// Access to words for signature computation; lets the same code run on plain
/// strings, packed machine words, or words given implicitly through a table.
pub trait WordOps {
    type W: Clone + PartialEq;
    fn len(&self, w: &Self::W) -> usize;
    fn bit(&self, w: &Self::W, i: usize) -> u8;
    fn meet(&self, a: &Self::W, b: &Self::W) -> Self::W;
    fn meet_len(&self, a: &Self::W, b: &Self::W) -> usize {
        self.len(&self.meet(a, b))
    }
}

pub struct Plain;

impl WordOps for Plain {
    type W = BitString;
    fn len(&self, w: &BitString) -> usize {
        w.len()
    }
    fn bit(&self, w: &BitString, i: usize) -> u8 {
        w.bit(i)
    }
    fn meet(&self, a: &BitString, b: &BitString) -> BitString {
        crate::strings::meet(a, b)
    }
    fn meet_len(&self, a: &BitString, b: &BitString) -> usize {
        a.meet_len(b)
    }
}

/// A word of length ≤ 64 in one machine word, bit `i` at position `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Packed {
    pub len: u8,
    pub bits: u64,
}

impl Packed {
    pub fn from_bitstring(w: &BitString) -> Self {
        assert!(w.len() <= 64);
        let bits = w.bits().enumerate().fold(0u64, |acc, (i, b)| acc | (b as u64) << i);
        Self { len: w.len() as u8, bits }
    }

    pub fn to_bitstring(self) -> BitString {
        BitString::from_u64(self.bits, self.len as usize)
    }

    fn mask(l: u32) -> u64 {
        if l >= 64 {
            !0
        } else {
            (1u64 << l) - 1
        }
    }

    pub fn meet(self, o: Packed) -> Packed {
        let m = self.len.min(o.len) as u32;
        let diff = (self.bits ^ o.bits) & Self::mask(m);
        let l = if diff == 0 { m } else { diff.trailing_zeros() };
        Packed { len: l as u8, bits: self.bits & Self::mask(l) }
    }

    pub fn is_prefix_of(self, o: Packed) -> bool {
        self.len <= o.len && self.meet(o).len == self.len
    }

    pub fn child(self, b: u8) -> Packed {
        Packed { len: self.len + 1, bits: self.bits | (b as u64) << self.len }
    }

    pub fn bit(self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    /// All words of length ≤ `max_len`, length-then-lex.
    pub fn all_up_to(max_len: usize) -> Vec<Packed> {
        BitString::all_up_to(max_len).iter().map(Packed::from_bitstring).collect()
    }
}

pub struct PackedOps;

impl WordOps for PackedOps {
    type W = Packed;
    fn len(&self, w: &Packed) -> usize {
        w.len as usize
    }
    fn bit(&self, w: &Packed, i: usize) -> u8 {
        w.bit(i)
    }
    fn meet(&self, a: &Packed, b: &Packed) -> Packed {
        a.meet(*b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SigKind {
    Embedding,
    Tuple,
    WeakTuple,
}

impl SigKind {
    pub fn name(self) -> &'static str {
        match self {
            SigKind::Embedding => "EMBEDDING",
            SigKind::Tuple => "TUPLE",
            SigKind::WeakTuple => "WEAK_TUPLE",
        }
    }
}

/// Canonical serialized type. Equal bodies (for equal kinds) mean equivalent tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeSignature {
    pub kind: SigKind,
    pub body: String,
}

impl fmt::Display for TypeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.body)
    }
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigNode {
    pub star: bool,
    pub children: [u32; 2],
}

impl SigNode {
    pub fn child(&self, b: usize) -> Option<usize> {
        (self.children[b] != NONE).then_some(self.children[b] as usize)
    }

    pub fn degree(&self) -> usize {
        self.children.iter().filter(|&&c| c != NONE).count()
    }
}

/// The closure tree of a tuple, node 0 the root; empty for the empty tuple.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SigTree {
    pub nodes: Vec<SigNode>,
}

impl SigTree {
    /// Builds the closure tree of `tuple`, whose elements must be pairwise distinct.
    pub fn of<O: WordOps>(ops: &O, tuple: &[O::W]) -> SigTree {
        let mut tree = SigTree::default();
        if tuple.is_empty() {
            return tree;
        }
        let mut m: Vec<O::W> = Vec::with_capacity(2 * tuple.len());
        for (i, a) in tuple.iter().enumerate() {
            for b in &tuple[i..] {
                let x = ops.meet(a, b);
                if !m.contains(&x) {
                    m.push(x);
                }
            }
        }
        let mut lens: Vec<usize> = m.iter().map(|w| ops.len(w)).collect();
        lens.sort_unstable();
        lens.dedup();
        let root = m.iter().position(|w| ops.len(w) == lens[0]).unwrap();
        tree.build(ops, tuple, &m, &lens, root, 0);
        tree
    }

    fn build<O: WordOps>(&mut self, ops: &O, tuple: &[O::W], m: &[O::W], lens: &[usize], rep: usize, i: usize) -> u32 {
        let l = lens[i];
        let rep_w = &m[rep];
        let star = tuple.iter().any(|t| ops.len(t) == l && ops.meet_len(t, rep_w) >= l);
        let id = self.nodes.len();
        self.nodes.push(SigNode { star, children: [NONE; 2] });
        if i + 1 < lens.len() {
            let nl = lens[i + 1];
            let mut ch = [None, None];
            for (j, x) in m.iter().enumerate() {
                if ops.len(x) >= nl && ops.meet_len(rep_w, x) >= l {
                    let b = ops.bit(x, l) as usize;
                    if ch[b].is_none() {
                        ch[b] = Some(j);
                    }
                }
            }
            for (b, slot) in ch.into_iter().enumerate() {
                if let Some(j) = slot {
                    let c = self.build(ops, tuple, m, lens, j, i + 1);
                    self.nodes[id].children[b] = c;
                }
            }
        }
        id as u32
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Serializes in the given kind: stars dropped for embeddings, single children
    /// moved to slot 0 for weak tuples.
    pub fn write(&self, kind: SigKind, out: &mut String) {
        if self.nodes.is_empty() {
            out.push('-');
            return;
        }
        self.write_node(0, kind, out);
    }

    fn write_node(&self, i: usize, kind: SigKind, out: &mut String) {
        let n = self.nodes[i];
        if kind != SigKind::Embedding && n.star {
            out.push('*');
        }
        out.push('(');
        let mut ch = n.children;
        if kind == SigKind::WeakTuple && ch[0] == NONE {
            ch.swap(0, 1);
        }
        for (k, &c) in ch.iter().enumerate() {
            if k == 1 {
                out.push(',');
            }
            if c == NONE {
                out.push('-');
            } else {
                self.write_node(c as usize, kind, out);
            }
        }
        out.push(')');
    }

    pub fn signature(&self, kind: SigKind) -> TypeSignature {
        let mut body = String::new();
        self.write(kind, &mut body);
        TypeSignature { kind, body }
    }

    pub fn parse(body: &str) -> Result<SigTree> {
        let bytes = body.as_bytes();
        let mut tree = SigTree::default();
        let mut pos = 0;
        if bytes == b"-" {
            return Ok(tree);
        }
        tree.parse_node(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input in signature {body:?}")));
        }
        Ok(tree)
    }

    fn parse_node(&mut self, b: &[u8], pos: &mut usize) -> Result<u32> {
        let err = |p: usize| Error::Parse(format!("malformed signature at byte {p}"));
        let star = b.get(*pos) == Some(&b'*');
        if star {
            *pos += 1;
        }
        if b.get(*pos) != Some(&b'(') {
            return Err(err(*pos));
        }
        *pos += 1;
        let id = self.nodes.len();
        self.nodes.push(SigNode { star, children: [NONE; 2] });
        for k in 0..2 {
            if k == 1 {
                if b.get(*pos) != Some(&b',') {
                    return Err(err(*pos));
                }
                *pos += 1;
            }
            if b.get(*pos) == Some(&b'-') {
                *pos += 1;
            } else {
                let c = self.parse_node(b, pos)?;
                self.nodes[id].children[k] = c;
            }
        }
        if b.get(*pos) != Some(&b')') {
            return Err(err(*pos));
        }
        *pos += 1;
        Ok(id as u32)
    }

    /// Depth of each node.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for i in 0..self.nodes.len() {
            for c in self.nodes[i].children {
                if c != NONE {
                    d[c as usize] = d[i] + 1;
                }
            }
        }
        d
    }

    /// Words realizing the tree: the node at depth i gets length i.
    pub fn words(&self) -> Vec<BitString> {
        let mut w = vec![BitString::empty(); self.nodes.len()];
        for i in 0..self.nodes.len() {
            for b in 0..2 {
                if let Some(c) = self.nodes[i].child(b) {
                    w[c] = w[i].child(b as u8);
                }
            }
        }
        w
    }

    /// A tuple with this tuple (or weak tuple) type.
    pub fn representative(&self) -> Vec<BitString> {
        let w = self.words();
        let mut v: Vec<BitString> =
            (0..self.nodes.len()).filter(|&i| self.nodes[i].star).map(|i| w[i].clone()).collect();
        v.sort();
        v
    }

    pub fn stars(&self) -> usize {
        self.nodes.iter().filter(|n| n.star).count()
    }
}

/// Signature of a tuple under one of the three equivalences.
pub fn signature_of(tuple: &[BitString], kind: SigKind) -> Result<TypeSignature> {
    check_distinct(tuple)?;
    Ok(SigTree::of(&Plain, tuple).signature(kind))
}

pub fn embedding_signature(tuple: &[BitString]) -> Result<TypeSignature> {
    signature_of(tuple, SigKind::Embedding)
}

pub fn tuple_signature(tuple: &[BitString]) -> Result<TypeSignature> {
    signature_of(tuple, SigKind::Tuple)
}

pub fn weak_signature(tuple: &[BitString]) -> Result<TypeSignature> {
    signature_of(tuple, SigKind::WeakTuple)
}

/// Re-serializes a signature body; a fixed point on canonical input.
pub fn canonicalize(sig: &TypeSignature) -> Result<TypeSignature> {
    Ok(SigTree::parse(&sig.body)?.signature(sig.kind))
}

pub(crate) fn check_distinct(tuple: &[BitString]) -> Result<()> {
    for (i, a) in tuple.iter().enumerate() {
        if tuple[i + 1..].contains(a) {
            return Err(Error::Precondition(format!("duplicate tuple element {a}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bs;

    fn t(v: &[&str]) -> Vec<BitString> {
        v.iter().map(|s| bs(s)).collect()
    }

    #[test]
    fn direction_bits_separate_embeddings() {
        let a = embedding_signature(&t(&["0", "00"])).unwrap();
        let b = embedding_signature(&t(&["0", "01"])).unwrap();
        assert_ne!(a, b);
        assert_eq!(embedding_signature(&t(&["0", "1"])).unwrap().body, "((-,-),(-,-))");
    }

    #[test]
    fn weak_forgets_single_directions() {
        let (a, b) = (t(&["0", "00"]), t(&["0", "01"]));
        assert_eq!(weak_signature(&a).unwrap(), weak_signature(&b).unwrap());
        assert_ne!(tuple_signature(&a).unwrap(), tuple_signature(&b).unwrap());
        assert_eq!(tuple_signature(&t(&["0", "1", "e"])).unwrap().body, "*(*(-,-),*(-,-))");
    }

    #[test]
    fn truncation_nodes_are_unstarred() {
        // Closure of {00, 1}: lengths 0,1,2; "0" is a filler node.
        assert_eq!(tuple_signature(&t(&["00", "1"])).unwrap().body, "((*(-,-),-),*(-,-))");
    }

    #[test]
    fn parse_round_trip_and_representative() {
        for tup in [t(&["00", "010", "1"]), t(&["e"]), t(&["0", "01", "011"])] {
            let s = tuple_signature(&tup).unwrap();
            let tree = SigTree::parse(&s.body).unwrap();
            assert_eq!(tree.signature(SigKind::Tuple), s);
            assert_eq!(tuple_signature(&tree.representative()).unwrap(), s);
        }
        assert!(SigTree::parse("(-,").is_err());
        assert!(SigTree::parse("(-,-)x").is_err());
        assert_eq!(SigTree::parse("-").unwrap().nodes.len(), 0);
    }

    #[test]
    fn duplicates_rejected() {
        assert!(tuple_signature(&t(&["0", "0"])).is_err());
    }

    #[test]
    fn packed_matches_plain() {
        let words = BitString::all_up_to(3);
        for a in &words {
            for b in &words {
                if a == b {
                    continue;
                }
                let pa = [Packed::from_bitstring(a), Packed::from_bitstring(b)];
                let x = SigTree::of(&PackedOps, &pa).signature(SigKind::Tuple);
                assert_eq!(x, tuple_signature(&[a.clone(), b.clone()]).unwrap());
            }
        }
    }
}
