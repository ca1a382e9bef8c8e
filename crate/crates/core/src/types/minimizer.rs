//! A perfect tree that syntactically minimizes the number of tuple types.
//!
//! Phase 1 builds a meet-closed scaffold `f : 2^{<L} → 2^{<ω}` level by level: leaves are
//! processed by increasing image length, and each gets children `f(s)0…0` and `f(s)10…0`
//! whose lengths exceed every earlier length by 2. Phase 2 keeps `T = f[(0(0|1))*]`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::strings::BitString;
use crate::types::closure::{level_closure, meet_closure};
use crate::types::signature::{Packed, WordOps};

/// Image lengths of the scaffold, indexed by length-then-lex rank of the index word.
#[derive(Clone, Debug)]
pub struct Scaffold {
    levels: usize,
    lens: Vec<usize>,
}

fn llex_rank(w: Packed) -> usize {
    let mut v = 0usize;
    for i in 0..w.len as usize {
        v = (v << 1) | w.bit(i) as usize;
    }
    (1usize << w.len) - 1 + v
}

impl Scaffold {
    /// Scaffold on index words of length < `levels`.
    pub fn new(levels: usize) -> Self {
        assert!((1..=26).contains(&levels), "scaffold levels out of range");
        let mut lens = vec![0usize; (1usize << levels) - 1];
        let mut maxlen = 0;
        let mut frontier = vec![Packed { len: 0, bits: 0 }];
        for _ in 1..levels {
            frontier.sort_by_key(|&w| lens[llex_rank(w)]);
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for &w in &frontier {
                for b in 0..2 {
                    maxlen += 2;
                    let c = w.child(b);
                    lens[llex_rank(c)] = maxlen;
                    next.push(c);
                }
            }
            frontier = next;
        }
        Self { levels, lens }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len_of(&self, w: Packed) -> usize {
        self.lens[llex_rank(w)]
    }

    /// Bit `i` of `f(w)`: the only ones sit right after `f(w↾k)` when `w(k) = 1`.
    pub fn bit_of(&self, w: Packed, i: usize) -> u8 {
        for k in 0..w.len as usize {
            if w.bit(k) == 1 && self.len_of(truncate(w, k)) == i {
                return 1;
            }
        }
        0
    }

    /// `f(w)` written out.
    pub fn image(&self, w: Packed) -> BitString {
        let mut s = BitString::zeros(self.len_of(w));
        for k in 0..w.len as usize {
            if w.bit(k) == 1 {
                s.set(self.len_of(truncate(w, k)), 1);
            }
        }
        s
    }
}

fn truncate(w: Packed, k: usize) -> Packed {
    let mask = if k >= 64 { !0 } else { (1u64 << k) - 1 };
    Packed { len: k as u8, bits: w.bits & mask }
}

/// Scaffold images addressed by index words, without materializing them.
impl WordOps for Scaffold {
    type W = Packed;
    fn len(&self, w: &Packed) -> usize {
        self.len_of(*w)
    }
    fn bit(&self, w: &Packed, i: usize) -> u8 {
        self.bit_of(*w, i)
    }
    fn meet(&self, a: &Packed, b: &Packed) -> Packed {
        a.meet(*b)
    }
}

/// Index word of the T-node addressed by `u`: a 0 before every letter of `u`.
pub fn spread(u: Packed) -> Packed {
    let mut w = Packed { len: 0, bits: 0 };
    for i in 0..u.len as usize {
        w = w.child(0).child(u.bit(i));
    }
    w
}

/// A depth-`depth` prefix of the minimizing tree.
#[derive(Clone, Debug, Serialize)]
pub struct MinimizerTree {
    pub depth: usize,
    /// Nodes of T, addressed by words of 2^{<depth} in length-then-lex order.
    pub nodes: Vec<BitString>,
    #[serde(skip)]
    pub scaffold: Scaffold,
    #[serde(skip)]
    pub index_words: Vec<Packed>,
}

/// Scaffold index words of the first `depth` levels of T, in address order.
pub fn minimizer_index_words(depth: usize) -> Vec<Packed> {
    Packed::all_up_to(depth - 1).into_iter().map(spread).collect()
}

/// Builds the first `depth` levels of T.
pub fn minimizer_tree(depth: usize) -> Result<MinimizerTree> {
    if depth == 0 {
        return precondition("minimizer depth must be at least 1");
    }
    if depth > 12 {
        return precondition("minimizer depth above 12 is not materialized");
    }
    let scaffold = Scaffold::new(2 * depth - 1);
    let index_words = minimizer_index_words(depth);
    let nodes = index_words.iter().map(|&w| scaffold.image(w)).collect();
    Ok(MinimizerTree { depth, nodes, scaffold, index_words })
}

/// Outcome of checking the defining conditions on a finite prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MinimizerReport {
    /// Height of the prefix if it is isomorphic to 2^{<h} under ⪯.
    pub perfect_height: Option<usize>,
    pub cond1: Vec<(BitString, BitString)>,
    pub cond2: Vec<(BitString, BitString)>,
    pub cond3: Vec<(BitString, BitString)>,
}

impl MinimizerReport {
    pub fn ok(&self) -> bool {
        self.perfect_height.is_some() && self.cond1.is_empty() && self.cond2.is_empty() && self.cond3.is_empty()
    }
}

/// Height of `s` if `(s, ⪯)` is isomorphic to a full binary tree 2^{<h}.
pub fn perfect_height(s: &[BitString]) -> Option<usize> {
    let mut v: Vec<&BitString> = s.iter().collect();
    v.sort();
    v.dedup();
    if v.is_empty() {
        return None;
    }
    let mut level = vec![0usize; v.len()];
    let mut kids = vec![0usize; v.len()];
    for i in 1..v.len() {
        let p = (0..i).rev().find(|&j| v[j].is_proper_prefix_of(v[i]))?;
        level[i] = level[p] + 1;
        kids[p] += 1;
    }
    let h = level.iter().max().unwrap() + 1;
    let ok = (0..v.len()).all(|i| if level[i] + 1 == h { kids[i] == 0 } else { kids[i] == 2 });
    (ok && v.len() == (1usize << h) - 1).then_some(h)
}

/// Checks conditions (1)–(3); condition (3) in its pairwise form over T^∧.
pub fn validate_minimizer(nodes: &[BitString]) -> MinimizerReport {
    let mut r = MinimizerReport { perfect_height: perfect_height(nodes), ..Default::default() };
    let tm: Vec<BitString> = meet_closure(nodes).into_iter().collect();
    for w in tm.windows(2) {
        if w[0].len() == w[1].len() {
            r.cond1.push((w[0].clone(), w[1].clone()));
        }
    }
    for s in nodes {
        for t in nodes {
            if s.is_proper_prefix_of(t) && t.bit(s.len()) != 0 {
                r.cond2.push((s.clone(), t.clone()));
            }
        }
    }
    for s in &tm {
        for t in &tm {
            if s.len() < t.len() && !s.is_prefix_of(t) && t.bit(s.len()) != 0 {
                r.cond3.push((s.clone(), t.clone()));
            }
        }
    }
    r
}

/// Condition (3) as stated: every σ ∈ T^cl \ T^∧ is extended inside T^cl only through σ0.
pub fn cond3_literal(nodes: &[BitString]) -> Vec<(BitString, BitString)> {
    let tm = meet_closure(nodes);
    let tmv: Vec<BitString> = tm.iter().cloned().collect();
    let cl: BTreeSet<BitString> = level_closure(&tmv);
    let mut out = Vec::new();
    for s in cl.iter().filter(|s| !tm.contains(*s)) {
        for t in &cl {
            if s.is_proper_prefix_of(t) && t.bit(s.len()) != 0 {
                out.push((s.clone(), t.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bs;

    #[test]
    fn scaffold_first_levels() {
        let s = Scaffold::new(3);
        let img = |w: &str| s.image(Packed::from_bitstring(&bs(w))).to_string();
        assert_eq!(img("e"), "e");
        assert_eq!(img("0"), "00");
        assert_eq!(img("1"), "1000");
        assert_eq!(img("00"), "000000");
        assert_eq!(img("01"), "00100000");
        assert_eq!(img("10"), "1000000000");
        assert_eq!(img("11"), "100010000000");
    }

    #[test]
    fn scaffold_ops_agree_with_images() {
        let s = Scaffold::new(5);
        let words = Packed::all_up_to(4);
        for &w in &words {
            let img = s.image(w);
            assert_eq!(img.len(), s.len_of(w));
            for i in 0..img.len() {
                assert_eq!(img.bit(i), s.bit_of(w, i));
            }
        }
    }

    #[test]
    fn small_prefixes_validate() {
        for d in 1..=4 {
            let t = minimizer_tree(d).unwrap();
            let r = validate_minimizer(&t.nodes);
            assert!(r.ok(), "depth {d}: {r:?}");
            assert_eq!(r.perfect_height, Some(d));
            assert!(cond3_literal(&t.nodes).is_empty());
        }
        assert!(minimizer_tree(0).is_err());
    }

    #[test]
    fn validator_catches_violations() {
        let full: Vec<BitString> = BitString::all_up_to(2);
        let r = validate_minimizer(&full);
        assert_eq!(r.perfect_height, Some(3));
        assert!(!r.cond1.is_empty() && !r.cond2.is_empty());
        assert_eq!(perfect_height(&[bs("0"), bs("1")]), None);
    }
}
