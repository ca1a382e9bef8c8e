//! Finite meet-closed trees of binary words and their strong subtrees.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::strings::BitString;

#[derive(Debug)]
struct TreeData {
    nodes: Vec<BitString>,
    index: HashMap<BitString, usize>,
    level: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    by_level: Vec<Vec<usize>>,
}

/// A finite, rooted, meet-closed set of words. Nodes are stored length-then-lex;
/// cloning is cheap.
#[derive(Clone, Debug)]
pub struct FiniteTree(Arc<TreeData>);

impl PartialEq for FiniteTree {
    fn eq(&self, other: &Self) -> bool {
        self.0.nodes == other.0.nodes
    }
}

impl Eq for FiniteTree {}

impl Serialize for FiniteTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.nodes().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nodes = Vec::<BitString>::deserialize(d)?;
        FiniteTree::new(nodes).map_err(serde::de::Error::custom)
    }
}

impl FiniteTree {
    pub fn new<I: IntoIterator<Item = BitString>>(nodes: I) -> Result<Self> {
        let mut nodes: Vec<BitString> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(Error::Invalid("tree must be non-empty".into()));
        }
        let index: HashMap<BitString, usize> = nodes.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        for w in &nodes[1..] {
            if !nodes[0].is_prefix_of(w) {
                return Err(Error::Invalid(format!("{w} does not extend the root {}", nodes[0])));
            }
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                let m = a.meet_len(b);
                if !index.contains_key(&a.truncate(m)) {
                    return Err(Error::Invalid(format!("meet of {a} and {b} is missing")));
                }
            }
        }
        let n = nodes.len();
        let mut parent = vec![None; n];
        let mut level = vec![0; n];
        let mut children = vec![Vec::new(); n];
        for i in 1..n {
            // Nodes are sorted by length, so the last proper prefix found is the longest.
            let p = (0..i).rev().find(|&j| nodes[j].is_proper_prefix_of(&nodes[i])).expect("root is a prefix");
            parent[i] = Some(p);
            level[i] = level[p] + 1;
            children[p].push(i);
        }
        for c in &mut children {
            c.sort_by(|&a, &b| nodes[a].cmp_lex(&nodes[b]));
        }
        let height = level.iter().max().unwrap() + 1;
        let mut by_level = vec![Vec::new(); height];
        for i in 0..n {
            by_level[level[i]].push(i);
        }
        Ok(Self(Arc::new(TreeData { nodes, index, level, parent, children, by_level })))
    }

    /// The full binary tree 2^{<h}.
    pub fn full_binary(h: usize) -> Self {
        Self::full_bounded(h, |_| 2)
    }

    /// Words of length < h with w(i) < b(i); only b(i) ∈ {1, 2} is representable.
    pub fn full_bounded(h: usize, b: impl Fn(usize) -> usize) -> Self {
        assert!(h >= 1);
        let mut all = vec![BitString::empty()];
        let mut frontier = vec![BitString::empty()];
        for i in 0..h - 1 {
            let bi = b(i);
            assert!((1..=2).contains(&bi), "binary words support branching 1 or 2 only");
            frontier = frontier.iter().flat_map(|w| (0..bi as u8).map(move |c| w.child(c))).collect();
            all.extend(frontier.iter().cloned());
        }
        Self::new(all).expect("full trees are meet-closed")
    }

    pub fn nodes(&self) -> &[BitString] {
        &self.0.nodes
    }

    pub fn len(&self) -> usize {
        self.0.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> &BitString {
        &self.0.nodes[i]
    }

    pub fn root(&self) -> &BitString {
        &self.0.nodes[0]
    }

    pub fn index_of(&self, w: &BitString) -> Option<usize> {
        self.0.index.get(w).copied()
    }

    pub fn contains(&self, w: &BitString) -> bool {
        self.0.index.contains_key(w)
    }

    /// Number of proper initial segments of node `i` inside the tree.
    pub fn level_of(&self, i: usize) -> usize {
        self.0.level[i]
    }

    pub fn level(&self, w: &BitString) -> Option<usize> {
        self.index_of(w).map(|i| self.0.level[i])
    }

    pub fn height(&self) -> usize {
        self.0.by_level.len()
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.0.parent[i]
    }

    /// Direct extensions of node `i`, in lex order.
    pub fn children(&self, i: usize) -> &[usize] {
        &self.0.children[i]
    }

    pub fn at_level(&self, l: usize) -> &[usize] {
        self.0.by_level.get(l).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.0.children[i].is_empty()
    }

    pub fn leaves(&self) -> Vec<&BitString> {
        (0..self.len()).filter(|&i| self.is_leaf(i)).map(|i| self.node(i)).collect()
    }

    /// Nodes at level `l` extending node `i` (inclusive).
    pub fn descendants_at_level(&self, i: usize, l: usize) -> Vec<usize> {
        let w = self.node(i);
        self.at_level(l).iter().copied().filter(|&j| w.is_prefix_of(self.node(j))).collect()
    }
}

/// Strictly increasing map from subtree levels to ambient levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelFunction(pub Vec<usize>);

impl LevelFunction {
    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

/// A strong subtree of `ambient` together with its level function.
#[derive(Clone, Debug)]
pub struct StrongSubtreeWitness {
    pub subtree: FiniteTree,
    pub ambient: FiniteTree,
    pub level_fn: LevelFunction,
}

/// Serialized form of a witness: `{"nodes":[...],"levels":[...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub nodes: Vec<BitString>,
    pub levels: Vec<usize>,
}

impl StrongSubtreeWitness {
    pub fn nodes(&self) -> &[BitString] {
        self.subtree.nodes()
    }

    pub fn height(&self) -> usize {
        self.level_fn.0.len()
    }

    pub fn to_json(&self) -> WitnessJson {
        WitnessJson { nodes: self.subtree.nodes().to_vec(), levels: self.level_fn.0.clone() }
    }
}

/// Recognizes strong subtrees: returns the witness iff `s` is a tree whose levels sit on
/// common ambient levels and whose non-top nodes keep their ambient branching degree.
pub fn is_strong_subtree(s: &[BitString], t: &FiniteTree) -> Result<Option<StrongSubtreeWitness>> {
    if let Some(w) = s.iter().find(|w| !t.contains(w)) {
        return precondition(format!("{w} is not a node of the ambient tree"));
    }
    let sub = match FiniteTree::new(s.iter().cloned()) {
        Ok(sub) => sub,
        Err(_) => return Ok(None),
    };
    let h = sub.height();
    let mut f = vec![usize::MAX; h];
    for i in 0..sub.len() {
        let amb = t.level(sub.node(i)).unwrap();
        let l = sub.level_of(i);
        if f[l] == usize::MAX {
            f[l] = amb;
        } else if f[l] != amb {
            return Ok(None);
        }
    }
    let level_fn = LevelFunction(f);
    if !level_fn.is_strictly_increasing() {
        return Ok(None);
    }
    for i in 0..sub.len() {
        if sub.level_of(i) + 1 < h {
            let j = t.index_of(sub.node(i)).unwrap();
            if sub.children(i).len() != t.children(j).len() {
                return Ok(None);
            }
        }
    }
    Ok(Some(StrongSubtreeWitness { subtree: sub, ambient: t.clone(), level_fn }))
}

/// Increasing sequences of `n` levels below `height`, in lex order.
pub fn level_functions(height: usize, n: usize) -> Vec<LevelFunction> {
    fn rec(start: usize, height: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<LevelFunction>) {
        if cur.len() == n {
            out.push(LevelFunction(cur.clone()));
            return;
        }
        for l in start..height {
            if height - l < n - cur.len() {
                break;
            }
            cur.push(l);
            rec(l + 1, height, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 1 {
        rec(0, height, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Node sets (as ambient indices) of all strong subtrees with level function `f`
/// rooted at ambient node `root`, which must sit at level `f[0]`.
fn expand(t: &FiniteTree, f: &[usize], i: usize, node: usize) -> Vec<Vec<usize>> {
    if i + 1 == f.len() || t.is_leaf(node) {
        return vec![vec![node]];
    }
    let mut acc: Vec<Vec<usize>> = vec![vec![node]];
    for &c in t.children(node) {
        let mut opts = Vec::new();
        for d in t.descendants_at_level(c, f[i + 1]) {
            opts.extend(expand(t, f, i + 1, d));
        }
        if opts.is_empty() {
            return Vec::new();
        }
        acc = acc.iter().flat_map(|a| opts.iter().map(move |o| [a.as_slice(), o].concat())).collect();
    }
    acc
}

/// Strong subtrees of `t` with level function `f`, sorted by their node lists.
pub fn strong_subtrees_with_level_fn(t: &FiniteTree, f: &LevelFunction) -> Vec<StrongSubtreeWitness> {
    let mut v = subtrees_with_level_fn(t, f);
    sort_witnesses(&mut v);
    v
}

fn subtrees_with_level_fn(t: &FiniteTree, f: &LevelFunction) -> Vec<StrongSubtreeWitness> {
    let mut out = Vec::new();
    for &r in t.at_level(f.0[0]) {
        for set in expand(t, &f.0, 0, r) {
            let sub = FiniteTree::new(set.iter().map(|&i| t.node(i).clone())).expect("strong subtrees are trees");
            if sub.height() == f.0.len() {
                out.push(StrongSubtreeWitness { subtree: sub, ambient: t.clone(), level_fn: f.clone() });
            }
        }
    }
    out
}

fn sort_witnesses(v: &mut [StrongSubtreeWitness]) {
    v.sort_by(|a, b| a.nodes().cmp(b.nodes()));
}

/// All strong subtrees of height `n`, sorted by their node lists.
pub fn enumerate_strong_subtrees(t: &FiniteTree, n: usize) -> Result<Vec<StrongSubtreeWitness>> {
    if n == 0 {
        return precondition("height must be at least 1");
    }
    let mut out: Vec<_> = level_functions(t.height(), n).iter().flat_map(|f| subtrees_with_level_fn(t, f)).collect();
    sort_witnesses(&mut out);
    Ok(out)
}

/// Same result as [`enumerate_strong_subtrees`], partitioned by level function across threads.
pub fn enumerate_strong_subtrees_par(t: &FiniteTree, n: usize) -> Result<Vec<StrongSubtreeWitness>> {
    if n == 0 {
        return precondition("height must be at least 1");
    }
    let mut out: Vec<_> =
        level_functions(t.height(), n).par_iter().flat_map_iter(|f| subtrees_with_level_fn(t, f)).collect();
    sort_witnesses(&mut out);
    Ok(out)
}

/// Strong subtrees of height `n` whose leaves are all leaves of `t`.
pub fn enumerate_strong_subtrees_with_leaves(t: &FiniteTree, n: usize) -> Result<Vec<StrongSubtreeWitness>> {
    Ok(enumerate_strong_subtrees(t, n)?.into_iter().filter(|w| leaves_preserved(w, t)).collect())
}

pub fn leaves_preserved(w: &StrongSubtreeWitness, t: &FiniteTree) -> bool {
    w.subtree.leaves().into_iter().all(|l| t.is_leaf(t.index_of(l).unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bs;

    fn set(v: &[&str]) -> Vec<BitString> {
        v.iter().map(|s| bs(s)).collect()
    }

    #[test]
    fn figure_one() {
        let t = FiniteTree::full_binary(5);
        let w = is_strong_subtree(&set(&["01", "0101", "0110"]), &t).unwrap().unwrap();
        assert_eq!(w.level_fn, LevelFunction(vec![2, 4]));
        assert!(is_strong_subtree(&set(&["01", "0100", "0101"]), &t).unwrap().is_none());
        assert!(is_strong_subtree(&set(&["01", "0101", "011"]), &t).unwrap().is_none());
    }

    #[test]
    fn foreign_node_is_a_precondition_error() {
        let t = FiniteTree::full_binary(2);
        assert!(is_strong_subtree(&set(&["00"]), &t).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let t3 = FiniteTree::full_binary(3);
        let t2 = FiniteTree::full_binary(2);
        assert_eq!(enumerate_strong_subtrees(&t3, 1).unwrap().len(), 7);
        let h2 = enumerate_strong_subtrees(&t3, 2).unwrap();
        assert_eq!(h2.len(), 7);
        assert_eq!(h2.iter().filter(|w| w.subtree.root().is_empty()).count(), 5);
        assert_eq!(enumerate_strong_subtrees(&t2, 2).unwrap().len(), 1);
        assert_eq!(enumerate_strong_subtrees_with_leaves(&t3, 2).unwrap().len(), 6);
        assert_eq!(enumerate_strong_subtrees_with_leaves(&t3, 3).unwrap().len(), 1);
        assert_eq!(enumerate_strong_subtrees_with_leaves(&t2, 2).unwrap().len(), 1);
    }

    #[test]
    fn tree_rejects_non_trees() {
        assert!(FiniteTree::new(Vec::new()).is_err());
        assert!(FiniteTree::new(set(&["0", "1"])).is_err());
        assert!(FiniteTree::new(set(&["e", "00", "01"])).is_err());
    }

    #[test]
    fn levels_are_relative_to_the_set() {
        let t = FiniteTree::new(set(&["e", "0", "000", "0001", "01"])).unwrap();
        assert_eq!(t.level(&bs("0001")), Some(3));
        assert_eq!(t.level(&bs("01")), Some(2));
        assert_eq!(t.height(), 4);
    }

    #[test]
    fn uneven_ambient_tree() {
        // A strong subtree must route through every ambient direct extension.
        let t = FiniteTree::new(set(&["e", "0", "1", "00", "01"])).unwrap();
        let all = enumerate_strong_subtrees(&t, 2).unwrap();
        for w in &all {
            assert!(is_strong_subtree(w.nodes(), &t).unwrap().is_some());
        }
        assert_eq!(all.len(), 2);
    }
}
