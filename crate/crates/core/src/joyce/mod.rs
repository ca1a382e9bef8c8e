//! Joyce orders, Joyce trees and Joyce graphs.
//!
//! A table lists its elements in increasing order, so element `i` is below element `j`
//! iff `i < j`. Labels are a symmetric `n × n` matrix.

pub mod blossom;
pub mod coded;
pub mod enumerate;
pub mod graphs;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use blossom::{generate_blossom, validate_blossom, BlossomTreeTable, BlossomViolation};
pub use coded::{
    coded_copies, dlo_joyce_order, dlo_prefix, encode_coded_graph, encode_coded_order, epn, graph_triple_encode,
    hat_encode, in_dlo_language, rado_extend, table_of_coded, validate_coded_joyce_graph, validate_coded_joyce_order,
};
pub use enumerate::{all_joyce_orders, all_joyce_trees, count_joyce_trees};
pub use graphs::{count_joyce_graphs, graph_classes, joyce_graphs, Graph};

/// A finite Joyce order candidate: elements `0 < 1 < … < n−1` and their labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JoyceOrderTable {
    labels: Vec<Vec<u64>>,
}

impl JoyceOrderTable {
    pub fn new(labels: Vec<Vec<u64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Precondition("a Joyce order needs at least one element".into()));
        }
        for (i, row) in labels.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!("label row {i} has {} entries, expected {n}", row.len())));
            }
            for j in 0..i {
                if row[j] != labels[j][i] {
                    return Err(Error::Precondition(format!("labels are not symmetric at ({j},{i})")));
                }
            }
        }
        Ok(Self { labels })
    }

    /// Builds the table from a label function on index pairs.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> u64) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, x: usize, y: usize) -> u64 {
        self.labels[x][y]
    }

    pub fn labels(&self) -> &[Vec<u64>] {
        &self.labels
    }

    pub fn distinct_labels(&self) -> BTreeSet<u64> {
        self.labels.iter().flatten().copied().collect()
    }

    /// The same structure with labels renamed onto `0..k`.
    pub fn reranked(&self) -> Self {
        let ls: Vec<u64> = self.distinct_labels().into_iter().collect();
        let rank = |v: u64| ls.binary_search(&v).unwrap() as u64;
        Self { labels: self.labels.iter().map(|r| r.iter().map(|&v| rank(v)).collect()).collect() }
    }

    /// The substructure on `elems` (given in increasing order).
    pub fn restrict(&self, elems: &[usize]) -> Self {
        Self { labels: elems.iter().map(|&i| elems.iter().map(|&j| self.labels[i][j]).collect()).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    Jo1,
    Jo2,
    Jo3,
    Jo4,
    /// The bit condition of coded orders and graphs.
    Coded,
    /// Two coded strings are prefix-comparable.
    Antichain,
    /// Two coded graph vertices have the same length.
    Lengths,
}

/// One violated axiom instance with its witnessing elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

/// Reports are truncated to this many violations.
pub const MAX_VIOLATIONS: usize = 1000;

pub(crate) fn check_axioms(
    n: usize,
    label: impl Fn(usize, usize) -> u64,
    edge: Option<&dyn Fn(usize, usize) -> bool>,
    out: &mut Vec<Violation>,
) {
    let push = |out: &mut Vec<Violation>, axiom, w: &[usize]| {
        if out.len() < MAX_VIOLATIONS {
            out.push(Violation { axiom, witness: w.to_vec() });
        }
    };
    for x in 0..n {
        for y in x..n {
            let xy = label(x, y);
            for z in 0..n {
                let xz = label(x, z);
                for t in z..n {
                    if x == y && y == z && z == t {
                        continue;
                    }
                    let w = [x, y, z, t];
                    if xy < xz {
                        if (x < y) != (z < y) {
                            push(out, Axiom::Jo1, &w);
                        }
                        if xy != label(z, y) {
                            push(out, Axiom::Jo2, &w);
                        }
                    }
                    if xy == label(z, t) && !(xy < xz && xy < label(y, t)) {
                        push(out, Axiom::Jo3, &w);
                    }
                }
            }
        }
    }
    if let Some(e) = edge {
        for x in 0..n {
            for y in 0..n {
                for z in y + 1..n {
                    if label(x, x) < label(y, z) && e(x, y) != e(x, z) {
                        push(out, Axiom::Jo4, &[x, y, z]);
                    }
                }
            }
        }
    }
}

/// Every violated instance of Jo1–Jo3.
pub fn validate_joyce_order(t: &JoyceOrderTable) -> Vec<Violation> {
    let mut out = Vec::new();
    check_axioms(t.len(), |a, b| t.label(a, b), None, &mut out);
    out
}

/// A Joyce order with an irreflexive symmetric edge relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JoyceGraphTable {
    pub order: JoyceOrderTable,
    pub edges: Vec<Vec<bool>>,
}

impl JoyceGraphTable {
    #[allow(clippy::needless_range_loop)]
    pub fn new(order: JoyceOrderTable, edges: Vec<Vec<bool>>) -> Result<Self> {
        let n = order.len();
        if edges.len() != n || edges.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("edge table must be n × n".into()));
        }
        for i in 0..n {
            if edges[i][i] {
                return Err(Error::Precondition(format!("loop at element {i}")));
            }
            for j in 0..i {
                if edges[i][j] != edges[j][i] {
                    return Err(Error::Precondition(format!("edges are not symmetric at ({j},{i})")));
                }
            }
        }
        Ok(Self { order, edges })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Every violated instance of Jo1–Jo4.
pub fn validate_joyce_graph(g: &JoyceGraphTable) -> Vec<Violation> {
    let mut out = Vec::new();
    let e = |a: usize, b: usize| g.edges[a][b];
    check_axioms(g.len(), |a, b| g.order.label(a, b), Some(&e), &mut out);
    out
}

/// A full binary tree with increasing labels `1..=2n−1`; leaves in left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JoyceTree {
    pub label: u32,
    pub children: Option<Box<(JoyceTree, JoyceTree)>>,
}

impl JoyceTree {
    pub fn leaf(label: u32) -> Self {
        Self { label, children: None }
    }

    pub fn node(label: u32, left: JoyceTree, right: JoyceTree) -> Self {
        Self { label, children: Some(Box::new((left, right))) }
    }

    pub fn leaves(&self) -> usize {
        match &self.children {
            None => 1,
            Some(c) => c.0.leaves() + c.1.leaves(),
        }
    }

    pub fn size(&self) -> usize {
        match &self.children {
            None => 1,
            Some(c) => 1 + c.0.size() + c.1.size(),
        }
    }

    fn labels_into(&self, out: &mut Vec<u32>) {
        out.push(self.label);
        if let Some(c) = &self.children {
            c.0.labels_into(out);
            c.1.labels_into(out);
        }
    }

    fn increasing(&self) -> bool {
        match &self.children {
            None => true,
            Some(c) => c.0.label > self.label && c.1.label > self.label && c.0.increasing() && c.1.increasing(),
        }
    }

    /// Checks that labels are exactly `1..=2n−1` and increase away from the root.
    pub fn is_valid(&self) -> bool {
        let mut ls = Vec::new();
        self.labels_into(&mut ls);
        ls.sort_unstable();
        ls.iter().enumerate().all(|(i, &l)| l as usize == i + 1) && self.increasing()
    }

    /// The Joyce order of the leaves: ⟨x,y⟩ is the label of x ∧ y.
    pub fn order_table(&self) -> JoyceOrderTable {
        fn paths(t: &JoyceTree, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            prefix.push(t.label);
            match &t.children {
                None => out.push(prefix.clone()),
                Some(c) => {
                    paths(&c.0, prefix, out);
                    paths(&c.1, prefix, out);
                }
            }
            prefix.pop();
        }
        let mut ps = Vec::new();
        paths(self, &mut Vec::new(), &mut ps);
        JoyceOrderTable::from_fn(ps.len(), |i, j| {
            let k = ps[i].iter().zip(&ps[j]).take_while(|(a, b)| a == b).count();
            ps[i][k - 1] as u64
        })
        .expect("tree tables are symmetric")
    }
}

impl fmt::Display for JoyceTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.children {
            None => write!(f, "({} - -)", self.label),
            Some(c) => write!(f, "({} {} {})", self.label, c.0, c.1),
        }
    }
}

impl FromStr for JoyceTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let toks: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let t = parse_tree(&toks, &mut pos)?.ok_or_else(|| Error::Parse("empty Joyce tree".into()))?;
        if pos != toks.len() {
            return Err(Error::Parse("trailing input after Joyce tree".into()));
        }
        Ok(t)
    }
}

fn parse_tree(toks: &[&str], pos: &mut usize) -> Result<Option<JoyceTree>> {
    let err = || Error::Parse("malformed Joyce tree".into());
    match toks.get(*pos) {
        Some(&"-") => {
            *pos += 1;
            Ok(None)
        }
        Some(&"(") => {
            *pos += 1;
            let label: u32 = toks.get(*pos).ok_or_else(err)?.parse().map_err(|_| err())?;
            *pos += 1;
            let l = parse_tree(toks, pos)?;
            let r = parse_tree(toks, pos)?;
            if toks.get(*pos) != Some(&")") {
                return Err(err());
            }
            *pos += 1;
            match (l, r) {
                (None, None) => Ok(Some(JoyceTree::leaf(label))),
                (Some(l), Some(r)) => Ok(Some(JoyceTree::node(label, l, r))),
                _ => Err(Error::Parse("Joyce tree nodes have zero or two children".into())),
            }
        }
        _ => Err(err()),
    }
}

impl Serialize for JoyceTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for JoyceTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The Joyce tree coded by a valid Joyce order: split at the least label, recurse, rename labels.
pub fn joyce_tree_of(t: &JoyceOrderTable) -> Result<JoyceTree> {
    let v = validate_joyce_order(t);
    if !v.is_empty() {
        return Err(Error::Invalid(format!("not a Joyce order: {:?} at {:?}", v[0].axiom, v[0].witness)));
    }
    let ls: Vec<u64> = t.distinct_labels().into_iter().collect();
    let elems: Vec<usize> = (0..t.len()).collect();
    let raw = split(t, &elems);
    Ok(rename(&raw, &ls))
}

fn split(t: &JoyceOrderTable, elems: &[usize]) -> JoyceTree {
    let mut best = (u64::MAX, 0, 0);
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i..] {
            if t.label(x, y) < best.0 {
                best = (t.label(x, y), x, y);
            }
        }
    }
    let (l, x, y) = best;
    if x == y {
        return JoyceTree::leaf(l as u32);
    }
    let xs: Vec<usize> = elems.iter().copied().filter(|&z| t.label(x, z) > l).collect();
    let ys: Vec<usize> = elems.iter().copied().filter(|&z| t.label(y, z) > l).collect();
    JoyceTree::node(l as u32, split(t, &xs), split(t, &ys))
}

fn rename(raw: &JoyceTree, ls: &[u64]) -> JoyceTree {
    let label = ls.binary_search(&(raw.label as u64)).unwrap() as u32 + 1;
    match &raw.children {
        None => JoyceTree::leaf(label),
        Some(c) => JoyceTree::node(label, rename(&c.0, ls), rename(&c.1, ls)),
    }
}
