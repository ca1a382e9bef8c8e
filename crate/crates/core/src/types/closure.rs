//! Meet, level and full closures of finite word sets.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::strings::{meet, BitString};

/// A set closed under pairwise meets and under truncation to every occurring length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedTree {
    pub nodes: Vec<BitString>,
}

/// S^∧ = {σ ∧ τ : σ, τ ∈ S}.
pub fn meet_closure(s: &[BitString]) -> BTreeSet<BitString> {
    let mut out = BTreeSet::new();
    for (i, a) in s.iter().enumerate() {
        for b in &s[i..] {
            out.insert(meet(a, b));
        }
    }
    out
}

/// S^lvl = {τ↾|σ| : σ, τ ∈ S, |σ| ≤ |τ|}.
pub fn level_closure(s: &[BitString]) -> BTreeSet<BitString> {
    let lens: BTreeSet<usize> = s.iter().map(BitString::len).collect();
    let mut out = BTreeSet::new();
    for t in s {
        for &l in lens.range(..=t.len()) {
            out.insert(t.truncate(l));
        }
    }
    out
}

/// S^cl, the level closure of the meet closure.
pub fn full_closure(s: &[BitString]) -> Result<ClosedTree> {
    if s.is_empty() {
        return precondition("closure of the empty set");
    }
    let m: Vec<BitString> = meet_closure(s).into_iter().collect();
    Ok(ClosedTree { nodes: level_closure(&m).into_iter().collect() })
}

impl ClosedTree {
    pub fn is_closed(nodes: &[BitString]) -> bool {
        let set: BTreeSet<&BitString> = nodes.iter().collect();
        nodes.iter().all(|a| {
            nodes.iter().all(|b| set.contains(&meet(a, b)) && (a.len() > b.len() || set.contains(&b.truncate(a.len()))))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bs;

    fn v(x: &[&str]) -> Vec<BitString> {
        let mut r: Vec<BitString> = x.iter().map(|s| bs(s)).collect();
        r.sort();
        r
    }

    #[test]
    fn examples() {
        assert_eq!(full_closure(&v(&["00", "010", "1"])).unwrap().nodes, v(&["e", "0", "1", "00", "01", "010"]));
        assert_eq!(full_closure(&v(&["0"])).unwrap().nodes, v(&["0"]));
        assert_eq!(full_closure(&v(&["0", "01"])).unwrap().nodes, v(&["0", "01"]));
        assert!(full_closure(&[]).is_err());
    }

    #[test]
    fn closure_is_a_fixed_point() {
        let c = full_closure(&v(&["0011", "01", "1", "110"])).unwrap();
        assert!(ClosedTree::is_closed(&c.nodes));
        assert_eq!(full_closure(&c.nodes).unwrap(), c);
    }
}
