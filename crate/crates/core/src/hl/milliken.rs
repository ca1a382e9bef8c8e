//! Strong subtrees of height `m` on which a coloring of height-`n` strong subtrees is constant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::DEFAULT_BUDGET;
use crate::error::{precondition, Error, Result};
use crate::strings::BitString;
use crate::tree::{enumerate_strong_subtrees, FiniteTree, WitnessJson};

/// A coloring of height-`n` strong subtrees, keyed by sorted node list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtreeColoring {
    pub n: usize,
    pub k: u32,
    pub table: BTreeMap<String, u32>,
}

/// Key of a node set: its sorted words joined by commas.
pub fn node_set_key(nodes: &[BitString]) -> String {
    let mut v: Vec<&BitString> = nodes.iter().collect();
    v.sort();
    v.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
}

impl SubtreeColoring {
    /// Colors every height-`n` strong subtree of `t` with `f`.
    pub fn from_fn(t: &FiniteTree, n: usize, k: u32, f: impl Fn(&[BitString]) -> u32) -> Result<Self> {
        let table = enumerate_strong_subtrees(t, n)?.iter().map(|w| (node_set_key(w.nodes()), f(w.nodes()))).collect();
        Ok(Self { n, k, table })
    }

    pub fn color(&self, nodes: &[BitString]) -> Result<u32> {
        let key = node_set_key(nodes);
        match self.table.get(&key) {
            Some(&c) if c < self.k => Ok(c),
            Some(&c) => Err(Error::Invalid(format!("color {c} of {{{key}}} is not below {}", self.k))),
            None => Err(Error::Invalid(format!("partial coloring: {{{key}}} is uncolored"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MillikenCertificate {
    pub witness: WitnessJson,
    pub color: u32,
}

pub fn milliken_search(t: &FiniteTree, c: &SubtreeColoring, m: usize) -> Result<Option<MillikenCertificate>> {
    milliken_search_with(t, c, m, DEFAULT_BUDGET)
}

/// First height-`m` strong subtree, by node list, whose height-`n` strong subtrees share a color.
pub fn milliken_search_with(
    t: &FiniteTree,
    c: &SubtreeColoring,
    m: usize,
    budget: u64,
) -> Result<Option<MillikenCertificate>> {
    if c.n == 0 || m < c.n {
        return precondition(format!("need 1 ≤ n ≤ m, got n = {}, m = {m}", c.n));
    }
    for w in enumerate_strong_subtrees(t, c.n)? {
        c.color(w.nodes())?;
    }
    let mut spent = 0u64;
    for s in enumerate_strong_subtrees(t, m)? {
        let mut color = None;
        let mut mono = true;
        for inner in enumerate_strong_subtrees(&s.subtree, c.n)? {
            spent += 1;
            if spent > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            let here = c.color(inner.nodes())?;
            if *color.get_or_insert(here) != here {
                mono = false;
                break;
            }
        }
        if let (true, Some(color)) = (mono, color) {
            return Ok(Some(MillikenCertificate { witness: s.to_json(), color }));
        }
    }
    Ok(None)
}
