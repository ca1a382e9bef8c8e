//! Least heights for the finitary Halpern–Läuchli theorem on leaves, by exhaustive search.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::advance;
use super::{product, DEFAULT_BUDGET};
use crate::error::{precondition, Error, Result};
use crate::strings::BitString;
use crate::tree::{leaves_preserved, level_functions, strong_subtrees_with_level_fn, FiniteTree};

/// The least height `h` and a coloring of the leaf tuples at height `h − 1` that no
/// monochromatic height-`N` tuple survives (absent when `h = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FhlOutcome {
    pub h: usize,
    pub failure: Option<Vec<u32>>,
}

/// Leaf tuples of `d` full `b`-bounded trees of height `h`, in product order.
pub fn leaf_tuples(h: usize, d: usize, b: &dyn Fn(usize) -> usize) -> Result<Vec<Vec<BitString>>> {
    let t = bounded_tree(h, b)?;
    let leaves: Vec<BitString> = t.leaves().into_iter().cloned().collect();
    Ok(product(&vec![leaves; d]))
}

fn bounded_tree(h: usize, b: &dyn Fn(usize) -> usize) -> Result<FiniteTree> {
    if h == 0 {
        return precondition("tree height must be at least 1");
    }
    if let Some(i) = (0..h - 1).find(|&i| !(1..=2).contains(&b(i))) {
        return precondition(format!("b({i}) = {} is outside 1..=2", b(i)));
    }
    Ok(FiniteTree::full_bounded(h, b))
}

/// Leaf-tuple index sets of every leaf-preserving height-`n` tuple with a common level function.
fn mono_targets(t: &FiniteTree, n: usize, d: usize) -> Vec<Vec<usize>> {
    let leaves: Vec<&BitString> = t.leaves();
    let pos = |w: &BitString| leaves.binary_search(&w).unwrap();
    let width = leaves.len();
    let mut out = BTreeSet::new();
    for f in level_functions(t.height(), n) {
        let tops: Vec<Vec<usize>> = strong_subtrees_with_level_fn(t, &f)
            .into_iter()
            .filter(|w| leaves_preserved(w, t))
            .map(|w| w.subtree.at_level(n - 1).iter().map(|&i| pos(w.subtree.node(i))).collect())
            .collect();
        for combo in product(&vec![tops; d]) {
            let lists: Vec<&Vec<usize>> = combo.iter().collect();
            let mut set = Vec::new();
            let mut at = vec![0; d];
            loop {
                set.push(at.iter().zip(&lists).fold(0, |acc, (&a, l)| acc * width + l[a]));
                if !advance(&mut at, |i| lists[i].len()) {
                    break;
                }
            }
            set.sort_unstable();
            out.insert(set);
        }
    }
    out.into_iter().collect()
}

/// Colorings of `len` points with at most `k` colors, one per color permutation class,
/// as restricted-growth strings in lex order.
fn restricted_growth(len: usize, k: u32, budget: u64) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    if len == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut cur = vec![0u32; len];
    let mut maxes = vec![0u32; len];
    loop {
        out.push(cur.clone());
        if out.len() as u64 > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut i = len;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            let cap = (maxes[i - 1] + 1).min(k - 1);
            if cur[i] < cap {
                cur[i] += 1;
                break;
            }
        }
        maxes[i] = maxes[i - 1].max(cur[i]);
        for j in i + 1..len {
            cur[j] = 0;
            maxes[j] = maxes[i];
        }
    }
}

pub fn min_fhl(n: usize, k: u64, d: usize, b: &dyn Fn(usize) -> usize, h_max: usize) -> Result<FhlOutcome> {
    min_fhl_with(n, k, d, b, h_max, DEFAULT_BUDGET)
}

/// Least `h ≤ h_max` such that every `k`-coloring of the leaf tuples of `d` full `b`-bounded
/// trees of height `h` has a monochromatic leaf-preserving height-`n` tuple.
pub fn min_fhl_with(
    n: usize,
    k: u64,
    d: usize,
    b: &dyn Fn(usize) -> usize,
    h_max: usize,
    budget: u64,
) -> Result<FhlOutcome> {
    if n == 0 || k == 0 || d == 0 {
        return precondition("min_fhl needs N, k, d ≥ 1");
    }
    let mut failure = None;
    for h in 1..=h_max {
        let t = bounded_tree(h, b)?;
        let width = t.leaves().len();
        let points =
            u32::try_from(width).ok().and_then(|w| w.checked_pow(d as u32)).ok_or(Error::BudgetExceeded { budget })?
                as usize;
        let targets = mono_targets(&t, n, d);
        let colorings = restricted_growth(points, k.min(points.max(1) as u64) as u32, budget)?;
        if (colorings.len() as u64).saturating_mul(targets.len().max(1) as u64) > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let defeats = |c: &Vec<u32>| !targets.iter().any(|s| s.iter().all(|&p| c[p] == c[s[0]]));
        match colorings.par_iter().find_first(|c| defeats(c)) {
            Some(c) => failure = Some(c.clone()),
            None => return Ok(FhlOutcome { h, failure }),
        }
    }
    Err(Error::CapExceeded { cap: h_max })
}
