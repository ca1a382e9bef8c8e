//! Monochromatic level products of strong subtrees with a common level function.

use serde::{Deserialize, Serialize};

use super::{common_height, LevelIndex, LevelProductColoring, DEFAULT_BUDGET};
use crate::error::{precondition, Error, Result};
use crate::tree::{
    leaves_preserved, level_functions, strong_subtrees_with_level_fn, StrongSubtreeWitness, WitnessJson,
};

/// Which level products must be monochromatic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HlMode {
    /// Every level product `S₀(n) × … × S_{d−1}(n)`, `n < N`.
    #[default]
    General,
    /// Subtrees keep ambient leaves; only the top level product counts.
    Leaves,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub mode: HlMode,
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { mode: HlMode::General, budget: DEFAULT_BUDGET }
    }
}

/// `d` strong subtrees sharing one level function, and the color of their level products.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HLCertificate {
    pub witnesses: Vec<WitnessJson>,
    pub color: u32,
    #[serde(default)]
    pub mode: HlMode,
}

pub fn search_level_product_mono(c: &LevelProductColoring, height: usize) -> Result<Option<HLCertificate>> {
    search_level_product_mono_with(c, height, &SearchOptions::default())
}

/// Least certificate ordered by level function, then by the node lists of each coordinate.
pub fn search_level_product_mono_with(
    c: &LevelProductColoring,
    height: usize,
    opts: &SearchOptions,
) -> Result<Option<HLCertificate>> {
    if height == 0 {
        return precondition("subtree height must be at least 1");
    }
    let trees = c.trees();
    let index = LevelIndex::new(c);
    let mut spent = 0u64;
    for f in level_functions(common_height(trees), height) {
        let cands: Vec<Vec<StrongSubtreeWitness>> = trees
            .iter()
            .map(|t| {
                strong_subtrees_with_level_fn(t, &f)
                    .into_iter()
                    .filter(|w| opts.mode == HlMode::General || leaves_preserved(w, t))
                    .collect()
            })
            .collect();
        if cands.iter().any(Vec::is_empty) {
            continue;
        }
        let checked: Vec<usize> = match opts.mode {
            HlMode::General => (0..height).collect(),
            HlMode::Leaves => vec![height - 1],
        };
        let ambient: Vec<usize> = checked.iter().map(|&j| f.0[j]).collect();
        // Per candidate and checked level, its nodes at that level as ambient indices.
        let rows: Vec<Vec<Vec<Vec<usize>>>> = cands
            .iter()
            .zip(trees)
            .map(|(ws, t)| {
                ws.iter()
                    .map(|w| {
                        checked
                            .iter()
                            .map(|&j| {
                                w.subtree.at_level(j).iter().map(|&i| t.index_of(w.subtree.node(i)).unwrap()).collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let d = trees.len();
        let mut pick = vec![0usize; d];
        loop {
            spent += 1;
            if spent > opts.budget {
                return Err(Error::BudgetExceeded { budget: opts.budget });
            }
            if let Some(color) = mono(&index, &ambient, &rows, &pick, &mut spent, opts.budget)? {
                let witnesses = pick.iter().zip(&cands).map(|(&p, ws)| ws[p].to_json()).collect();
                return Ok(Some(HLCertificate { witnesses, color, mode: opts.mode }));
            }
            if !advance(&mut pick, |i| cands[i].len()) {
                break;
            }
        }
    }
    Ok(None)
}

fn mono(
    index: &LevelIndex,
    levels: &[usize],
    rows: &[Vec<Vec<Vec<usize>>>],
    pick: &[usize],
    spent: &mut u64,
    budget: u64,
) -> Result<Option<u32>> {
    let mut color = None;
    for (slot, &level) in levels.iter().enumerate() {
        let lists: Vec<&Vec<usize>> = pick.iter().enumerate().map(|(i, &p)| &rows[i][p][slot]).collect();
        let mut at = vec![0usize; lists.len()];
        loop {
            *spent += 1;
            if *spent > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            let tuple: Vec<usize> = at.iter().zip(&lists).map(|(&a, l)| l[a]).collect();
            let here = index.color(level, &tuple);
            match color {
                None => color = Some(here),
                Some(c) if c != here => return Ok(None),
                _ => {}
            }
            if !advance(&mut at, |i| lists[i].len()) {
                break;
            }
        }
    }
    Ok(color)
}

/// Advances a mixed-radix counter; false once it wraps to all zeros.
pub(crate) fn advance(at: &mut [usize], lens: impl Fn(usize) -> usize) -> bool {
    for i in (0..at.len()).rev() {
        at[i] += 1;
        if at[i] < lens(i) {
            return true;
        }
        at[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hl::{min_fhl, verify_hl};
    use crate::tree::FiniteTree;

    fn by_level(k: u32, f: impl Fn(usize) -> u32) -> LevelProductColoring {
        LevelProductColoring::from_fn(vec![FiniteTree::full_binary(3)], k, |t| f(t[0].len())).unwrap()
    }

    #[test]
    fn level_parity() {
        let c = by_level(2, |l| (l % 2) as u32);
        let cert = search_level_product_mono(&c, 2).unwrap().unwrap();
        assert_eq!(cert.witnesses[0].levels, vec![0, 2]);
        assert_eq!(cert.color, 0);
        assert!(verify_hl(&c, 2, &cert));
    }

    #[test]
    fn level_identity_has_no_height_three_certificate() {
        let c = by_level(3, |l| l as u32);
        assert_eq!(search_level_product_mono(&c, 3).unwrap(), None);
        assert!(search_level_product_mono(&c, 1).unwrap().is_some());
    }

    #[test]
    fn constant_coloring_always_certifies() {
        for n in 1..=3 {
            let c = by_level(1, |_| 0);
            let cert = search_level_product_mono(&c, n).unwrap().unwrap();
            assert!(verify_hl(&c, n, &cert));
        }
        let c = by_level(1, |_| 0);
        assert!(search_level_product_mono(&c, 0).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let c = by_level(3, |l| l as u32);
        let opts = SearchOptions { budget: 2, ..Default::default() };
        assert_eq!(search_level_product_mono_with(&c, 3, &opts), Err(Error::BudgetExceeded { budget: 2 }));
    }

    #[test]
    fn leaves_mode_agrees_with_min_fhl() {
        let two = |_: usize| 2;
        let r = min_fhl(2, 2, 1, &two, 4).unwrap();
        let t = FiniteTree::full_binary(r.h - 1);
        let leaves: Vec<_> = t.leaves().into_iter().cloned().collect();
        let fail = r.failure.unwrap();
        let c = LevelProductColoring::from_fn(vec![t], 2, |x| {
            leaves.iter().position(|l| l == &x[0]).map_or(0, |i| fail[i])
        })
        .unwrap();
        let opts = SearchOptions { mode: HlMode::Leaves, ..Default::default() };
        assert_eq!(search_level_product_mono_with(&c, 2, &opts).unwrap(), None);
        let c3 = LevelProductColoring::from_fn(vec![FiniteTree::full_binary(r.h)], 2, |_| 0).unwrap();
        let cert = search_level_product_mono_with(&c3, 2, &opts).unwrap().unwrap();
        assert!(verify_hl(&c3, 2, &cert));
    }

    #[test]
    fn products_of_two_trees() {
        let t = FiniteTree::full_binary(3);
        let c = LevelProductColoring::from_fn(vec![t.clone(), t], 2, |x| (x[0].len() % 2) as u32).unwrap();
        let cert = search_level_product_mono(&c, 2).unwrap().unwrap();
        assert_eq!(cert.witnesses[1].levels, vec![0, 2]);
        assert!(verify_hl(&c, 2, &cert));
        let mut bad = cert.clone();
        bad.witnesses[0].levels = vec![0, 1];
        assert!(!verify_hl(&c, 2, &bad));
    }
}
