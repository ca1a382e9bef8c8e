//! Finitary Halpern–Läuchli and Milliken searches with checkable certificates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::strings::BitString;
use crate::tree::FiniteTree;

pub mod dense;
pub mod fhl;
pub mod milliken;
pub mod search;
pub mod verify;
pub mod widget;

pub use dense::{find_dense_matrix, find_dense_matrix_with, DenseMatrixCertificate};
pub use fhl::{leaf_tuples, min_fhl, min_fhl_with, FhlOutcome};
pub use milliken::{milliken_search, milliken_search_with, MillikenCertificate, SubtreeColoring};
pub use search::{search_level_product_mono, search_level_product_mono_with, HLCertificate, HlMode, SearchOptions};
pub use verify::{verify_certificate, verify_dense, verify_hl, verify_milliken, CertificateBundle};
pub use widget::{widget_bound, widget_trace, Count, FhlBackend, WidgetParams, WidgetStep};

/// Default cap on the number of search states.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Serialized coloring entry: a node tuple and its color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorEntry {
    pub nodes: Vec<BitString>,
    pub color: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ColoringJson {
    trees: Vec<FiniteTree>,
    k: u32,
    table: Vec<ColorEntry>,
}

fn check_arity(trees: &[FiniteTree], k: u32) -> Result<()> {
    if trees.is_empty() {
        return precondition("at least one tree is required");
    }
    if k == 0 {
        return precondition("at least one color is required");
    }
    Ok(())
}

fn check_table(
    k: u32,
    table: &BTreeMap<Vec<BitString>, u32>,
    domain: impl Iterator<Item = Vec<BitString>>,
) -> Result<usize> {
    let mut size = 0;
    for t in domain {
        match table.get(&t) {
            None => return Err(Error::Invalid(format!("color table is not total: {t:?} is missing"))),
            Some(&c) if c >= k => return Err(Error::Invalid(format!("color {c} of {t:?} is not below {k}"))),
            _ => size += 1,
        }
    }
    if size != table.len() {
        return Err(Error::Invalid("color table has entries outside the domain".into()));
    }
    Ok(size)
}

/// Mixed-radix product of node lists, first coordinate most significant.
pub(crate) fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        out =
            out.iter().flat_map(|p| l.iter().map(move |x| [p.as_slice(), std::slice::from_ref(x)].concat())).collect();
    }
    out
}

/// Height shared by every tree in a level product.
pub(crate) fn common_height(trees: &[FiniteTree]) -> usize {
    trees.iter().map(FiniteTree::height).min().unwrap_or(0)
}

fn level_domain(trees: &[FiniteTree]) -> Vec<Vec<BitString>> {
    (0..common_height(trees))
        .flat_map(|l| {
            let lists: Vec<Vec<BitString>> =
                trees.iter().map(|t| t.at_level(l).iter().map(|&i| t.node(i).clone()).collect()).collect();
            product(&lists)
        })
        .collect()
}

fn full_domain(trees: &[FiniteTree]) -> Vec<Vec<BitString>> {
    product(&trees.iter().map(|t| t.nodes().to_vec()).collect::<Vec<_>>())
}

macro_rules! coloring_type {
    ($(#[$m:meta])* $name:ident, $domain:ident) => {
        $(#[$m])*
        #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
        #[serde(try_from = "ColoringJson", into = "ColoringJson")]
        pub struct $name {
            trees: Vec<FiniteTree>,
            k: u32,
            table: BTreeMap<Vec<BitString>, u32>,
        }

        impl $name {
            pub fn new(trees: Vec<FiniteTree>, k: u32, table: BTreeMap<Vec<BitString>, u32>) -> Result<Self> {
                check_arity(&trees, k)?;
                check_table(k, &table, $domain(&trees).into_iter())?;
                Ok(Self { trees, k, table })
            }

            /// Colors every tuple of the domain with `f`.
            pub fn from_fn(trees: Vec<FiniteTree>, k: u32, f: impl Fn(&[BitString]) -> u32) -> Result<Self> {
                check_arity(&trees, k)?;
                let table = $domain(&trees).into_iter().map(|t| { let c = f(&t); (t, c) }).collect();
                Self::new(trees, k, table)
            }

            pub fn trees(&self) -> &[FiniteTree] {
                &self.trees
            }

            pub fn arity(&self) -> usize {
                self.trees.len()
            }

            pub fn k(&self) -> u32 {
                self.k
            }

            pub fn table(&self) -> &BTreeMap<Vec<BitString>, u32> {
                &self.table
            }

            pub fn color(&self, tuple: &[BitString]) -> Option<u32> {
                self.table.get(tuple).copied()
            }
        }

        impl TryFrom<ColoringJson> for $name {
            type Error = Error;

            fn try_from(j: ColoringJson) -> Result<Self> {
                let mut table = BTreeMap::new();
                for e in j.table {
                    if table.insert(e.nodes.clone(), e.color).is_some() {
                        return Err(Error::Invalid(format!("duplicate color entry {:?}", e.nodes)));
                    }
                }
                Self::new(j.trees, j.k, table)
            }
        }

        impl From<$name> for ColoringJson {
            fn from(c: $name) -> Self {
                let table = c.table.into_iter().map(|(nodes, color)| ColorEntry { nodes, color }).collect();
                ColoringJson { trees: c.trees, k: c.k, table }
            }
        }
    };
}

coloring_type!(
    /// A `k`-coloring of `⋃_n T₀(n) × … × T_{d−1}(n)`, levels below the least tree height.
    LevelProductColoring,
    level_domain
);

coloring_type!(
    /// A `k`-coloring of the full product `T₀ × … × T_{d−1}`.
    ProductColoring,
    full_domain
);

/// Dense lookup for same-level tuples given as ambient node indices.
pub(crate) struct LevelIndex {
    pos: Vec<Vec<usize>>,
    colors: Vec<Vec<u32>>,
    widths: Vec<Vec<usize>>,
}

impl LevelIndex {
    pub(crate) fn new(c: &LevelProductColoring) -> Self {
        let trees = c.trees();
        let mut pos: Vec<Vec<usize>> = trees.iter().map(|t| vec![0; t.len()]).collect();
        for (t, p) in trees.iter().zip(pos.iter_mut()) {
            for l in 0..t.height() {
                for (j, &i) in t.at_level(l).iter().enumerate() {
                    p[i] = j;
                }
            }
        }
        let h = common_height(trees);
        let widths: Vec<Vec<usize>> = (0..h).map(|l| trees.iter().map(|t| t.at_level(l).len()).collect()).collect();
        let colors = (0..h)
            .map(|l| {
                let lists: Vec<Vec<BitString>> =
                    trees.iter().map(|t| t.at_level(l).iter().map(|&i| t.node(i).clone()).collect()).collect();
                product(&lists).iter().map(|tup| c.table()[tup]).collect()
            })
            .collect();
        Self { pos, colors, widths }
    }

    pub(crate) fn color(&self, level: usize, tuple: &[usize]) -> u32 {
        let mut idx = 0;
        for (i, &node) in tuple.iter().enumerate() {
            idx = idx * self.widths[level][i] + self.pos[i][node];
        }
        self.colors[level][idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bs;

    #[test]
    fn colorings_must_be_total_and_in_range() {
        let t = FiniteTree::full_binary(2);
        let ok = LevelProductColoring::from_fn(vec![t.clone()], 2, |x| x[0].len() as u32).unwrap();
        assert_eq!(ok.table().len(), 3);
        let mut partial = ok.table().clone();
        partial.remove(&vec![bs("1")]);
        assert!(LevelProductColoring::new(vec![t.clone()], 2, partial).is_err());
        assert!(LevelProductColoring::from_fn(vec![t.clone()], 1, |x| x[0].len() as u32).is_err());
        let json = serde_json::to_string(&ok).unwrap();
        assert_eq!(serde_json::from_str::<LevelProductColoring>(&json).unwrap(), ok);
        let full = ProductColoring::from_fn(vec![t.clone(), t], 1, |_| 0).unwrap();
        assert_eq!(full.table().len(), 9);
    }

    #[test]
    fn level_domain_stops_at_least_height() {
        let c = LevelProductColoring::from_fn(vec![FiniteTree::full_binary(3), FiniteTree::full_binary(2)], 1, |_| 0)
            .unwrap();
        assert_eq!(c.table().len(), 1 + 4);
        let idx = LevelIndex::new(&c);
        assert_eq!(idx.color(1, &[2, 1]), 0);
    }
}
