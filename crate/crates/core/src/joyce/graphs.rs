//! Joyce graph structures: Joyce trees with a compatible edge set.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::enumerate::all_joyce_trees;
use super::{validate_joyce_graph, JoyceGraphTable, JoyceTree};
use crate::error::{precondition, Result};

/// A finite simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return precondition(format!("bad edge ({a},{b}) on {n} vertices"));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self { n, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
    }

    pub fn from_matrix(m: &[Vec<bool>]) -> Self {
        let n = m.len();
        Self::new(n, (0..n).flat_map(|a| (a + 1..n).filter(move |&b| m[a][b]).map(move |b| (a, b)))).unwrap()
    }

    fn mask_under(&self, perm: &[usize]) -> u64 {
        let mut bits = 0u64;
        for &(a, b) in &self.edges {
            let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
            bits |= 1 << (x * self.n + y);
        }
        bits
    }

    /// Least edge mask over all vertex relabelings.
    pub fn canonical(&self) -> u64 {
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut best = u64::MAX;
        permute(&mut perm, 0, &mut |p| best = best.min(self.mask_under(p)));
        best
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges.len() == other.edges.len() && self.canonical() == other.canonical()
    }
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// One representative per isomorphism class of graphs on `n ≤ 6` vertices.
pub fn graph_classes(n: usize) -> Result<Vec<Graph>> {
    if n > 6 {
        return precondition("graph classes are listed for n ≤ 6");
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let g = Graph::new(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p))?;
        if seen.insert(g.canonical()) {
            out.push(g);
        }
    }
    Ok(out)
}

/// Every Joyce graph structure of size `n`: a Joyce tree and an edge set on its leaves
/// satisfying Jo4.
pub fn joyce_graphs(n: usize) -> Result<Vec<(JoyceTree, Graph)>> {
    if n > 5 {
        return precondition("Joyce graph enumeration is limited to n ≤ 5");
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for t in all_joyce_trees(n)? {
        let order = t.order_table();
        for mask in 0u64..(1 << pairs.len()) {
            let mut m = vec![vec![false; n]; n];
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    m[a][b] = true;
                    m[b][a] = true;
                }
            }
            let g = JoyceGraphTable::new(order.clone(), m)?;
            if validate_joyce_graph(&g).is_empty() {
                out.push((t.clone(), Graph::from_matrix(&g.edges)));
            }
        }
    }
    Ok(out)
}

/// Number of Joyce graph structures of size `n`, optionally only those whose graph is
/// isomorphic to `filter`.
pub fn count_joyce_graphs(n: usize, filter: Option<&Graph>) -> Result<u64> {
    if n == 0 {
        return precondition("Joyce graphs need n ≥ 1");
    }
    if let Some(f) = filter {
        if f.n != n {
            return precondition(format!("filter graph has {} vertices, expected {n}", f.n));
        }
    }
    let all = joyce_graphs(n)?;
    let key = filter.map(Graph::canonical);
    Ok(all.iter().filter(|(_, g)| key.map_or(true, |k| g.canonical() == k)).count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        assert_eq!(count_joyce_graphs(2, None).unwrap(), 4);
        assert_eq!(count_joyce_graphs(3, None).unwrap(), 112);
        assert_eq!(count_joyce_graphs(3, Some(&Graph::complete(3))).unwrap(), 16);
        assert!(count_joyce_graphs(3, Some(&Graph::complete(2))).is_err());
    }

    #[test]
    fn filtered_counts_sum_to_total() {
        for n in 1..=3 {
            let classes = graph_classes(n).unwrap();
            let sum: u64 = classes.iter().map(|g| count_joyce_graphs(n, Some(g)).unwrap()).sum();
            assert_eq!(sum, count_joyce_graphs(n, None).unwrap());
        }
        assert_eq!(graph_classes(3).unwrap().len(), 4);
    }
}
