//! Exhaustive enumeration of Joyce orders and Joyce trees.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::{validate_joyce_order, JoyceOrderTable, JoyceTree};
use crate::error::{precondition, Result};

/// Every Joyce order on `0 < 1 < … < n−1` up to relabeling by an order isomorphism of labels,
/// with labels ranked onto `0..k`.
///
/// Labels are assigned rank by rank; a partial assignment is abandoned as soon as some axiom
/// instance fails whatever the unassigned entries become.
#[allow(clippy::needless_range_loop)]
pub fn all_joyce_orders(n: usize) -> Result<Vec<JoyceOrderTable>> {
    if n == 0 || n > 5 {
        return precondition("Joyce order enumeration needs 1 ≤ n ≤ 5");
    }
    let mut idx = vec![vec![0usize; n]; n];
    let mut m = 0;
    for i in 0..n {
        for j in i..n {
            idx[i][j] = m;
            idx[j][i] = m;
            m += 1;
        }
    }
    let mut st = Search { n, idx, rank: vec![None; m], out: Vec::new() };
    st.go(0);
    Ok(st.out)
}

struct Search {
    n: usize,
    idx: Vec<Vec<usize>>,
    rank: Vec<Option<u32>>,
    out: Vec<JoyceOrderTable>,
}

impl Search {
    fn cmp(&self, a: usize, b: usize) -> Option<Ordering> {
        match (self.rank[a], self.rank[b]) {
            (Some(x), Some(y)) => Some(x.cmp(&y)),
            (Some(_), None) => Some(Ordering::Less),
            (None, Some(_)) => Some(Ordering::Greater),
            (None, None) => None,
        }
    }

    fn refuted(&self) -> bool {
        let n = self.n;
        let e = |a: usize, b: usize| self.idx[a][b];
        for x in 0..n {
            for y in x..n {
                for z in 0..n {
                    let prem12 = self.cmp(e(x, y), e(x, z)) == Some(Ordering::Less);
                    if prem12 {
                        if (x < y) != (z < y) {
                            return true;
                        }
                        if matches!(self.cmp(e(x, y), e(z, y)), Some(o) if o != Ordering::Equal) {
                            return true;
                        }
                    }
                    for t in z..n {
                        if x == y && y == z && z == t {
                            continue;
                        }
                        if self.cmp(e(x, y), e(z, t)) == Some(Ordering::Equal) {
                            let bad = |o: Option<Ordering>| matches!(o, Some(Ordering::Equal | Ordering::Greater));
                            if bad(self.cmp(e(x, y), e(x, z))) || bad(self.cmp(e(x, y), e(y, t))) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn go(&mut self, k: u32) {
        let free: Vec<usize> = (0..self.rank.len()).filter(|&i| self.rank[i].is_none()).collect();
        if free.is_empty() {
            let t = JoyceOrderTable::from_fn(self.n, |a, b| self.rank[self.idx[a][b]].unwrap() as u64).unwrap();
            debug_assert!(validate_joyce_order(&t).is_empty());
            self.out.push(t);
            return;
        }
        for mask in 1u32..(1 << free.len()) {
            for (b, &i) in free.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    self.rank[i] = Some(k);
                }
            }
            if !self.refuted() {
                self.go(k + 1);
            }
            for &i in &free {
                self.rank[i] = None;
            }
        }
    }
}

/// Every Joyce tree with `n` leaves.
pub fn all_joyce_trees(n: usize) -> Result<Vec<JoyceTree>> {
    if n == 0 || n > 6 {
        return precondition("Joyce tree enumeration needs 1 ≤ n ≤ 6");
    }
    let labels: Vec<u32> = (1..=(2 * n - 1) as u32).collect();
    let all: BTreeSet<JoyceTree> = trees_on(&labels).into_iter().collect();
    Ok(all.into_iter().collect())
}

fn trees_on(labels: &[u32]) -> Vec<JoyceTree> {
    let root = labels[0];
    let rest = &labels[1..];
    if rest.is_empty() {
        return vec![JoyceTree::leaf(root)];
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << rest.len()) {
        let k = mask.count_ones() as usize;
        if k % 2 == 0 || rest.len() - k == 0 {
            continue;
        }
        let (l, r): (Vec<u32>, Vec<u32>) = {
            let mut l = Vec::new();
            let mut r = Vec::new();
            for (b, &x) in rest.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    l.push(x)
                } else {
                    r.push(x)
                }
            }
            (l, r)
        };
        for a in trees_on(&l) {
            for b in trees_on(&r) {
                out.push(JoyceTree::node(root, a.clone(), b));
            }
        }
    }
    out
}

pub fn count_joyce_trees(n: usize) -> Result<u64> {
    Ok(all_joyce_trees(n)?.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joyce::joyce_tree_of;

    #[test]
    fn odd_tangent_numbers() {
        let v: Vec<u64> = (1..=4).map(|n| count_joyce_trees(n).unwrap()).collect();
        assert_eq!(v, vec![1, 2, 16, 272]);
        assert!(all_joyce_trees(3).unwrap().iter().all(|t| t.is_valid() && t.leaves() == 3));
    }

    #[test]
    fn orders_match_trees_for_small_sizes() {
        for n in 1..=3 {
            let orders = all_joyce_orders(n).unwrap();
            let trees: BTreeSet<JoyceTree> = orders.iter().map(|o| joyce_tree_of(o).unwrap()).collect();
            assert_eq!(trees.len(), orders.len());
            assert_eq!(trees.into_iter().collect::<Vec<_>>(), all_joyce_trees(n).unwrap());
        }
    }
}
