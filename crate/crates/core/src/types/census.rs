//! Exhaustive censuses of tuple types.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::types::signature::{Packed, PackedOps, SigKind, SigNode, SigTree, WordOps};

/// One tuple type found by a census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub weak: String,
    /// Indices into the census word list of the first tuple (in index order) of this type.
    pub rep: Vec<u32>,
}

/// All tuple types of `n`-subsets of a word list, keyed by tuple signature.
#[derive(Clone, Debug, Default)]
pub struct Census {
    pub n: usize,
    pub types: BTreeMap<String, CensusEntry>,
}

impl Census {
    pub fn tuple_signatures(&self) -> BTreeSet<String> {
        self.types.keys().cloned().collect()
    }

    pub fn embedding_signatures(&self) -> BTreeSet<String> {
        self.types.keys().map(|s| strip_stars(s)).collect()
    }

    pub fn weak_signatures(&self) -> BTreeSet<String> {
        self.types.values().map(|e| e.weak.clone()).collect()
    }
}

pub fn strip_stars(sig: &str) -> String {
    sig.replace('*', "")
}

/// Visits every increasing index tuple `i0 < i1 < … < i_{n-1}` with fixed `i0`.
fn for_each_with_first(first: usize, n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    if first + n > m {
        return;
    }
    let mut idx: Vec<usize> = (0..n).map(|k| first + k).collect();
    loop {
        f(&idx);
        let mut k = n - 1;
        loop {
            if k == 0 {
                return;
            }
            if idx[k] + (n - k) < m {
                idx[k] += 1;
                for j in k + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            k -= 1;
        }
    }
}

/// Tuple types of all `n`-subsets of `words`. The result does not depend on the thread count:
/// each type keeps the lexicographically least index tuple realizing it.
pub fn census<O>(ops: &O, words: &[O::W], n: usize) -> Census
where
    O: WordOps + Sync,
    O::W: Send + Sync,
{
    let mut out = Census { n, types: BTreeMap::new() };
    if n == 0 {
        out.types.insert("-".into(), CensusEntry { weak: "-".into(), rep: vec![] });
        return out;
    }
    let merged = (0..words.len())
        .into_par_iter()
        .map(|first| {
            let mut h: HashMap<String, CensusEntry> = HashMap::new();
            let mut tuple: Vec<O::W> = Vec::with_capacity(n);
            let mut body = String::new();
            for_each_with_first(first, n, words.len(), |idx| {
                tuple.clear();
                tuple.extend(idx.iter().map(|&i| words[i].clone()));
                let tree = SigTree::of(ops, &tuple);
                body.clear();
                tree.write(SigKind::Tuple, &mut body);
                if !h.contains_key(body.as_str()) {
                    let mut weak = String::new();
                    tree.write(SigKind::WeakTuple, &mut weak);
                    h.insert(body.clone(), CensusEntry { weak, rep: idx.iter().map(|&i| i as u32).collect() });
                }
            });
            h
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                a.entry(k).or_insert(v);
            }
            a
        });
    out.types = merged.into_iter().collect();
    out
}

/// Census over all words of length ≤ `max_len`.
pub fn brute_census(n: usize, max_len: usize) -> (Vec<Packed>, Census) {
    let words = Packed::all_up_to(max_len);
    let c = census(&PackedOps, &words, n);
    (words, c)
}

/// The default brute-force word bound 2n−2.
pub fn brute_bound(n: usize) -> usize {
    (2 * n).saturating_sub(2)
}

/// Every weak tuple type of size `n`, generated directly as closure-tree shapes.
///
/// A shape qualifies iff every leaf is a member and every level holds a member or a
/// branching node; unary links point to slot 0.
pub fn weak_types_by_shape(n: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    if n == 0 {
        out.insert("-".to_string());
        return out;
    }
    let mut tree = SigTree { nodes: vec![SigNode { star: false, children: [u32::MAX; 2] }] };
    grow(&mut tree, vec![0], 0, n, &mut out);
    out
}

fn grow(tree: &mut SigTree, level: Vec<usize>, stars: usize, n: usize, out: &mut BTreeSet<String>) {
    // Choice per node: 0 leaf*, 1 unary, 2 unary*, 3 binary, 4 binary*.
    let mut choice = vec![0u8; level.len()];
    loop {
        let mut new_stars = 0;
        let mut open = 0;
        let mut marked = false;
        for &c in &choice {
            let star = matches!(c, 0 | 2 | 4);
            new_stars += star as usize;
            open += match c {
                0 => 0,
                1 | 2 => 1,
                _ => 2,
            };
            marked |= star || c >= 3;
        }
        let total = stars + new_stars;
        if marked && total + open <= n && (open > 0 || total == n) {
            let saved = tree.nodes.len();
            let mut next = Vec::with_capacity(open);
            for (&v, &c) in level.iter().zip(&choice) {
                tree.nodes[v].star = matches!(c, 0 | 2 | 4);
                tree.nodes[v].children = [u32::MAX; 2];
                let k = match c {
                    0 => 0,
                    1 | 2 => 1,
                    _ => 2,
                };
                for b in 0..k {
                    let id = tree.nodes.len();
                    tree.nodes.push(SigNode { star: false, children: [u32::MAX; 2] });
                    tree.nodes[v].children[b] = id as u32;
                    next.push(id);
                }
            }
            if open == 0 {
                out.insert(tree.signature(SigKind::WeakTuple).body);
            } else {
                grow(tree, next, total, n, out);
            }
            tree.nodes.truncate(saved);
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                for &v in &level {
                    tree.nodes[v] = SigNode { star: false, children: [u32::MAX; 2] };
                }
                return;
            }
            if choice[i] < 4 {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_censuses() {
        let (_, c2) = brute_census(2, 2);
        assert_eq!(c2.types.len(), 7);
        assert_eq!(c2.embedding_signatures().len(), 7);
        let (_, c0) = brute_census(0, 0);
        assert_eq!(c0.types.len(), 1);
        let (_, c1) = brute_census(1, 0);
        assert_eq!(c1.types.len(), 1);
    }

    #[test]
    fn representatives_are_least_index_tuples() {
        let (words, c) = brute_census(2, 2);
        let first = &c.types.values().map(|e| e.rep.clone()).min().unwrap();
        assert_eq!(first, &vec![0, 1]);
        for (sig, e) in &c.types {
            let t: Vec<Packed> = e.rep.iter().map(|&i| words[i as usize]).collect();
            let mut s = String::new();
            SigTree::of(&PackedOps, &t).write(SigKind::Tuple, &mut s);
            assert_eq!(&s, sig);
        }
    }

    #[test]
    fn shapes_match_brute_weak_types() {
        for n in 0..=3 {
            let (_, c) = brute_census(n, brute_bound(n));
            assert_eq!(weak_types_by_shape(n), c.weak_signatures(), "n = {n}");
        }
    }
}
