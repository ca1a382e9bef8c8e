//! Finite blossom tree tables: a generator and a validator.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::coded::{encode_coded_graph, epn, graph_triple_encode};
use super::{JoyceGraphTable, JoyceOrderTable};
use crate::error::{precondition, Error, Result};
use crate::strings::{meet, BitString};
use crate::types::meet_closure;

/// `f` and `g` recorded on all words of length ≤ `depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlossomTreeTable {
    pub depth: usize,
    pub f: BTreeMap<BitString, BitString>,
    pub g: BTreeMap<BitString, BitString>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlossomViolation {
    /// One of `prefix`, `lex`, `meet`, `1`, `2`, `3`.
    pub condition: String,
    pub witness: Vec<BitString>,
}

fn v(condition: &str, witness: &[&BitString]) -> BlossomViolation {
    BlossomViolation { condition: condition.into(), witness: witness.iter().map(|w| (*w).clone()).collect() }
}

/// Checks the blossom conditions wherever the table defines both sides.
pub fn validate_blossom(b: &BlossomTreeTable) -> Result<Vec<BlossomViolation>> {
    let dom: Vec<&BitString> = b.f.keys().collect();
    if b.g.keys().ne(b.f.keys()) {
        return Err(Error::Precondition("f and g must share a domain".into()));
    }
    for s in &dom {
        if !s.is_empty() && !b.f.contains_key(&s.truncate(s.len() - 1)) {
            return Err(Error::Precondition(format!("domain is not prefix-closed at {s}")));
        }
    }
    let mut out = Vec::new();
    for &s in &dom {
        let (fs, gs) = (&b.f[s], &b.g[s]);
        if !fs.is_proper_prefix_of(gs) {
            out.push(v("1", &[s]));
        }
        for &t in &dom {
            let ft = &b.f[t];
            if s.is_proper_prefix_of(t) && !fs.is_proper_prefix_of(ft) {
                out.push(v("prefix", &[s, t]));
            }
            if s.cmp_lex(t) == Ordering::Less && fs.cmp_lex(ft) != Ordering::Less {
                out.push(v("lex", &[s, t]));
            }
            if s < t && b.f[&meet(s, t)] != meet(fs, ft) {
                out.push(v("meet", &[s, t]));
            }
            if t.len() > s.len() && ft.len() <= gs.len() {
                out.push(v("2", &[s, t]));
            }
            if t.len() == s.len() {
                if let (Some(a), Some(c)) = (b.f.get(&t.child(0)), b.f.get(&t.child(1))) {
                    let p = gs.len();
                    if a.get(p).is_none() || a.get(p) == c.get(p) {
                        out.push(v("3", &[s, t]));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A blossom table from the triple encoding, recoded as a coded Joyce graph.
///
/// Labels are length-then-lex ranks over the meet closure of the encoded words; equal-length
/// encoded words are non-adjacent. Then `f(σ) = g(σ0) ∧ g(σ1)`.
pub fn generate_blossom(depth: usize) -> Result<BlossomTreeTable> {
    if depth == 0 || depth > 4 {
        return precondition("blossom depth must lie in 1..=4");
    }
    let mut dom = BitString::all_up_to(depth + 1);
    let enc: BTreeMap<BitString, BitString> = dom.iter().map(|w| (w.clone(), graph_triple_encode(w))).collect();
    dom.sort_by(|a, b| enc[a].cmp_lex(&enc[b]));
    let imgs: Vec<BitString> = dom.iter().map(|w| enc[w].clone()).collect();
    let closure: Vec<BitString> = meet_closure(&imgs).into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let rank = |w: &BitString| closure.binary_search(w).unwrap() as u64;
    let n = imgs.len();
    let order = JoyceOrderTable::from_fn(n, |i, j| rank(&meet(&imgs[i], &imgs[j])))?;
    let edges = (0..n).map(|i| (0..n).map(|j| i != j && epn(&imgs[i], &imgs[j]).unwrap_or(false)).collect()).collect();
    let coded = encode_coded_graph(&JoyceGraphTable::new(order, edges)?)?;
    let g_all: BTreeMap<BitString, BitString> = dom.into_iter().zip(coded).collect();
    let mut f = BTreeMap::new();
    let mut g = BTreeMap::new();
    for w in BitString::all_up_to(depth) {
        f.insert(w.clone(), meet(&g_all[&w.child(0)], &g_all[&w.child(1)]));
        g.insert(w.clone(), g_all[&w].clone());
    }
    Ok(BlossomTreeTable { depth, f, g })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_tables_validate() {
        for d in 1..=3 {
            let b = generate_blossom(d).unwrap();
            let r = validate_blossom(&b).unwrap();
            assert!(r.is_empty(), "depth {d}: {:?}", &r[..r.len().min(5)]);
        }
        assert!(generate_blossom(0).is_err());
    }

    #[test]
    fn constructed_violations() {
        let b = generate_blossom(2).unwrap();
        let same = BlossomTreeTable { g: b.f.clone(), ..b.clone() };
        assert!(validate_blossom(&same).unwrap().iter().any(|x| x.condition == "1"));
        let mut bad = b.clone();
        let e = BitString::empty();
        let f1 = bad.f[&e.child(1)].clone();
        let p = bad.g[&e].len();
        let mut f0 = bad.f[&e.child(0)].clone();
        f0.set(p, f1.bit(p));
        bad.f.insert(e.child(0), f0);
        assert!(validate_blossom(&bad).unwrap().iter().any(|x| x.condition == "3"));
        let mut holes = b;
        holes.f.remove(&BitString::empty());
        holes.g.remove(&BitString::empty());
        assert!(validate_blossom(&holes).is_err());
    }
}
