//! Coded Joyce orders and graphs, the DLO language, and string encodings.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{check_axioms, joyce_tree_of, validate_joyce_graph, validate_joyce_order, Axiom, JoyceGraphTable};
use super::{JoyceOrderTable, JoyceTree, Violation, MAX_VIOLATIONS};
use crate::error::{precondition, Error, Result};
use crate::strings::{meet, BitString};

/// Validation outcome for a set of strings; witnesses index into `strings`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodedReport {
    pub valid: bool,
    /// The input in lexicographic order.
    pub strings: Vec<BitString>,
    pub violations: Vec<Violation>,
}

fn sorted_lex(s: &[BitString]) -> Vec<BitString> {
    let set: BTreeSet<&BitString> = s.iter().collect();
    let mut v: Vec<BitString> = set.into_iter().cloned().collect();
    v.sort_by(|a, b| a.cmp_lex(b));
    v
}

/// The strings in lexicographic order with labels `|σ ∧ τ|`.
pub fn table_of_coded(s: &[BitString]) -> Result<(Vec<BitString>, JoyceOrderTable)> {
    let v = sorted_lex(s);
    let t = JoyceOrderTable::from_fn(v.len(), |i, j| v[i].meet_len(&v[j]) as u64)?;
    Ok((v, t))
}

fn coded_condition(v: &[BitString], include_equal: bool, out: &mut Vec<Violation>) {
    for i in 0..v.len() {
        for j in i..v.len() {
            if i == j && !include_equal {
                continue;
            }
            let m = meet(&v[i], &v[j]);
            for (k, r) in v.iter().enumerate() {
                if r.len() > m.len() && !m.is_prefix_of(r) && r.bit(m.len()) != 0 && out.len() < MAX_VIOLATIONS {
                    out.push(Violation { axiom: Axiom::Coded, witness: vec![i, j, k] });
                }
            }
        }
    }
}

/// Checks Jo1–Jo3 for `(s, <lex, |∧|)`, the antichain property and the coded bit condition.
pub fn validate_coded_joyce_order(s: &[BitString]) -> CodedReport {
    let v = sorted_lex(s);
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i].comparable(&v[j]) {
                out.push(Violation { axiom: Axiom::Antichain, witness: vec![i, j] });
            }
        }
    }
    check_axioms(v.len(), |a, b| v[a].meet_len(&v[b]) as u64, None, &mut out);
    coded_condition(&v, true, &mut out);
    CodedReport { valid: out.is_empty(), strings: v, violations: out }
}

/// `a E⋈ b`: the longer string has a 1 at the shorter one's length.
pub fn epn(a: &BitString, b: &BitString) -> Result<bool> {
    match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Equal => precondition("E⋈ is only defined on strings of different length"),
        std::cmp::Ordering::Greater => Ok(a.bit(b.len()) == 1),
        std::cmp::Ordering::Less => Ok(b.bit(a.len()) == 1),
    }
}

fn epn_or_false(a: &BitString, b: &BitString) -> bool {
    epn(a, b).unwrap_or(false)
}

/// Checks distinct lengths, Jo1–Jo4 for `(s, E⋈, <lex, |∧|)` and the coded condition for σ ≠ τ.
pub fn validate_coded_joyce_graph(s: &[BitString]) -> CodedReport {
    let v = sorted_lex(s);
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i].len() == v[j].len() {
                out.push(Violation { axiom: Axiom::Lengths, witness: vec![i, j] });
            }
        }
    }
    let e = |a: usize, b: usize| a != b && epn_or_false(&v[a], &v[b]);
    check_axioms(v.len(), |a, b| v[a].meet_len(&v[b]) as u64, Some(&e), &mut out);
    coded_condition(&v, false, &mut out);
    CodedReport { valid: out.is_empty(), strings: v, violations: out }
}

/// Edges of a set of strings under E⋈, in lexicographic order of the strings.
pub fn coded_graph_table(s: &[BitString]) -> Result<(Vec<BitString>, JoyceGraphTable)> {
    let (v, order) = table_of_coded(s)?;
    let edges = (0..v.len()).map(|i| (0..v.len()).map(|j| i != j && epn_or_false(&v[i], &v[j])).collect()).collect();
    let g = JoyceGraphTable::new(order, edges)?;
    Ok((v, g))
}

/// σ_x of length ⟨x,x⟩ with a 1 exactly at labels ⟨y,x⟩ for y < x (labels reranked first).
pub fn encode_coded_order(t: &JoyceOrderTable) -> Result<Vec<BitString>> {
    if let Some(v) = validate_joyce_order(t).first() {
        return Err(Error::Invalid(format!("not a Joyce order: {:?} at {:?}", v.axiom, v.witness)));
    }
    let t = t.reranked();
    Ok((0..t.len())
        .map(|x| {
            let mut s = BitString::zeros(t.label(x, x) as usize);
            for y in 0..x {
                let j = t.label(y, x) as usize;
                if j < s.len() {
                    s.set(j, 1);
                }
            }
            s
        })
        .collect())
}

/// σ_x of length ⟨x,x⟩: at j = ⟨x,y⟩ a 1 iff y < x, at j = ⟨y,y⟩ a 1 iff xEy, else 0.
pub fn encode_coded_graph(g: &JoyceGraphTable) -> Result<Vec<BitString>> {
    if let Some(v) = validate_joyce_graph(g).first() {
        return Err(Error::Invalid(format!("not a Joyce graph: {:?} at {:?}", v.axiom, v.witness)));
    }
    let t = g.order.reranked();
    let n = t.len();
    Ok((0..n)
        .map(|x| {
            let mut s = BitString::zeros(t.label(x, x) as usize);
            for y in 0..n {
                let j = t.label(x, y) as usize;
                if y != x && j < s.len() && y < x {
                    s.set(j, 1);
                }
                let jy = t.label(y, y) as usize;
                if y != x && jy < s.len() && g.edges[x][y] {
                    s.set(jy, 1);
                }
            }
            s
        })
        .collect())
}

/// Membership in `(000 ∪ 100)*01`.
pub fn in_dlo_language(s: &BitString) -> bool {
    let l = s.len();
    if l < 2 || l % 3 != 2 {
        return false;
    }
    let k = l / 3;
    (0..k).all(|j| s.bit(3 * j + 1) == 0 && s.bit(3 * j + 2) == 0) && s.bit(3 * k) == 0 && s.bit(3 * k + 1) == 1
}

/// All members of `(000 ∪ 100)*01` of length ≤ `max_len`, in lexicographic order.
pub fn dlo_prefix(max_len: usize) -> Result<Vec<BitString>> {
    if max_len < 2 {
        return precondition("the shortest DLO word has length 2");
    }
    let k_max = (max_len - 2) / 3;
    let mut out: Vec<BitString> = (0..=k_max).flat_map(|k| BitString::all_of_len(k).map(|w| hat_encode(&w))).collect();
    out.sort_by(|a, b| a.cmp_lex(b));
    Ok(out)
}

/// The DLO prefix with labels `v(σ ∧ τ)`, `v` the length-then-lex rank.
pub fn dlo_joyce_order(max_len: usize) -> Result<(Vec<BitString>, JoyceOrderTable)> {
    let v = dlo_prefix(max_len)?;
    let t = JoyceOrderTable::from_fn(v.len(), |i, j| meet(&v[i], &v[j]).llex_rank() as u64)?;
    Ok((v, t))
}

/// σ̂ of length 3|σ|+2: σ̂(3j) = σ(j), zeros at 3j+1 and 3j+2, tail `01`.
pub fn hat_encode(s: &BitString) -> BitString {
    let mut out = BitString::zeros(3 * s.len() + 2);
    for (j, b) in s.bits().enumerate() {
        out.set(3 * j, b);
    }
    out.set(3 * s.len() + 1, 1);
    out
}

/// τ(3n) = τ(3n+1) = τ(3n+2) = σ(n), tail `01`.
pub fn graph_triple_encode(s: &BitString) -> BitString {
    let mut out = BitString::zeros(3 * s.len() + 2);
    for (j, b) in s.bits().enumerate() {
        for k in 0..3 {
            out.set(3 * j + k, b);
        }
    }
    out.set(3 * s.len() + 1, 1);
    out
}

/// The first triple-encoded string of a fresh length ≤ `search_len` that is E⋈-linked to all of
/// `f1` and none of `f0`.
pub fn rado_extend(
    vertices: &[BitString],
    f0: &[BitString],
    f1: &[BitString],
    search_len: usize,
) -> Result<Option<BitString>> {
    if f0.iter().any(|a| f1.contains(a)) {
        return precondition("f0 and f1 overlap");
    }
    if f0.iter().chain(f1).any(|a| !vertices.contains(a)) {
        return precondition("f0 and f1 must be vertices");
    }
    let lens: BTreeSet<usize> = vertices.iter().map(BitString::len).collect();
    if lens.len() != vertices.len() {
        return precondition("vertex lengths must be pairwise distinct");
    }
    if search_len < 2 {
        return Ok(None);
    }
    for k in 0..=(search_len - 2) / 3 {
        if lens.contains(&(3 * k + 2)) {
            continue;
        }
        for w in BitString::all_of_len(k) {
            let c = graph_triple_encode(&w);
            if f1.iter().all(|v| epn_or_false(&c, v)) && f0.iter().all(|v| !epn_or_false(&c, v)) {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Subsets of `e` that are coded Joyce orders whose Joyce tree is `shape`.
pub fn coded_copies(e: &[BitString], shape: &JoyceTree) -> Vec<Vec<BitString>> {
    let n = shape.leaves();
    let v = sorted_lex(e);
    let mut out = Vec::new();
    if n > v.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let h: Vec<BitString> = idx.iter().map(|&i| v[i].clone()).collect();
        if validate_coded_joyce_order(&h).valid {
            let (_, t) = table_of_coded(&h).expect("non-empty");
            if joyce_tree_of(&t).ok().as_ref() == Some(shape) {
                out.push(h);
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < v.len() - (n - k) {
                idx[k] += 1;
                for j in k + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
