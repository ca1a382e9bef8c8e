//! Closures, embedding/tuple/weak-tuple types and their counts.

pub mod census;
pub mod closure;
pub mod minimizer;
pub mod recurrence;
pub mod signature;

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strings::BitString;
use census::{brute_bound, brute_census, census, strip_stars, weak_types_by_shape, Census};
use minimizer::{minimizer_index_words, Scaffold};
use signature::{SigKind, SigTree, TypeSignature};

pub use closure::{full_closure, level_closure, meet_closure, ClosedTree};
pub use minimizer::{minimizer_tree, validate_minimizer, MinimizerReport, MinimizerTree};
pub use recurrence::{embedding_shapes_of_height, embedding_types_of_height};
pub use signature::{canonicalize, embedding_signature, signature_of, tuple_signature, weak_signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TypeKind {
    EmbAll,
    TupAll,
    EmbMin,
    TupMin,
}

impl TypeKind {
    pub const ALL: [TypeKind; 4] = [TypeKind::EmbAll, TypeKind::TupAll, TypeKind::EmbMin, TypeKind::TupMin];

    pub fn column(self) -> &'static str {
        match self {
            TypeKind::EmbAll => "e_sTT",
            TypeKind::TupAll => "t_sTT",
            TypeKind::EmbMin => "e_TT",
            TypeKind::TupMin => "t_TT",
        }
    }

    fn is_min(self) -> bool {
        matches!(self, TypeKind::EmbMin | TypeKind::TupMin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Brute,
    Predicate,
    Minimizer,
}

/// Which set must have pairwise distinct lengths for a type to count as length-injective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LengthInjectivity {
    /// The tuple members.
    #[default]
    Members,
    /// The meet closure of the tuple.
    MeetClosure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakFlags {
    /// Pairwise distinct lengths across the meet closure.
    pub length_injective: bool,
    /// Pairwise distinct lengths across the members.
    pub member_length_injective: bool,
    /// No member is the meet of two incomparable members.
    pub meet_avoiding: bool,
}

impl WeakFlags {
    pub fn passes(&self, li: LengthInjectivity) -> bool {
        self.meet_avoiding
            && match li {
                LengthInjectivity::Members => self.member_length_injective,
                LengthInjectivity::MeetClosure => self.length_injective,
            }
    }
}

fn flags_of_tree(t: &SigTree) -> WeakFlags {
    let depth = t.depths();
    let mut marked = vec![0usize; t.nodes.len() + 1];
    let mut starred = vec![0usize; t.nodes.len() + 1];
    let mut meet_avoiding = true;
    for (i, node) in t.nodes.iter().enumerate() {
        let branching = node.degree() == 2;
        if node.star || branching {
            marked[depth[i]] += 1;
        }
        if node.star {
            starred[depth[i]] += 1;
            meet_avoiding &= !branching;
        }
    }
    WeakFlags {
        length_injective: marked.iter().all(|&c| c <= 1),
        member_length_injective: starred.iter().all(|&c| c <= 1),
        meet_avoiding,
    }
}

/// Length-injectivity and meet-avoidance of a tuple or weak tuple type.
pub fn classify_weak_type(t: &TypeSignature) -> Result<WeakFlags> {
    if t.kind == SigKind::Embedding {
        return Err(Error::Precondition("classification needs a TUPLE or WEAK_TUPLE signature".into()));
    }
    Ok(flags_of_tree(&SigTree::parse(&t.body)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCount {
    pub n: usize,
    pub kind: TypeKind,
    pub method: Method,
    pub count: u64,
    pub elapsed_ms: u64,
}

/// Options beyond the defaults of [`count_types`].
#[derive(Clone, Copy, Debug, Default)]
pub struct CountOptions {
    pub length_injectivity: LengthInjectivity,
    /// Overrides the MINIMIZER depth (levels of the minimizing tree).
    pub minimizer_depth: Option<usize>,
}

/// MINIMIZER depth for size-`n` tuples.
pub fn minimizer_depth(n: usize) -> usize {
    (2 * n).saturating_sub(1).max(1)
}

pub fn count_types(n: usize, kind: TypeKind, method: Method) -> Result<TypeCount> {
    count_types_with(n, kind, method, CountOptions::default())
}

pub fn count_types_with(n: usize, kind: TypeKind, method: Method, opts: CountOptions) -> Result<TypeCount> {
    let start = Instant::now();
    let count = match (method, kind.is_min()) {
        (Method::Brute, false) => {
            let (_, c) = brute_census(n, brute_bound(n));
            if kind == TypeKind::EmbAll {
                c.embedding_signatures().len()
            } else {
                c.types.len()
            }
        }
        (Method::Predicate, true) => {
            let weak = predicate_types(n, opts.length_injectivity);
            if kind == TypeKind::EmbMin {
                weak.iter().map(|s| strip_stars(s)).collect::<BTreeSet<_>>().len()
            } else {
                weak.len()
            }
        }
        (Method::Minimizer, true) => {
            let c = minimizer_census(n, opts.minimizer_depth.unwrap_or(minimizer_depth(n)))?;
            if kind == TypeKind::EmbMin {
                c.embedding_signatures().len()
            } else {
                c.types.len()
            }
        }
        _ => {
            return Err(Error::Precondition(format!("method {method:?} does not apply to {}", kind.column())));
        }
    };
    Ok(TypeCount { n, kind, method, count: count as u64, elapsed_ms: start.elapsed().as_millis() as u64 })
}

/// Weak tuple types of size `n` that are length-injective and meet-avoiding.
pub fn predicate_types(n: usize, li: LengthInjectivity) -> BTreeSet<String> {
    weak_types_by_shape(n)
        .into_iter()
        .filter(|s| SigTree::parse(s).map(|t| flags_of_tree(&t).passes(li)).unwrap_or(false))
        .collect()
}

/// Tuple types of `n`-subsets of the first `depth` levels of the minimizing tree.
pub fn minimizer_census(n: usize, depth: usize) -> Result<Census> {
    if depth == 0 || depth > 12 {
        return Err(Error::Precondition("minimizer depth must lie in 1..=12".into()));
    }
    let scaffold = Scaffold::new(2 * depth - 1);
    Ok(census(&scaffold, &minimizer_index_words(depth), n))
}

/// One row of the count table, all columns from one census each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub e_stt: u64,
    pub t_stt: u64,
    pub e_tt: u64,
    pub t_tt: u64,
}

pub fn table_row(n: usize, li: LengthInjectivity) -> TableRow {
    let (_, c) = brute_census(n, brute_bound(n));
    let weak = predicate_types(n, li);
    TableRow {
        n,
        e_stt: c.embedding_signatures().len() as u64,
        t_stt: c.types.len() as u64,
        e_tt: weak.iter().map(|s| strip_stars(s)).collect::<BTreeSet<_>>().len() as u64,
        t_tt: weak.len() as u64,
    }
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("n,e_sTT,t_sTT,e_TT,t_TT\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", r.n, r.e_stt, r.t_stt, r.e_tt, r.t_tt));
    }
    s
}

/// A catalog line: one type with a tuple realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub kind: SigKind,
    pub signature: String,
    pub representative: Vec<BitString>,
}

/// All types of size `n` of the given kind, with the least tuple realizing each.
pub fn catalog(n: usize, kind: SigKind) -> Vec<CatalogEntry> {
    let (words, c) = brute_census(n, brute_bound(n));
    let mut out: std::collections::BTreeMap<String, &Vec<u32>> = std::collections::BTreeMap::new();
    for (sig, e) in &c.types {
        let key = match kind {
            SigKind::Embedding => strip_stars(sig),
            SigKind::Tuple => sig.clone(),
            SigKind::WeakTuple => e.weak.clone(),
        };
        let slot = out.entry(key).or_insert(&e.rep);
        if e.rep < **slot {
            *slot = &e.rep;
        }
    }
    out.into_iter()
        .map(|(signature, rep)| CatalogEntry {
            kind,
            signature,
            representative: rep.iter().map(|&i| words[i as usize].to_bitstring()).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bs;

    fn flags(v: &[&str]) -> WeakFlags {
        let t: Vec<BitString> = v.iter().map(|s| bs(s)).collect();
        classify_weak_type(&weak_signature(&t).unwrap()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let f = flags(&["0", "1"]);
        assert!(!f.length_injective && f.meet_avoiding);
        let f = flags(&["0", "01"]);
        assert!(f.length_injective && f.meet_avoiding);
        assert!(!flags(&["0", "1", "e"]).meet_avoiding);
        assert!(classify_weak_type(&embedding_signature(&[bs("0")]).unwrap()).is_err());
    }

    #[test]
    fn small_table_rows() {
        let rows: Vec<TableRow> = (0..=3).map(|n| table_row(n, LengthInjectivity::Members)).collect();
        let got: Vec<[u64; 4]> = rows.iter().map(|r| [r.e_stt, r.t_stt, r.e_tt, r.t_tt]).collect();
        assert_eq!(got, vec![[1, 1, 1, 1], [1, 1, 1, 1], [7, 7, 3, 3], [345, 369, 27, 29]]);
        assert!(table_csv(&rows).starts_with("n,e_sTT,t_sTT,e_TT,t_TT\n0,1,1,1,1\n"));
    }

    #[test]
    fn method_kind_compatibility() {
        assert!(count_types(2, TypeKind::TupMin, Method::Brute).is_err());
        assert!(count_types(2, TypeKind::TupAll, Method::Predicate).is_err());
        assert_eq!(count_types(2, TypeKind::TupAll, Method::Brute).unwrap().count, 7);
        assert_eq!(count_types(2, TypeKind::TupMin, Method::Predicate).unwrap().count, 3);
        assert_eq!(count_types(0, TypeKind::EmbAll, Method::Brute).unwrap().count, 1);
    }

    #[test]
    fn minimizer_counts_follow_meet_closure_reading() {
        for n in 0..=3 {
            let m = minimizer_census(n, minimizer_depth(n)).unwrap();
            let p = predicate_types(n, LengthInjectivity::MeetClosure);
            let weak: BTreeSet<String> = m.weak_signatures();
            assert_eq!(weak, p, "n = {n}");
            assert_eq!(weak.len(), m.types.len());
        }
    }

    #[test]
    fn catalog_lists_every_type_once() {
        let c = catalog(2, SigKind::Tuple);
        assert_eq!(c.len(), 7);
        for e in &c {
            assert_eq!(tuple_signature(&e.representative).unwrap().body, e.signature);
        }
    }
}
