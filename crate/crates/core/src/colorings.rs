//! Lower-bound colorings of tuples of binary words, and color censuses.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::strings::{cmp_q, BitString};
use crate::types::signature::SigKind;
use crate::types::{catalog, tuple_signature};

/// A color: an integer or a pair of colors from a product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Color {
    Atom(u64),
    Pair(Box<Color>, Box<Color>),
}

impl Color {
    pub fn pair(a: Color, b: Color) -> Self {
        Color::Pair(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Atom(c) => write!(f, "{c}"),
            Color::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// A coloring of tuples of words.
pub trait Coloring: Send + Sync {
    /// Tuple size, or `None` when any size is accepted.
    fn arity(&self) -> Option<usize>;
    fn name(&self) -> String;
    fn color(&self, tuple: &[BitString]) -> Result<Color>;
}

fn distinct_pair(tuple: &[BitString]) -> Result<(&BitString, &BitString)> {
    match tuple {
        [a, b] if a != b => Ok((a, b)),
        [_, _] => precondition("the two words must differ"),
        _ => precondition(format!("expected a pair, got {} words", tuple.len())),
    }
}

/// The pair ordered by <_Q.
fn q_sorted<'a>(a: &'a BitString, b: &'a BitString) -> (&'a BitString, &'a BitString) {
    if cmp_q(a, b) == Ordering::Less {
        (a, b)
    } else {
        (b, a)
    }
}

/// 1 iff the <_Q-smaller word is strictly shorter.
pub fn f_lt_q(a: &BitString, b: &BitString) -> Result<u8> {
    distinct_pair(&[a.clone(), b.clone()])?;
    let (lo, hi) = q_sorted(a, b);
    Ok(u8::from(lo.len() < hi.len()))
}

/// A rank function on words, injective on every finite set it is asked about.
#[derive(Clone, Default)]
pub enum EnumOrder {
    /// Length first, then lex; ε has rank 0.
    #[default]
    LengthLex,
    Table(BTreeMap<BitString, u128>),
    Custom(Arc<dyn Fn(&BitString) -> u128 + Send + Sync>),
}

impl fmt::Debug for EnumOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumOrder::LengthLex => f.write_str("LengthLex"),
            EnumOrder::Table(t) => write!(f, "Table({} entries)", t.len()),
            EnumOrder::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl EnumOrder {
    pub fn table(t: BTreeMap<BitString, u128>) -> Result<Self> {
        if t.values().collect::<BTreeSet<_>>().len() != t.len() {
            return precondition("enumeration ranks must be distinct");
        }
        Ok(EnumOrder::Table(t))
    }

    pub fn rank(&self, w: &BitString) -> Result<u128> {
        match self {
            EnumOrder::LengthLex => Ok(w.llex_rank()),
            EnumOrder::Table(t) => t.get(w).copied().ok_or_else(|| Error::Precondition(format!("{w} has no rank"))),
            EnumOrder::Custom(f) => Ok(f(w)),
        }
    }
}

/// 0 iff the enumeration order agrees with <_Q on the pair.
pub fn devlin_f0(a: &BitString, b: &BitString, e: &EnumOrder) -> Result<u8> {
    distinct_pair(&[a.clone(), b.clone()])?;
    let (lo, hi) = q_sorted(a, b);
    let (rl, rh) = (e.rank(lo)?, e.rank(hi)?);
    if rl == rh {
        return precondition(format!("{lo} and {hi} share rank {rl}"));
    }
    Ok(u8::from(rl > rh))
}

/// One element of a synthetic enumeration: it is in `K_s` iff `enters_at ≤ s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub element: u64,
    pub enters_at: u64,
}

/// Stagewise approximation `K_s` of a set; each listed element stabilizes at its entry stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<OracleEntry>", into = "Vec<OracleEntry>")]
pub struct ApproxOracle {
    enters: BTreeMap<u64, u64>,
}

impl TryFrom<Vec<OracleEntry>> for ApproxOracle {
    type Error = Error;

    fn try_from(v: Vec<OracleEntry>) -> Result<Self> {
        let mut enters = BTreeMap::new();
        for e in v {
            if enters.insert(e.element, e.enters_at).is_some() {
                return precondition(format!("element {} is listed twice", e.element));
            }
        }
        Ok(Self { enters })
    }
}

impl From<ApproxOracle> for Vec<OracleEntry> {
    fn from(o: ApproxOracle) -> Self {
        o.enters.into_iter().map(|(element, enters_at)| OracleEntry { element, enters_at }).collect()
    }
}

impl ApproxOracle {
    pub fn new(entries: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        entries
            .into_iter()
            .map(|(element, enters_at)| OracleEntry { element, enters_at })
            .collect::<Vec<_>>()
            .try_into()
    }

    pub fn contains_at(&self, element: u64, stage: u64) -> bool {
        self.enters.get(&element).is_some_and(|&s| s <= stage)
    }

    /// Stage after which `element` never changes.
    pub fn stabilization(&self, element: u64) -> u64 {
        self.enters.get(&element).copied().unwrap_or(0)
    }

    fn restriction_eq(&self, x: u64, y: u64, z: u64) -> bool {
        self.enters.range(..x).all(|(&e, _)| self.contains_at(e, y) == self.contains_at(e, z))
    }
}

/// 1 iff `K_y ↾ x = K_z ↾ x`.
pub fn jockusch_fj(x: u64, y: u64, z: u64, o: &ApproxOracle) -> Result<u8> {
    if !(x < y && y < z) {
        return precondition(format!("need x < y < z, got ({x}, {y}, {z})"));
    }
    Ok(u8::from(o.restriction_eq(x, y, z)))
}

/// `f_J(|σ∧τ|, |σ|, |τ|)` with the shorter word first.
pub fn jockusch_fj_pair(a: &BitString, b: &BitString, o: &ApproxOracle) -> Result<u8> {
    let (s, t) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    jockusch_fj(s.meet_len(t) as u64, s.len() as u64, t.len() as u64, o)
}

pub struct FLtQ;

impl Coloring for FLtQ {
    fn arity(&self) -> Option<usize> {
        Some(2)
    }
    fn name(&self) -> String {
        "f-lt-q".into()
    }
    fn color(&self, t: &[BitString]) -> Result<Color> {
        let (a, b) = distinct_pair(t)?;
        Ok(Color::Atom(f_lt_q(a, b)?.into()))
    }
}

#[derive(Debug, Default)]
pub struct DevlinF0(pub EnumOrder);

impl Coloring for DevlinF0 {
    fn arity(&self) -> Option<usize> {
        Some(2)
    }
    fn name(&self) -> String {
        "devlin-f0".into()
    }
    fn color(&self, t: &[BitString]) -> Result<Color> {
        let (a, b) = distinct_pair(t)?;
        Ok(Color::Atom(devlin_f0(a, b, &self.0)?.into()))
    }
}

#[derive(Debug)]
pub struct Jockusch(pub ApproxOracle);

impl Coloring for Jockusch {
    fn arity(&self) -> Option<usize> {
        Some(2)
    }
    fn name(&self) -> String {
        "jockusch".into()
    }
    fn color(&self, t: &[BitString]) -> Result<Color> {
        let (a, b) = distinct_pair(t)?;
        Ok(Color::Atom(jockusch_fj_pair(a, b, &self.0)?.into()))
    }
}

#[derive(Debug)]
pub struct Constant(pub u64);

impl Coloring for Constant {
    fn arity(&self) -> Option<usize> {
        None
    }
    fn name(&self) -> String {
        format!("constant:{}", self.0)
    }
    fn color(&self, _: &[BitString]) -> Result<Color> {
        Ok(Color::Atom(self.0))
    }
}

/// Colors an `n`-set of words by the index of its tuple type in the sorted catalog.
#[derive(Clone, Debug)]
pub struct TupleTypeColoring {
    n: usize,
    types: Vec<String>,
}

pub fn tuple_type_coloring(n: usize) -> Result<TupleTypeColoring> {
    if n == 0 || n > 4 {
        return precondition("tuple-type colorings are built for 1 ≤ n ≤ 4");
    }
    let types = catalog(n, SigKind::Tuple).into_iter().map(|e| e.signature).collect();
    Ok(TupleTypeColoring { n, types })
}

impl TupleTypeColoring {
    /// Number of colors.
    pub fn range(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }
}

impl Coloring for TupleTypeColoring {
    fn arity(&self) -> Option<usize> {
        Some(self.n)
    }
    fn name(&self) -> String {
        format!("tuple-type:{}", self.n)
    }
    fn color(&self, t: &[BitString]) -> Result<Color> {
        if t.len() != self.n {
            return precondition(format!("expected {} words, got {}", self.n, t.len()));
        }
        let mut sorted = t.to_vec();
        sorted.sort_by(|a, b| a.cmp_lex(b));
        let sig = tuple_signature(&sorted)?.body;
        let i = self.types.binary_search(&sig).map_err(|_| Error::Invalid(format!("type {sig} is not catalogued")))?;
        Ok(Color::Atom(i as u64))
    }
}

/// Componentwise pairing of two colorings.
pub struct Product(Arc<dyn Coloring>, Arc<dyn Coloring>);

pub fn product(a: Arc<dyn Coloring>, b: Arc<dyn Coloring>) -> Result<Product> {
    if let (Some(x), Some(y)) = (a.arity(), b.arity()) {
        if x != y {
            return precondition(format!("cannot pair colorings of {x}-tuples and {y}-tuples"));
        }
    }
    Ok(Product(a, b))
}

impl Coloring for Product {
    fn arity(&self) -> Option<usize> {
        self.0.arity().or(self.1.arity())
    }
    fn name(&self) -> String {
        format!("product({},{})", self.0.name(), self.1.name())
    }
    fn color(&self, t: &[BitString]) -> Result<Color> {
        Ok(Color::pair(self.0.color(t)?, self.1.color(t)?))
    }
}

/// Every color `c` takes on `family`.
pub fn colors_used(c: &dyn Coloring, family: &[Vec<BitString>]) -> Result<BTreeSet<Color>> {
    let colors: Vec<Color> = family.par_iter().map(|t| c.color(t)).collect::<Result<_>>()?;
    Ok(colors.into_iter().collect())
}

/// All `n`-subsets of `words` (deduplicated, length-then-lex), each listed in that order.
pub fn subsets(words: &[BitString], n: usize) -> Vec<Vec<BitString>> {
    fn rec(w: &[BitString], n: usize, start: usize, cur: &mut Vec<BitString>, out: &mut Vec<Vec<BitString>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..w.len() {
            cur.push(w[i].clone());
            rec(w, n, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut w = words.to_vec();
    w.sort();
    w.dedup();
    let mut out = Vec::new();
    rec(&w, n, 0, &mut Vec::new(), &mut out);
    out
}

/// Bounded stand-in for being dense in itself under <_Q: only words of the maximal length
/// may be <_Q-endpoints of the set, and some word is shorter.
pub fn dense_in_itself_below(set: &[BitString], max_len: usize) -> bool {
    if set.iter().any(|w| w.len() > max_len) || set.iter().all(|w| w.len() == max_len) {
        return false;
    }
    set.iter().filter(|w| w.len() < max_len).all(|w| {
        set.iter().any(|v| cmp_q(v, w) == Ordering::Less) && set.iter().any(|v| cmp_q(v, w) == Ordering::Greater)
    })
}

/// A coloring given on the command line or in a config file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringSpec {
    FLtQ,
    DevlinF0,
    TupleType(usize),
    Jockusch(String),
    Constant(u64),
    Product(Box<ColoringSpec>, Box<ColoringSpec>),
}

impl ColoringSpec {
    /// Parses `f-lt-q`, `devlin-f0`, `tuple-type:N`, `jockusch:PATH`, `constant:C`, `product(A,B)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
            let mut depth = 0usize;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    ',' if depth == 0 => {
                        return Ok(ColoringSpec::Product(
                            Box::new(Self::parse(&inner[..i])?),
                            Box::new(Self::parse(&inner[i + 1..])?),
                        ));
                    }
                    _ => {}
                }
            }
            return Err(Error::Parse(format!("product needs two arguments: {s}")));
        }
        let bad = |_| Error::Parse(format!("bad coloring spec: {s}"));
        match s.split_once(':') {
            None if s == "f-lt-q" => Ok(ColoringSpec::FLtQ),
            None if s == "devlin-f0" => Ok(ColoringSpec::DevlinF0),
            Some(("tuple-type", n)) => Ok(ColoringSpec::TupleType(n.parse().map_err(bad)?)),
            Some(("constant", c)) => Ok(ColoringSpec::Constant(c.parse().map_err(bad)?)),
            Some(("jockusch", path)) if !path.is_empty() => Ok(ColoringSpec::Jockusch(path.into())),
            _ => Err(Error::Parse(format!("unknown coloring spec: {s}"))),
        }
    }

    /// Builds the coloring; `read` loads oracle files.
    pub fn build(&self, read: &dyn Fn(&str) -> Result<String>) -> Result<Arc<dyn Coloring>> {
        Ok(match self {
            ColoringSpec::FLtQ => Arc::new(FLtQ),
            ColoringSpec::DevlinF0 => Arc::new(DevlinF0::default()),
            ColoringSpec::TupleType(n) => Arc::new(tuple_type_coloring(*n)?),
            ColoringSpec::Constant(c) => Arc::new(Constant(*c)),
            ColoringSpec::Jockusch(path) => {
                let o: ApproxOracle =
                    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
                Arc::new(Jockusch(o))
            }
            ColoringSpec::Product(a, b) => Arc::new(product(a.build(read)?, b.build(read)?)?),
        })
    }
}
