//! The widget height recursion `fwidg = ℓ + Ĥ` with a pluggable `fhl` backend.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::fhl::min_fhl_with;
use super::DEFAULT_BUDGET;
use crate::error::{precondition, Error, Result};

/// A count that may be too large to write out: `base^(2^exp2)` when symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Count {
    Exact(BigUint),
    Tower { base: u64, exp2: BigUint },
}

/// Largest `base^(2^e)` written out exactly, in bits.
const EXACT_BITS: u64 = 1 << 16;

impl Count {
    /// `k^(2^e)`.
    pub fn power_of_power(k: u64, e: &BigUint) -> Self {
        if k <= 1 {
            return Count::Exact(BigUint::from(k));
        }
        let bits_per = 64 - u64::from(k.leading_zeros());
        match e.to_u32() {
            Some(e32) if e32 < 64 && (1u64 << e32).saturating_mul(bits_per) <= EXACT_BITS => {
                Count::Exact(BigUint::from(k).pow(1u32 << e32))
            }
            _ => Count::Tower { base: k, exp2: e.clone() },
        }
    }

    /// The value if it fits in a `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Count::Exact(v) => v.to_u64(),
            Count::Tower { .. } => None,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(v) => write!(f, "{v}"),
            Count::Tower { base, exp2 } => write!(f, "{base}^(2^{exp2})"),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub type LevelBound = Arc<dyn Fn(usize) -> usize + Send + Sync>;
pub type CustomFhl = Arc<dyn Fn(usize, &Count, &BigUint, &dyn Fn(usize) -> usize) -> Result<usize> + Send + Sync>;

/// Source of `fhl(N, K, D, B)` values.
#[derive(Clone)]
pub enum FhlBackend {
    /// [`min_fhl_with`], refusing `K > 2^64`.
    Exhaustive {
        cap: usize,
        budget: u64,
    },
    Constant(usize),
    /// Keyed by `(N, K, D)` rendered as decimal strings.
    Table(BTreeMap<(usize, String, String), usize>),
    Custom(CustomFhl),
}

impl fmt::Debug for FhlBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FhlBackend::Exhaustive { cap, budget } => {
                write!(f, "Exhaustive {{ cap: {cap}, budget: {budget} }}")
            }
            FhlBackend::Constant(h) => write!(f, "Constant({h})"),
            FhlBackend::Table(t) => write!(f, "Table({} entries)", t.len()),
            FhlBackend::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Default for FhlBackend {
    fn default() -> Self {
        FhlBackend::Exhaustive { cap: 6, budget: DEFAULT_BUDGET }
    }
}

impl FhlBackend {
    fn eval(&self, n: usize, k: &Count, d: &BigUint, b: &dyn Fn(usize) -> usize) -> Result<usize> {
        match self {
            FhlBackend::Constant(h) => Ok(*h),
            FhlBackend::Table(t) => t
                .get(&(n, k.to_string(), d.to_string()))
                .copied()
                .ok_or_else(|| Error::Precondition(format!("fhl table has no entry for ({n}, {k}, {d})"))),
            FhlBackend::Custom(f) => f(n, k, d, b),
            FhlBackend::Exhaustive { cap, budget } => {
                let kk = k.to_u64().ok_or_else(|| Error::KTooLarge(k.to_string()))?;
                let dd = d.to_usize().ok_or_else(|| Error::Precondition(format!("arity {d} is too large")))?;
                Ok(min_fhl_with(n, kk, dd, b, *cap, *budget)?.h)
            }
        }
    }
}

#[derive(Clone)]
pub struct WidgetParams {
    /// Number of new levels `N`.
    pub new_levels: usize,
    pub ell: usize,
    pub n: usize,
    pub k: u64,
    pub d: usize,
    pub b: LevelBound,
    pub backend: FhlBackend,
}

impl fmt::Debug for WidgetParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WidgetParams")
            .field("new_levels", &self.new_levels)
            .field("ell", &self.ell)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("d", &self.d)
            .field("backend", &self.backend)
            .finish_non_exhaustive()
    }
}

impl WidgetParams {
    /// `b ≡ 2` and the exhaustive backend.
    pub fn new(new_levels: usize, ell: usize, n: usize, k: u64, d: usize) -> Self {
        Self { new_levels, ell, n, k, d, b: Arc::new(|_| 2), backend: FhlBackend::default() }
    }

    pub fn with_backend(mut self, backend: FhlBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_bound(mut self, b: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        self.b = Arc::new(b);
        self
    }
}

/// One unfolding: `H_N = H_{N−1} + fhl(2, K, D, B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WidgetStep {
    pub step: usize,
    pub h_prev: usize,
    pub k_count: Count,
    #[serde(serialize_with = "decimal")]
    pub d_count: BigUint,
    pub fhl: usize,
    pub h: usize,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn prod(b: &dyn Fn(usize) -> usize, range: std::ops::Range<usize>) -> BigUint {
    range.map(|i| BigUint::from(b(i))).fold(BigUint::one(), |a, x| a * x)
}

/// Exponent of 2 in the domain size of `K`: `d` times the nodes of a full `b`-bounded tree
/// below level `L` plus those at level `L`.
fn k_exponent(d: usize, b: &dyn Fn(usize) -> usize, level: usize) -> BigUint {
    let mut below = BigUint::zero();
    for j in 0..level {
        below += prod(b, 0..j);
    }
    BigUint::from(d) * (below + prod(b, 0..level))
}

/// Every step of the recursion up to `N`.
pub fn widget_trace(p: &WidgetParams) -> Result<Vec<WidgetStep>> {
    if p.n == 0 || p.d == 0 || p.k == 0 {
        return precondition("widget parameters n, k, d must be positive");
    }
    let b = p.b.clone();
    let mut h = 0usize;
    let mut out = Vec::new();
    for step in 1..=p.new_levels {
        let level = p.ell + h;
        let k_count = Count::power_of_power(p.k, &k_exponent(p.d, &*b, level));
        let d_count = BigUint::from(p.d) * prod(&*b, 0..p.ell) * prod(&|i| b(p.ell + i), 0..h);
        let shift = h;
        let bb = b.clone();
        let shifted = move |x: usize| bb(x + shift);
        let fhl = p.backend.eval(2, &k_count, &d_count, &shifted)?;
        let next = h.checked_add(fhl).ok_or_else(|| Error::Precondition("widget height overflows".into()))?;
        out.push(WidgetStep { step, h_prev: h, k_count, d_count, fhl, h: next });
        h = next;
    }
    Ok(out)
}

/// `fwidg(N, ℓ, n, k, d, b) = ℓ + Ĥ(N, ℓ, n, k, d, b)`.
pub fn widget_bound(p: &WidgetParams) -> Result<usize> {
    let h = widget_trace(p)?.last().map_or(0, |s| s.h);
    p.ell.checked_add(h).ok_or_else(|| Error::Precondition("widget height overflows".into()))
}
