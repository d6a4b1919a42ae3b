//! Integers whose expansions avoid prescribed digits in several bases.
//!
//! Enumeration walks the digit tree of one base in increasing order: from any
//! starting point the next avoider is found by fixing the first bad digit and
//! filling the tail with the smallest allowed digit, so nothing outside the
//! set is visited.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansions::{avoids, avoids_u64, expand_nat, MissingDigitSpec};
use crate::numeric::{biguint_to_rational, Interval, IntervalUnion, Rational};

/// Smallest allowed digit `>= d`.
fn allowed_from(spec: &MissingDigitSpec, d: u64) -> Option<u64> {
    let b = spec.base();
    if d >= b {
        return None;
    }
    let missing = spec.missing();
    let mut c = d;
    let mut idx = missing.partition_point(|&m| m < c);
    while idx < missing.len() && missing[idx] == c {
        c += 1;
        idx += 1;
    }
    (c < b).then_some(c)
}

/// Most-significant-first digits of a positive integer.
fn msf_digits(n: &BigUint, base: u64) -> Vec<u64> {
    let mut d = expand_nat(n, base).expect("base checked by spec").digits().to_vec();
    d.reverse();
    d
}

fn eval_big(d: &[u64], base: u64) -> BigUint {
    let b = BigUint::from(base);
    d.iter().fold(BigUint::zero(), |acc, &x| acc * &b + BigUint::from(x))
}

/// `None` on overflow.
fn eval_u64(d: &[u64], base: u64) -> Option<u64> {
    d.iter().try_fold(0u64, |acc, &x| acc.checked_mul(base)?.checked_add(x))
}

/// Rewrites `d` (no leading zeros) into the smallest avoider `>=` it.
/// Returns false when no positive integer avoids the spec.
fn seek(d: &mut Vec<u64>, spec: &MissingDigitSpec) -> bool {
    let (Some(min_any), Some(min_lead)) = (allowed_from(spec, 0), allowed_from(spec, 1)) else {
        return false;
    };
    let Some(bad) = d.iter().position(|&x| !spec.is_allowed(x)) else {
        return true;
    };
    let mut pos = bad;
    loop {
        // Everything above `pos` is allowed; bump position `pos`.
        let from = if pos == bad { d[pos] } else { d[pos] + 1 };
        if let Some(a) = allowed_from(spec, from) {
            d[pos] = a;
            d[pos + 1..].iter_mut().for_each(|x| *x = min_any);
            return true;
        }
        if pos == 0 {
            let len = d.len() + 1;
            d.clear();
            d.push(min_lead);
            d.resize(len, min_any);
            return true;
        }
        pos -= 1;
    }
}

fn increment(d: &mut Vec<u64>, base: u64) {
    for x in d.iter_mut().rev() {
        if *x + 1 < base {
            *x += 1;
            return;
        }
        *x = 0;
    }
    d.insert(0, 1);
}

/// Digit vectors without leading zeros compare by length, then
/// lexicographically.
fn le_digits(a: &[u64], b: &[u64]) -> bool {
    a.len() < b.len() || (a.len() == b.len() && a <= b)
}

/// Ascending avoiders of one spec inside `[lo, hi]` (`hi = None` for no
/// upper end).
#[derive(Debug, Clone)]
pub struct AvoidingRange<'a> {
    spec: &'a MissingDigitSpec,
    cur: Option<Vec<u64>>,
    hi: Option<Vec<u64>>,
}

impl<'a> AvoidingRange<'a> {
    pub fn new(spec: &'a MissingDigitSpec, lo: &BigUint, hi: &BigUint) -> Result<Self> {
        Ok(Self::build(spec, lo, Some(hi)))
    }

    pub fn unbounded(spec: &'a MissingDigitSpec, lo: &BigUint) -> Self {
        Self::build(spec, lo, None)
    }

    fn build(spec: &'a MissingDigitSpec, lo: &BigUint, hi: Option<&BigUint>) -> Self {
        let lo = if lo.is_zero() { BigUint::one() } else { lo.clone() };
        let mut d = msf_digits(&lo, spec.base());
        let cur = seek(&mut d, spec).then_some(d);
        let mut r = AvoidingRange { spec, cur, hi: hi.map(|h| msf_digits(h, spec.base())) };
        r.check_hi();
        r
    }

    fn check_hi(&mut self) {
        if let (Some(c), Some(h)) = (&self.cur, &self.hi) {
            if h == &[0] || !le_digits(c, h) {
                self.cur = None;
            }
        }
    }

    fn advance(&mut self) {
        if let Some(d) = self.cur.as_mut() {
            increment(d, self.spec.base());
            if !seek(d, self.spec) {
                self.cur = None;
            }
        }
        self.check_hi();
    }

    /// Next avoider as a `u64`, or `None` once exhausted or beyond 64 bits.
    pub fn next_u64(&mut self) -> Option<u64> {
        let v = eval_u64(self.cur.as_ref()?, self.spec.base())?;
        self.advance();
        Some(v)
    }
}

impl Iterator for AvoidingRange<'_> {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        let v = eval_big(self.cur.as_ref()?, self.spec.base());
        self.advance();
        Some(v)
    }
}

/// All `1 <= n <= bound` avoiding `spec`, ascending.
pub fn generate_avoiding<'a>(spec: &'a MissingDigitSpec, bound: &BigUint) -> Result<AvoidingRange<'a>> {
    if bound.is_zero() {
        return Err(Error::InvalidArgument("bound must be at least 1".into()));
    }
    AvoidingRange::new(spec, &BigUint::one(), bound)
}

/// Integers with exactly `scale` digits in base `b` whose leading `depth`
/// digits are allowed, as a union of half-open integer blocks
/// `[P b^(scale-depth), (P+1) b^(scale-depth))` (stored closed; a block's right
/// end is never itself covered).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverNode {
    pub base: u64,
    pub scale: u32,
    pub depth: u32,
    pub cover: IntervalUnion,
}

impl CoverNode {
    pub fn contains_integer(&self, n: &BigUint) -> bool {
        let x = biguint_to_rational(n);
        let idx = self.cover.parts().partition_point(|p| p.hi() <= &x);
        self.cover.parts().get(idx).is_some_and(|p| p.lo() <= &x && &x < p.hi())
    }
}

const MAX_COVER_PARTS: u64 = 5_000_000;

pub fn interval_cover(spec: &MissingDigitSpec, scale: u32, depth: u32) -> Result<CoverNode> {
    if depth < 1 || scale < 1 {
        return Err(Error::InvalidArgument("scale and depth must be at least 1".into()));
    }
    let depth = depth.min(scale);
    let b = spec.base();
    let lead = spec.allowed_count() - u64::from(spec.is_allowed(0));
    let size = (lead as f64) * (spec.allowed_count() as f64).powi(depth as i32 - 1);
    if size > MAX_COVER_PARTS as f64 {
        return Err(Error::InvalidArgument(format!("cover would have {size:.0} blocks")));
    }
    let big_b = BigUint::from(b);
    let lo = big_b.pow(depth - 1);
    let hi = big_b.pow(depth) - 1u32;
    let block = biguint_to_rational(&big_b.pow(scale - depth));
    let parts = AvoidingRange::new(spec, &lo, &hi)?
        .map(|p| {
            let p = biguint_to_rational(&p);
            Interval::new(&p * &block, (p + Rational::one()) * &block).expect("ordered")
        })
        .collect();
    Ok(CoverNode { base: b, scale, depth, cover: IntervalUnion::new(parts) })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Enumerate the sparsest base and test the others digit by digit.
    Filter,
    /// Intersect digit covers of every base first, then filter inside the
    /// surviving blocks.
    CoverIntersection,
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchQuery {
    pub specs: Vec<MissingDigitSpec>,
    #[serde(serialize_with = "serialize_opt_big")]
    pub bound: Option<BigUint>,
    /// Stop after this many results.
    pub limit: Option<usize>,
    pub strategy: Strategy,
}

fn serialize_opt_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl SearchQuery {
    pub fn new(specs: Vec<MissingDigitSpec>, bound: Option<BigUint>, limit: Option<usize>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidArgument("at least one base is required".into()));
        }
        let mut bases: Vec<u64> = specs.iter().map(MissingDigitSpec::base).collect();
        bases.sort_unstable();
        if bases.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("each base may be listed once".into()));
        }
        if bound.is_none() && limit.is_none() {
            return Err(Error::InvalidArgument("a bound or a result limit is required".into()));
        }
        if bound.as_ref().is_some_and(Zero::is_zero) {
            return Err(Error::InvalidArgument("bound must be at least 1".into()));
        }
        Ok(SearchQuery { specs, bound, limit, strategy: Strategy::Auto })
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    fn sparsest(&self) -> &MissingDigitSpec {
        self.specs
            .iter()
            .min_by(|a, b| a.density_exponent().total_cmp(&b.density_exponent()).then(a.base().cmp(&b.base())))
            .expect("nonempty")
    }

    fn accepts(&self, n: &BigUint) -> bool {
        match n.to_u64() {
            Some(x) => self.specs.iter().all(|s| avoids_u64(x, s)),
            None => self.specs.iter().all(|s| avoids(n, s)),
        }
    }

    fn resolved_strategy(&self) -> Strategy {
        match self.strategy {
            Strategy::Auto => {
                let Some(bound) = &self.bound else { return Strategy::Filter };
                // Expected number of candidates from the sparsest base.
                let bits = bound.bits() as f64 * std::f64::consts::LN_2;
                let est = (self.sparsest().density_exponent() * bits).exp();
                if self.specs.len() > 1 && est > 1e6 {
                    Strategy::CoverIntersection
                } else {
                    Strategy::Filter
                }
            }
            s => s,
        }
    }
}

/// Half-open integer ranges `[lo, hi)` to scan, ascending and disjoint.
fn work_ranges(q: &SearchQuery, bound: &BigUint) -> Result<Vec<(BigUint, BigUint)>> {
    let top = bound + 1u32;
    match q.resolved_strategy() {
        Strategy::CoverIntersection => {
            let mut acc: Option<IntervalUnion> = None;
            for s in &q.specs {
                let u = bounded_cover(s, bound)?;
                acc = Some(match acc {
                    None => u,
                    Some(a) => a.intersect(&u),
                });
            }
            let acc = acc.expect("nonempty");
            Ok(acc
                .parts()
                .iter()
                .filter(|p| p.lo() < p.hi())
                .map(|p| {
                    let lo = p.lo().to_integer().to_biguint().expect("nonnegative");
                    let hi = p.hi().to_integer().to_biguint().expect("nonnegative");
                    (lo, hi.min(top.clone()))
                })
                .filter(|(lo, hi)| lo < hi)
                .collect())
        }
        _ => Ok(prefix_subtrees(q.sparsest(), bound)),
    }
}

/// Cover of the avoiders in `[1, bound]` by digit blocks whose depth keeps
/// each length below a few thousand blocks.
fn bounded_cover(spec: &MissingDigitSpec, bound: &BigUint) -> Result<IntervalUnion> {
    let len = msf_digits(bound, spec.base()).len() as u32;
    let per_level = (spec.allowed_count() as f64).max(2.0);
    let depth = ((4096f64).ln() / per_level.ln()).floor().max(1.0) as u32;
    let mut u = IntervalUnion::empty();
    for scale in 1..=len {
        u = u.union(&interval_cover(spec, scale, depth)?.cover);
    }
    let top = Interval::new(Rational::one(), biguint_to_rational(&(bound + 1u32))).expect("bound >= 1");
    Ok(u.restrict(&top))
}

/// Splits `[1, bound]` along digit prefixes of `spec` so that rayon has a
/// few hundred independent subtrees.
fn prefix_subtrees(spec: &MissingDigitSpec, bound: &BigUint) -> Vec<(BigUint, BigUint)> {
    let b = spec.base();
    let big_b = BigUint::from(b);
    let top = bound + 1u32;
    let len = msf_digits(bound, b).len() as u32;
    let width = (spec.allowed_count() as f64).max(2.0);
    let p = ((256f64).ln() / width.ln()).ceil().max(1.0) as u32;
    let mut out = Vec::new();
    for k in 1..=len {
        let plen = p.min(k);
        let shift = big_b.pow(k - plen);
        let lo = big_b.pow(plen - 1);
        let hi = big_b.pow(plen) - 1u32;
        for prefix in AvoidingRange::new(spec, &lo, &hi).expect("valid range") {
            let start = &prefix * &shift;
            if start >= top {
                break;
            }
            let end = ((prefix + 1u32) * &shift).min(top.clone());
            out.push((start, end));
        }
    }
    out
}

fn scan(q: &SearchQuery, lo: &BigUint, hi: &BigUint, limit: Option<usize>) -> Vec<BigUint> {
    let last = hi - 1u32;
    let it = AvoidingRange::new(q.sparsest(), lo, &last).expect("valid range").filter(|n| q.accepts(n));
    match limit {
        Some(k) => it.take(k).collect(),
        None => it.collect(),
    }
}

/// Integers `>= 1` avoiding every spec, ascending, up to the bound and/or
/// the result limit.
pub fn search_common(q: &SearchQuery) -> Result<Vec<BigUint>> {
    let Some(bound) = &q.bound else {
        let k = q.limit.expect("checked by constructor");
        let it = AvoidingRange::unbounded(q.sparsest(), &BigUint::one()).filter(|n| q.accepts(n));
        return Ok(it.take(k).collect());
    };
    let ranges = work_ranges(q, bound)?;
    let mut out = Vec::new();
    // Batches keep early exit possible when only the first few are wanted.
    let batch = rayon::current_num_threads().max(1) * 4;
    for chunk in ranges.chunks(batch) {
        let remaining = q.limit.map(|k| k - out.len());
        let parts: Vec<Vec<BigUint>> = chunk.par_iter().map(|(lo, hi)| scan(q, lo, hi, remaining)).collect();
        for p in parts {
            out.extend(p);
        }
        if let Some(k) = q.limit {
            if out.len() >= k {
                out.truncate(k);
                break;
            }
        }
    }
    Ok(out)
}

/// Number of results `search_common` would return for a bounded query.
pub fn count_common(q: &SearchQuery) -> Result<u64> {
    let Some(bound) = &q.bound else {
        return Err(Error::InvalidArgument("counting needs a bound".into()));
    };
    let ranges = work_ranges(q, bound)?;
    let total: u64 = ranges
        .par_iter()
        .map(|(lo, hi)| {
            let last = hi - 1u32;
            AvoidingRange::new(q.sparsest(), lo, &last).expect("valid range").filter(|n| q.accepts(n)).count() as u64
        })
        .sum();
    Ok(match q.limit {
        Some(k) => total.min(k as u64),
        None => total,
    })
}
