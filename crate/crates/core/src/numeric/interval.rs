use std::fmt;

use num_traits::{Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::{format_rational, Rational};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval [{}, {}] has lo > hi",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Image under `x -> a x + c`; the endpoints are swapped when `a < 0`.
    pub fn affine(&self, a: &Rational, c: &Rational) -> Interval {
        let x = a * &self.lo + c;
        let y = a * &self.hi + c;
        if a.is_negative() {
            Interval { lo: y, hi: x }
        } else {
            Interval { lo: x, hi: y }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&format_rational(&self.lo))?;
        seq.serialize_element(&format_rational(&self.hi))?;
        seq.end()
    }
}

/// Finite union of closed intervals, stored sorted with strictly positive gaps
/// between consecutive parts. Parts that overlap or share an endpoint are
/// merged on construction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn from_interval(i: Interval) -> Self {
        IntervalUnion { parts: vec![i] }
    }

    /// Normalizes an arbitrary collection of intervals.
    pub fn new(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                    }
                }
                _ => merged.push(p),
            }
        }
        IntervalUnion { parts: merged }
    }

    /// Builds from parts already sorted and separated by positive gaps.
    pub(crate) fn from_sorted_unchecked(parts: Vec<Interval>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0].hi < w[1].lo));
        IntervalUnion { parts }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn hull(&self) -> Option<Interval> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some(Interval { lo: first.lo.clone(), hi: last.hi.clone() })
    }

    pub fn measure(&self) -> Rational {
        self.parts.iter().fold(Rational::zero(), |acc, p| acc + p.length())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // First part whose hi >= x.
        let idx = self.parts.partition_point(|p| &p.hi < x);
        self.parts.get(idx).is_some_and(|p| p.contains(x))
    }

    /// Bounded complementary components inside the hull, left to right, as
    /// `(left endpoint, right endpoint)` pairs of the open gaps.
    pub fn gaps(&self) -> Vec<Interval> {
        self.parts
            .windows(2)
            .map(|w| Interval { lo: w[0].hi.clone(), hi: w[1].lo.clone() })
            .collect()
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (a, b) = (&self.parts, &other.parts);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(x) = a[i].intersect(&b[j]) {
                out.push(x);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of an intersection of two separated unions are separated,
        // except for degenerate touching cases which `new` merges.
        IntervalUnion::new(out)
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut all = self.parts.clone();
        all.extend(other.parts.iter().cloned());
        IntervalUnion::new(all)
    }

    pub fn affine(&self, a: &Rational, c: &Rational) -> IntervalUnion {
        if a.is_zero() {
            return match self.hull() {
                Some(_) => IntervalUnion::from_interval(Interval::point(c.clone())),
                None => IntervalUnion::empty(),
            };
        }
        IntervalUnion::new(self.parts.iter().map(|p| p.affine(a, c)).collect())
    }

    /// `self ∩ (-∞, x]`.
    pub fn restrict_upto(&self, x: &Rational) -> IntervalUnion {
        let mut out = Vec::new();
        for p in &self.parts {
            if &p.lo > x {
                break;
            }
            let hi = if &p.hi > x { x.clone() } else { p.hi.clone() };
            out.push(Interval { lo: p.lo.clone(), hi });
        }
        IntervalUnion::from_sorted_unchecked(out)
    }

    /// `self ∩ [lo, hi]`.
    pub fn restrict(&self, window: &Interval) -> IntervalUnion {
        self.intersect(&IntervalUnion::from_interval(window.clone()))
    }
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.parts.len()))?;
        for p in &self.parts {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}
