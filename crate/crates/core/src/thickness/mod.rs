//! Newhouse thickness of finite interval unions, finite-level missing-digit
//! Cantor sets, and a rasterized estimate for planar sets.

mod formula;
mod levelset;
pub mod planar;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Interval, IntervalUnion, Rational};

pub use formula::{check_formula, thickness_formula, FormulaCheck, ThicknessFormula};
pub use levelset::{level_set, middle_epsilon_level, LevelSetSpec};

/// Thickness value; intervals have infinite thickness.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Thickness {
    Finite(Rational),
    Infinite,
}

impl Thickness {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Thickness::Finite(r) => Some(r),
            Thickness::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Thickness::Infinite)
    }
}

impl PartialOrd for Thickness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Thickness {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Thickness::Finite(a), Thickness::Finite(b)) => a.cmp(b),
            (Thickness::Finite(_), Thickness::Infinite) => Ordering::Less,
            (Thickness::Infinite, Thickness::Finite(_)) => Ordering::Greater,
            (Thickness::Infinite, Thickness::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Thickness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Thickness::Finite(r) => f.write_str(&format_rational(r)),
            Thickness::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Thickness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One removed gap with the two bridges flanking it inside the interval it
/// was removed from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapEntry {
    pub gap: Interval,
    pub left: Interval,
    pub right: Interval,
}

impl GapEntry {
    /// `min(|L|, |R|) / |G|`.
    pub fn ratio(&self) -> Rational {
        let l = self.left.length();
        let r = self.right.length();
        l.min(r) / self.gap.length()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapSystem {
    pub hull: Interval,
    pub gaps: Vec<GapEntry>,
}

impl GapSystem {
    pub fn thickness(&self) -> Thickness {
        if self.gaps.is_empty() {
            return single_part_thickness(&self.hull);
        }
        let min = self.gaps.iter().map(GapEntry::ratio).min().expect("nonempty");
        Thickness::Finite(min)
    }
}

fn single_part_thickness(hull: &Interval) -> Thickness {
    if hull.length().is_zero() {
        Thickness::Finite(Rational::zero())
    } else {
        Thickness::Infinite
    }
}

/// Indices of `u.gaps()` sorted by non-increasing length, ties left to right.
fn removal_order(gaps: &[Interval]) -> Vec<usize> {
    let lengths: Vec<Rational> = gaps.iter().map(Interval::length).collect();
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by(|&a, &b| lengths[b].cmp(&lengths[a]));
    order
}

/// Replays the removals in `order`, calling `visit` with each gap index and
/// the bounds of the interval it is removed from.
fn replay<'a>(
    u: &'a IntervalUnion,
    order: &[usize],
    mut visit: impl FnMut(usize, &'a Rational, &'a Rational),
) {
    let parts = u.parts();
    let first = parts.first().expect("nonempty").lo();
    let last = parts.last().expect("nonempty").hi();
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    for &p in order {
        let left = removed.range(..p).next_back().map_or(first, |&q| parts[q + 1].lo());
        let right = removed.range(p + 1..).next().map_or(last, |&q| parts[q].hi());
        visit(p, left, right);
        removed.insert(p);
    }
}

/// Hull and ordered gaps with their bridges.
pub fn gap_system(u: &IntervalUnion) -> Result<GapSystem> {
    let hull = u.hull().ok_or(Error::EmptySet)?;
    let gaps = u.gaps();
    let order = removal_order(&gaps);
    let parts = u.parts();
    let mut entries = Vec::with_capacity(gaps.len());
    replay(u, &order, |p, l, r| {
        entries.push(GapEntry {
            gap: gaps[p].clone(),
            left: Interval::new(l.clone(), parts[p].hi().clone()).expect("ordered"),
            right: Interval::new(parts[p + 1].lo().clone(), r.clone()).expect("ordered"),
        });
    });
    Ok(GapSystem { hull, gaps: entries })
}

/// Exact Newhouse thickness. Empty input is rejected.
pub fn thickness_exact(u: &IntervalUnion) -> Result<Thickness> {
    let gaps = u.gaps();
    let order = removal_order(&gaps);
    thickness_in_order(u, &order)
}

/// Thickness computed with an explicit removal order, which must list every
/// gap index with lengths non-increasing.
pub(crate) fn thickness_in_order(u: &IntervalUnion, order: &[usize]) -> Result<Thickness> {
    let hull = u.hull().ok_or(Error::EmptySet)?;
    if order.is_empty() {
        return Ok(single_part_thickness(&hull));
    }
    let parts = u.parts();
    let mut best: Option<Rational> = None;
    replay(u, order, |p, l, r| {
        let gap = parts[p + 1].lo() - parts[p].hi();
        let lb = parts[p].hi() - l;
        let rb = r - parts[p + 1].lo();
        let ratio = lb.min(rb) / gap;
        if best.as_ref().is_none_or(|b| &ratio < b) {
            best = Some(ratio);
        }
    });
    Ok(Thickness::Finite(best.expect("nonempty order")))
}

/// Cuts `u` at the left endpoint of one of its largest gaps, chosen closest
/// to `target` (ties go to the smaller endpoint). Every gap that survives
/// keeps its bridges, so thickness cannot drop.
pub fn truncate_right_at_gap(u: &IntervalUnion, target: &Rational) -> Result<(IntervalUnion, Rational)> {
    let gaps = u.gaps();
    let max = gaps.iter().map(Interval::length).max().ok_or(Error::NoGap)?;
    let cut = gaps
        .iter()
        .filter(|g| g.length() == max)
        .map(|g| g.lo())
        .min_by(|a, b| {
            let da = (*a - target).abs();
            let db = (*b - target).abs();
            da.cmp(&db).then_with(|| a.cmp(b))
        })
        .expect("at least one largest gap")
        .clone();
    Ok((u.restrict_upto(&cut), cut))
}
