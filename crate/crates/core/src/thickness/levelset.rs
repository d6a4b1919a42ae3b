use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansions::MissingDigitSpec;
use crate::numeric::{Interval, IntervalUnion, Rational};

/// Level `depth` of `b^scale · C_{b,D}`, where `C_{b,D}` is the set of
/// `Σ_{t≥1} c_t b^{-t}` with every `c_t ∈ D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSetSpec {
    pub spec: MissingDigitSpec,
    pub scale: i64,
    pub depth: u32,
}

impl LevelSetSpec {
    pub fn new(spec: MissingDigitSpec, scale: i64, depth: u32) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        Ok(LevelSetSpec { spec, scale, depth })
    }
}

/// Union of the `|D|^L` intervals `Σ_{t≤L} c_t b^{-t} + b^{-L}·hull(C_{b,D})`,
/// scaled by `b^scale`. Touching intervals are merged.
pub fn level_set(ls: &LevelSetSpec) -> Result<IntervalUnion> {
    let spec = &ls.spec;
    if ls.depth < 1 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if spec.allowed_count() < 2 {
        return Err(Error::InvalidDigits("level sets need at least two allowed digits".into()));
    }
    let count = (spec.allowed_count() as f64).powi(ls.depth as i32);
    if count > 5e7 {
        return Err(Error::InvalidArgument(format!("level set would have {count:.0} intervals")));
    }
    let b = spec.base();
    let digits = spec.allowed();
    let (dmin, dmax) = (digits[0], *digits.last().expect("two digits"));

    // Work with integer numerators over Q = b^L (b - 1): the interval for the
    // prefix value P is [P (b-1) + dmin, P (b-1) + dmax].
    let fits = (b as u128).checked_pow(ls.depth).is_some_and(|v| v.checked_mul(b as u128).is_some());
    if !fits {
        return Err(Error::InvalidArgument("level set denominators exceed 128 bits".into()));
    }
    let mut prefixes: Vec<u128> = vec![0];
    for _ in 0..ls.depth {
        let mut next = Vec::with_capacity(prefixes.len() * digits.len());
        for &p in &prefixes {
            for &d in &digits {
                next.push(p * b as u128 + d as u128);
            }
        }
        prefixes = next;
    }
    let mut merged: Vec<(u128, u128)> = Vec::new();
    for p in prefixes {
        let lo = p * (b as u128 - 1) + dmin as u128;
        let hi = p * (b as u128 - 1) + dmax as u128;
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }

    let bb = BigInt::from(b);
    let mut denom = bb.pow(ls.depth) * (&bb - 1u32);
    let mut factor = BigInt::one();
    if ls.scale >= 0 {
        factor = bb.pow(ls.scale as u32);
    } else {
        denom *= bb.pow(ls.scale.unsigned_abs() as u32);
    }
    let parts = merged
        .into_iter()
        .map(|(lo, hi)| {
            let lo = Rational::new(BigInt::from(lo) * &factor, denom.clone());
            let hi = Rational::new(BigInt::from(hi) * &factor, denom.clone());
            Interval::new(lo, hi).expect("ordered")
        })
        .collect();
    Ok(IntervalUnion::from_sorted_unchecked(parts))
}

/// Level `depth` of the middle-ε Cantor set: starting from `[0, 1]`, remove
/// the open middle proportion `ε` from every interval.
pub fn middle_epsilon_level(eps: &Rational, depth: u32) -> Result<IntervalUnion> {
    if eps <= &Rational::zero() || eps >= &Rational::one() {
        return Err(Error::InvalidArgument("epsilon must lie in (0, 1)".into()));
    }
    if depth > 20 {
        return Err(Error::InvalidArgument("depth above 20 is not supported".into()));
    }
    let keep = (Rational::one() - eps) / Rational::from_integer(2.into());
    let mut parts = vec![(Rational::zero(), Rational::one())];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(parts.len() * 2);
        for (lo, hi) in parts {
            let piece = (&hi - &lo) * &keep;
            next.push((lo.clone(), &lo + &piece));
            next.push((&hi - &piece, hi));
        }
        parts = next;
    }
    Ok(IntervalUnion::from_sorted_unchecked(
        parts.into_iter().map(|(a, b)| Interval::new(a, b).expect("ordered")).collect(),
    ))
}
