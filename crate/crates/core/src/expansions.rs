//! Base-`b` digit expansions of naturals and the digit-avoidance predicate.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};

/// Digits of a natural number, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DigitString {
    base: u64,
    digits: Vec<u64>,
}

impl DigitString {
    pub fn new(base: u64, digits: Vec<u64>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base.to_string()));
        }
        if digits.is_empty() {
            return Err(Error::InvalidDigits("empty digit string".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidDigits(format!("digit {d} out of range for base {base}")));
        }
        if digits.len() > 1 && digits.last() == Some(&0) {
            return Err(Error::InvalidDigits("leading zero".into()));
        }
        Ok(DigitString { base, digits })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Least significant first.
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Most significant first, concatenated for bases up to 10 and
    /// comma-separated otherwise.
    pub fn to_msf_string(&self) -> String {
        let it = self.digits.iter().rev();
        if self.base <= 10 {
            it.map(|d| d.to_string()).collect()
        } else {
            it.map(|d| d.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_msf_string())
    }
}

/// Canonical base-`b` expansion by repeated division.
pub fn expand_nat(n: &BigUint, base: u64) -> Result<DigitString> {
    if base < 2 {
        return Err(Error::InvalidBase(base.to_string()));
    }
    if let Some(small) = n.to_u64() {
        return Ok(DigitString { base, digits: digits_u64(small, base) });
    }
    let b = BigUint::from(base);
    let mut digits = Vec::new();
    let mut rest = n.clone();
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&b);
        digits.push(r.to_u64().expect("remainder below base"));
        rest = q;
    }
    Ok(DigitString { base, digits })
}

pub fn expand_u64(n: u64, base: u64) -> Result<DigitString> {
    if base < 2 {
        return Err(Error::InvalidBase(base.to_string()));
    }
    Ok(DigitString { base, digits: digits_u64(n, base) })
}

fn digits_u64(mut n: u64, base: u64) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % base);
        n /= base;
    }
    out
}

pub fn eval_digits(d: &DigitString) -> BigUint {
    let b = BigUint::from(d.base);
    d.digits.iter().rev().fold(BigUint::zero(), |acc, &x| acc * &b + BigUint::from(x))
}

/// Which of the run-structure hypotheses on the missing digits hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureFlags {
    /// `0` is a missing digit.
    pub zero_missing: bool,
    /// The top digit `b - 1` is allowed.
    pub top_allowed: bool,
    /// No two missing digits are consecutive.
    pub no_consecutive_missing: bool,
}

impl StructureFlags {
    pub fn all(&self) -> bool {
        self.zero_missing && self.top_allowed && self.no_consecutive_missing
    }
}

/// Largest base for which a per-digit lookup table is kept.
const MASK_LIMIT: u64 = 1 << 16;

/// A base together with its allowed digits `D` and missing digits `D^C`.
///
/// Only the missing digits are stored, so bases near `10^8` with a handful
/// of missing digits stay cheap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingDigitSpec {
    base: u64,
    missing: Vec<u64>,
    #[serde(with = "crate::numeric::serde_rational")]
    run_fraction: Rational,
    flags: StructureFlags,
    #[serde(skip)]
    mask: Option<Vec<bool>>,
}

impl MissingDigitSpec {
    /// Builds the spec with `r` equal to (shortest maximal run in `D`) / b.
    pub fn new(base: u64, missing: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::build(base, missing, None)
    }

    /// Builds the spec with an explicit run fraction, which must satisfy
    /// `0 < r * b <= ` every maximal run length in `D`.
    pub fn with_run_fraction(
        base: u64,
        missing: impl IntoIterator<Item = u64>,
        r: Rational,
    ) -> Result<Self> {
        Self::build(base, missing, Some(r))
    }

    fn build(base: u64, missing: impl IntoIterator<Item = u64>, r: Option<Rational>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base.to_string()));
        }
        let missing: Vec<u64> = missing.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if let Some(d) = missing.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidDigits(format!("digit {d} out of range for base {base}")));
        }
        let shortest = runs_between(base, &missing).iter().map(|&(_, len)| len).min();
        let run_fraction = match (r, shortest) {
            (Some(r), Some(s)) => {
                if r <= Rational::zero()
                    || &r * Rational::from_integer(base.into()) > Rational::from_integer(s.into())
                {
                    return Err(Error::InvalidArgument(format!(
                        "run fraction must satisfy 0 < r*b <= {s} (shortest run of allowed digits)"
                    )));
                }
                r
            }
            (Some(_), None) => return Err(Error::InvalidDigits("no allowed digits".into())),
            (None, Some(s)) => Rational::new(s.into(), base.into()),
            (None, None) => Rational::zero(),
        };
        let flags = StructureFlags {
            zero_missing: missing.first() == Some(&0),
            top_allowed: missing.last() != Some(&(base - 1)),
            no_consecutive_missing: missing.windows(2).all(|w| w[1] != w[0] + 1),
        };
        let mask = (base <= MASK_LIMIT).then(|| {
            let mut m = vec![true; base as usize];
            for &d in &missing {
                m[d as usize] = false;
            }
            m
        });
        Ok(MissingDigitSpec { base, missing, run_fraction, flags, mask })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Allowed digits, ascending. Materializes `b - |D^C|` values.
    pub fn allowed(&self) -> Vec<u64> {
        (0..self.base).filter(|&d| self.is_allowed(d)).collect()
    }

    pub fn allowed_count(&self) -> u64 {
        self.base - self.missing.len() as u64
    }

    /// Smallest and largest allowed digit.
    pub fn allowed_range(&self) -> Option<(u64, u64)> {
        let runs = self.runs();
        let first = runs.first()?;
        let last = runs.last()?;
        Some((first.0, last.0 + last.1 - 1))
    }

    /// Missing digits, ascending.
    pub fn missing(&self) -> &[u64] {
        &self.missing
    }

    #[inline]
    pub fn is_allowed(&self, d: u64) -> bool {
        match &self.mask {
            Some(m) => m.get(d as usize).copied().unwrap_or(false),
            None => d < self.base && self.missing.binary_search(&d).is_err(),
        }
    }

    pub fn run_fraction(&self) -> &Rational {
        &self.run_fraction
    }

    pub fn flags(&self) -> StructureFlags {
        self.flags
    }

    /// Maximal runs of consecutive allowed digits as `(first digit, length)`.
    pub fn runs(&self) -> Vec<(u64, u64)> {
        runs_between(self.base, &self.missing)
    }

    /// Same base with `0` added to the missing digits.
    pub fn with_zero_missing(&self) -> Result<Self> {
        let mut m = self.missing.clone();
        m.push(0);
        Self::new(self.base, m)
    }

    /// `log|D| / log b`, the exponent governing how many integers below `X`
    /// avoid the missing digits.
    pub fn density_exponent(&self) -> f64 {
        match self.allowed_count() {
            0 => f64::NEG_INFINITY,
            n => (n as f64).ln() / (self.base as f64).ln(),
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "base {} missing {:?} r={}",
            self.base,
            self.missing,
            format_rational(&self.run_fraction)
        )
    }
}

fn runs_between(base: u64, missing: &[u64]) -> Vec<(u64, u64)> {
    let mut runs = Vec::new();
    let mut start = 0u64;
    for &m in missing.iter().chain(std::iter::once(&base)) {
        if m > start {
            runs.push((start, m - start));
        }
        start = m + 1;
    }
    runs
}

/// True iff no base-`b` digit of `n` is missing in `spec`.
pub fn avoids(n: &BigUint, spec: &MissingDigitSpec) -> bool {
    if let Some(small) = n.to_u64() {
        return avoids_u64(small, spec);
    }
    let b = BigUint::from(spec.base);
    let mut rest = n.clone();
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&b);
        if !spec.is_allowed(r.to_u64().expect("remainder below base")) {
            return false;
        }
        rest = q;
    }
    true
}

pub fn avoids_u64(mut n: u64, spec: &MissingDigitSpec) -> bool {
    let b = spec.base;
    if n == 0 {
        return spec.is_allowed(0);
    }
    while n > 0 {
        if !spec.is_allowed(n % b) {
            return false;
        }
        n /= b;
    }
    true
}
