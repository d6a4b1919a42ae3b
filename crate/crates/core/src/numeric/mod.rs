//! Exact arithmetic: rationals, closed intervals, interval unions and
//! rigorous enclosures of logarithms and exponentials.

mod enclosure;
mod interval;
mod logratio;

pub use enclosure::{e_const, exp_rational, ln_rational, Enclosure, DEFAULT_BITS, MAX_BITS};
pub use interval::{Interval, IntervalUnion};
pub use logratio::{log_ratio, perfect_power, LogEnclosure};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// `p/q` as a rational. Panics when `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Canonical `"p/q"` rendering (the denominator is always printed).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.01"` or `"1e-6"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let digits = if digits == "-" || digits == "+" { return Err(bad()) } else { digits };
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    Ok(Rational::from_integer(numer) * pow10(scale))
}

pub fn pow10(e: i32) -> Rational {
    let p = Rational::from_integer(BigInt::from(10u32).pow(e.unsigned_abs()));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil_int(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// Distance from `r` to the nearest integer, and that integer (ties go down).
pub fn dist_to_integer(r: &Rational) -> (Rational, BigInt) {
    let fl = floor_int(r);
    let frac = r - Rational::from_integer(fl.clone());
    let half = rat(1, 2);
    if frac <= half {
        (frac, fl)
    } else {
        (Rational::one() - frac, fl + 1)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    // Shift large operands down first so the conversion does not overflow.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn biguint_to_rational(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

/// Serde adapters for rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::super::{format_rational, Rational};
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }
    }

    pub mod option {
        use super::super::{format_rational, Rational};
        use serde::Serializer;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_str(&format_rational(r)),
                None => s.serialize_none(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(5)), "5/1");
        assert_eq!(format_rational(&rat(-1, 3)), "-1/3");
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/100").unwrap(), rat(1, 100));
        assert_eq!(parse_rational("0.01").unwrap(), rat(1, 100));
        assert_eq!(parse_rational("1e-6").unwrap(), rat(1, 1_000_000));
        assert_eq!(parse_rational("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn floor_ceil_and_nearest() {
        assert_eq!(floor_int(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(ceil_int(&rat(-3, 2)), BigInt::from(-1));
        assert_eq!(ceil_int(&rat(4, 2)), BigInt::from(2));
        let (d, m) = dist_to_integer(&rat(29, 10));
        assert_eq!((d, m), (rat(1, 10), BigInt::from(3)));
    }

    #[test]
    fn f64_of_huge_ratio() {
        let big = Rational::from_integer(BigInt::from(10u32).pow(400));
        let r = &big / (&big * int(4));
        assert_eq!(to_f64(&r), 0.25);
    }
}
