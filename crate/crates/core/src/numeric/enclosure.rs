//! Rigorous two-sided enclosures of real numbers with rational endpoints.
//!
//! Transcendental values are evaluated in binary fixed point with directed
//! rounding: every lower bound is built from floor-rounded operations on
//! non-negative quantities, every upper bound from ceiling-rounded ones plus an
//! explicit series tail bound. No floating point is involved.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{ceil_int, floor_int, format_rational, to_f64, Rational};
use crate::error::{Error, Result};

/// Working precision used when a caller does not ask for one.
pub const DEFAULT_BITS: u32 = 128;
/// Refinement loops give up beyond this many fractional bits.
pub const MAX_BITS: u32 = 1 << 14;

const GUARD_BITS: u32 = 24;

/// A closed interval `[lo, hi]` known to contain some real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn exact(x: Rational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        (to_f64(&self.lo) + to_f64(&self.hi)) / 2.0
    }

    /// Strictly positive for every value in the enclosure.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Widens the endpoints outward onto the grid `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Enclosure {
        if self.is_exact() && self.lo.denom().bits() <= bits as u64 {
            return self.clone();
        }
        let scale = Rational::from_integer(BigInt::one() << bits);
        let lo = floor_int(&(&self.lo * &scale));
        let hi = ceil_int(&(&self.hi * &scale));
        Enclosure {
            lo: Rational::new(lo, BigInt::one() << bits),
            hi: Rational::new(hi, BigInt::one() << bits),
        }
    }

    pub fn recip(&self) -> Result<Enclosure> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return Err(Error::InvalidArgument("reciprocal of an enclosure containing 0".into()));
        }
        Ok(Enclosure { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Enclosure) -> Result<Enclosure> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, k: &Rational) -> Enclosure {
        self * &Enclosure::exact(k.clone())
    }

    /// Natural logarithm; requires a strictly positive enclosure.
    pub fn ln(&self, bits: u32) -> Result<Enclosure> {
        if !self.lo.is_positive() {
            return Err(Error::InvalidArgument("logarithm of a non-positive value".into()));
        }
        let lo = ln_rational(&self.lo, bits)?;
        if self.is_exact() {
            return Ok(lo);
        }
        let hi = ln_rational(&self.hi, bits)?;
        Ok(Enclosure { lo: lo.lo, hi: hi.hi })
    }

    pub fn exp(&self, bits: u32) -> Enclosure {
        let lo = exp_rational(&self.lo, bits);
        if self.is_exact() {
            return lo;
        }
        let hi = exp_rational(&self.hi, bits);
        Enclosure { lo: lo.lo, hi: hi.hi }
    }

    /// `self^power` for a positive base, via `exp(power * ln(self))`.
    pub fn powr(&self, power: &Enclosure, bits: u32) -> Result<Enclosure> {
        let l = self.ln(bits)?;
        Ok((&l * power).round_out(bits + GUARD_BITS).exp(bits))
    }

    pub fn max_hi(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: (&self.lo).max(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Enclosure", 3)?;
        st.serialize_field("lo", &format_rational(&self.lo))?;
        st.serialize_field("hi", &format_rational(&self.hi))?;
        st.serialize_field("approx", &format!("{:.15e}", self.midpoint_f64()))?;
        st.end()
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, o: &Enclosure) -> Enclosure {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }
}

/// `floor(a / 2^w)` for non-negative `a`.
fn shr_floor(a: &BigInt, w: u32) -> BigInt {
    a >> w
}

/// `ceil(a / 2^w)` for non-negative `a`.
fn shr_ceil(a: &BigInt, w: u32) -> BigInt {
    let q = a >> w;
    if (&q << w) == *a {
        q
    } else {
        q + 1
    }
}

fn ceil_div(a: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

fn scaled_floor(x: &Rational, w: u32) -> BigInt {
    floor_int(&(x * Rational::from_integer(BigInt::one() << w)))
}

fn scaled_ceil(x: &Rational, w: u32) -> BigInt {
    ceil_int(&(x * Rational::from_integer(BigInt::one() << w)))
}

fn from_scaled(lo: BigInt, hi: BigInt, w: u32) -> Enclosure {
    Enclosure { lo: Rational::new(lo, BigInt::one() << w), hi: Rational::new(hi, BigInt::one() << w) }
}

/// Bounds on `2^w * atanh(t)` for `0 <= t <= 1/3`.
fn atanh_scaled(t: &Rational, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!t.is_negative() && *t <= Rational::new(1.into(), 3.into()));
    if t.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let t_lo = scaled_floor(t, w);
    let t_hi = scaled_ceil(t, w);
    let sq_lo = shr_floor(&(&t_lo * &t_lo), w);
    let sq_hi = shr_ceil(&(&t_hi * &t_hi), w);

    let mut sum_lo = BigInt::zero();
    let mut p = t_lo;
    let mut k = 1u64;
    while !p.is_zero() {
        sum_lo += &p / BigInt::from(k);
        p = shr_floor(&(&p * &sq_lo), w);
        k += 2;
    }

    let mut sum_hi = BigInt::zero();
    let mut p = t_hi;
    let mut k = 1u64;
    // Ceiling-rounded powers never reach zero; stop once they are at most one
    // ulp and bound the remaining tail by the geometric sum p * 9/8.
    while p > BigInt::one() {
        sum_hi += ceil_div(&p, &BigInt::from(k));
        p = shr_ceil(&(&p * &sq_hi), w);
        k += 2;
    }
    sum_hi += 2;
    (sum_lo, sum_hi)
}

/// Bounds on `2^w * ln 2`.
fn ln2_scaled(w: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_scaled(&Rational::new(1.into(), 3.into()), w);
    (lo * 2, hi * 2)
}

/// Rigorous enclosure of `ln(x)` for rational `x > 0`, of width about
/// `2^-bits`.
pub fn ln_rational(x: &Rational, bits: u32) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument("logarithm of a non-positive value".into()));
    }
    if x.is_one() {
        return Ok(Enclosure::exact(Rational::zero()));
    }
    // x = 2^m * y with y in [1, 2).
    let mut m = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow2 = |e: i64| -> Rational {
        let p = Rational::from_integer(BigInt::one() << e.unsigned_abs());
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };
    let mut y = x / pow2(m);
    if y < Rational::one() {
        m -= 1;
        y = x / pow2(m);
    }
    debug_assert!(y >= Rational::one() && y < Rational::from_integer(2.into()));
    let w = bits + GUARD_BITS + 64 - (m.unsigned_abs().max(1)).leading_zeros();
    let t = (&y - Rational::one()) / (&y + Rational::one());
    let (a_lo, a_hi) = atanh_scaled(&t, w);
    let (l2_lo, l2_hi) = ln2_scaled(w);
    let mb = BigInt::from(m);
    let (lo, hi) = if m >= 0 {
        (&mb * l2_lo + a_lo * 2, &mb * l2_hi + a_hi * 2)
    } else {
        (&mb * l2_hi + a_lo * 2, &mb * l2_lo + a_hi * 2)
    };
    Ok(from_scaled(lo, hi, w).round_out(bits + GUARD_BITS / 2))
}

/// Rigorous enclosure of `exp(x)` for rational `x`.
pub fn exp_rational(x: &Rational, bits: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::exact(Rational::one());
    }
    if x.is_negative() {
        let e = exp_rational(&-x, bits + 2);
        // exp(x) >= 2^-ish tiny values; reciprocal keeps rigor.
        return Enclosure { lo: e.hi.recip(), hi: e.lo.recip() }.round_out(bits + GUARD_BITS);
    }
    // Reduce to y = x / 2^s <= 1/2, then square s times.
    let mut s: u32 = 0;
    let half = Rational::new(1.into(), 2.into());
    let mut y = x.clone();
    while y > half {
        y /= Rational::from_integer(2.into());
        s += 1;
    }
    // Squaring doubles the relative error s times and the result carries
    // about x*log2(e) integer bits.
    let int_bits = (to_f64(x) * std::f64::consts::LOG2_E).ceil().max(0.0) as u32;
    let w = bits + GUARD_BITS + 2 * s + int_bits;
    let one = BigInt::one() << w;
    let y_lo = scaled_floor(&y, w);
    let y_hi = scaled_ceil(&y, w);

    let mut sum_lo = one.clone();
    let mut term = one.clone();
    let mut k = 1u64;
    loop {
        term = shr_floor(&(&term * &y_lo), w) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum_lo += &term;
        k += 1;
    }

    let mut sum_hi = one.clone();
    let mut term = one;
    let mut k = 1u64;
    loop {
        term = ceil_div(&shr_ceil(&(&term * &y_hi), w), &BigInt::from(k));
        sum_hi += &term;
        if term <= BigInt::one() {
            break;
        }
        k += 1;
    }
    // Remaining terms shrink by at least 1/2 each (y <= 1/2).
    sum_hi += 2;

    for _ in 0..s {
        sum_lo = shr_floor(&(&sum_lo * &sum_lo), w);
        sum_hi = shr_ceil(&(&sum_hi * &sum_hi), w);
    }
    debug_assert!(sum_lo.sign() != Sign::Minus);
    from_scaled(sum_lo, sum_hi, w).round_out(bits + GUARD_BITS)
}

/// Euler's number.
pub fn e_const(bits: u32) -> Enclosure {
    exp_rational(&Rational::one(), bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn close(e: &Enclosure, v: f64, tol: f64) {
        let m = e.midpoint_f64();
        assert!((m - v).abs() <= tol * v.abs().max(1.0), "{e} vs {v}");
    }

    #[test]
    fn ln_of_small_values() {
        let bits = 100;
        for (x, v) in [(rat(2, 1), 2f64.ln()), (rat(3, 1), 3f64.ln()), (rat(1, 10), 0.1f64.ln()), (rat(7, 5), 1.4f64.ln())] {
            let e = ln_rational(&x, bits).unwrap();
            close(&e, v, 1e-15);
            assert!(e.width() < Rational::new(1.into(), BigInt::one() << 90));
        }
        assert!(ln_rational(&int(1), 64).unwrap().is_exact());
        assert!(ln_rational(&int(0), 64).is_err());
    }

    #[test]
    fn ln_brackets_power_relations() {
        // 2^10 = 1024 > 1000 = 10^3 so 10 ln 2 > 3 ln 10.
        let l2 = ln_rational(&int(2), 80).unwrap();
        let l10 = ln_rational(&int(10), 80).unwrap();
        assert!(l2.lo() * int(10) > l10.hi() * int(3));
    }

    #[test]
    fn exp_matches_reference() {
        for (x, v) in [(rat(1, 1), std::f64::consts::E), (rat(-3, 2), (-1.5f64).exp()), (rat(20, 1), 20f64.exp()), (rat(1, 1000), 0.001f64.exp())] {
            let e = exp_rational(&x, 100);
            close(&e, v, 1e-14);
        }
    }

    #[test]
    fn exp_ln_round_trip_contains_input() {
        for x in [rat(5, 3), int(1000), rat(1, 7)] {
            let l = ln_rational(&x, 120).unwrap();
            let back = l.exp(120);
            assert!(back.contains(&x), "{back} should contain {x}");
        }
    }

    #[test]
    fn e_digits() {
        // e = 2.718281828459045235360287...
        let e = e_const(120);
        let lo = parse("2.718281828459045235360287");
        let hi = parse("2.718281828459045235360288");
        assert!(e.lo() > &lo && e.hi() < &hi);
    }

    fn parse(s: &str) -> Rational {
        crate::numeric::parse_rational(s).unwrap()
    }

    #[test]
    fn powr_of_quarter() {
        let q = Enclosure::exact(rat(1, 4));
        let p = q.powr(&Enclosure::exact(rat(1, 2)), 100).unwrap();
        assert!(p.contains(&rat(1, 2)));
        assert!(p.width() < rat(1, 1 << 40));
    }

    #[test]
    fn arithmetic_is_outward() {
        let a = Enclosure::new(rat(-1, 2), rat(1, 3));
        let b = Enclosure::new(rat(2, 1), rat(3, 1));
        let p = &a * &b;
        assert_eq!(p, Enclosure::new(rat(-3, 2), rat(1, 1)));
        assert_eq!(&a - &b, Enclosure::new(rat(-7, 2), rat(-5, 3)));
        assert!(a.recip().is_err());
        assert_eq!(b.recip().unwrap(), Enclosure::new(rat(1, 3), rat(1, 2)));
    }
}
