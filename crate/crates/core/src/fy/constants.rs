use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{e_const, int, ln_rational, Enclosure, Rational, DEFAULT_BITS, MAX_BITS};

/// `((24 √d)^d (1 + 2·4^d) / (1 - 2^-d))^2`, exact: the square turns
/// `(√d)^(2d)` into `d^d`.
pub fn k2_constant(d: u32) -> Rational {
    assert!(d >= 1, "dimension must be at least 1");
    let d_big = BigInt::from(d);
    let lead = BigInt::from(576u32).pow(d) * d_big.pow(d);
    let mid = BigInt::one() + BigInt::from(2u32) * BigInt::from(4u32).pow(d);
    let two_d = BigInt::one() << d;
    // 1 - 2^-d = (2^d - 1) / 2^d
    let inner = Rational::new(&two_d * mid, &two_d - 1u32);
    int(lead) * &inner * &inner
}

/// `k · 4e · 432² / ln 4`.
pub fn gauge_constant(k: u32, bits: u32) -> Result<Enclosure> {
    let e = e_const(bits + 8);
    let ln4 = ln_rational(&int(4), bits + 8)?;
    let num = e.scale(&int(4u64 * 432 * 432 * k as u64));
    num.div(&ln4)
}

/// Enclosure of `g_k(x) = x / ln x - k · 4e · 432² / ln 4`.
pub fn gauge(k: u32, x: &Rational, bits: u32) -> Result<Enclosure> {
    if x <= &Rational::one() {
        return Err(Error::InvalidArgument("gauge needs x > 1".into()));
    }
    let lx = ln_rational(x, bits + 8)?;
    let first = Enclosure::exact(x.clone()).div(&lx)?;
    Ok((&first - &gauge_constant(k, bits)?).round_out(bits))
}

/// Minimal base threshold `M` and the gauge values bracketing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Threshold {
    pub k: u32,
    #[serde(with = "crate::numeric::serde_rational")]
    pub r: Rational,
    pub m: u64,
    /// `g_k(r (M - 2))`, rigorously positive.
    pub gauge_at_m: Enclosure,
    /// `g_k(r (M - 3))` when that argument is still at least 3.
    pub gauge_below: Option<Enclosure>,
}

/// Sign of the gauge, refining precision until it is decided. `None` when
/// still undecided at the maximum precision.
fn gauge_sign(k: u32, x: &Rational) -> Result<Option<bool>> {
    let mut bits = DEFAULT_BITS;
    loop {
        let g = gauge(k, x, bits)?;
        if g.is_positive() {
            return Ok(Some(true));
        }
        if g.hi() <= &Rational::zero() {
            return Ok(Some(false));
        }
        if bits >= MAX_BITS / 4 {
            return Ok(None);
        }
        bits *= 2;
    }
}

/// Smallest `M >= 4` with `r (M - 2) >= 3` and `g_k(r (M - 2)) > 0`
/// rigorously. `g_k` increases on `[3, ∞)`, so exponential bracketing and
/// bisection find it.
pub fn solve_threshold_m(k: u32, r: &Rational) -> Result<Threshold> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    if r <= &Rational::zero() || r > &Rational::one() {
        return Err(Error::InvalidArgument("r must lie in (0, 1]".into()));
    }
    let arg = |m: u64| r * int(m - 2);
    let positive = |m: u64| -> Result<bool> { Ok(gauge_sign(k, &arg(m))? == Some(true)) };

    // Smallest M with r (M - 2) >= 3.
    let start = crate::numeric::ceil_int(&(int(3) / r + int(2)));
    let start: u64 = u64::try_from(start).map_err(|_| Error::InvalidArgument("r too small".into()))?.max(4);
    let mut hi = start;
    if !positive(start)? {
        let mut lo;
        loop {
            lo = hi;
            hi = hi.checked_mul(2).ok_or_else(|| Error::InvalidArgument("threshold overflows u64".into()))?;
            if positive(hi)? {
                break;
            }
        }
        // Invariant: not positive at lo, positive at hi.
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if positive(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let m = hi;
    let gauge_at_m = gauge(k, &arg(m), DEFAULT_BITS)?;
    let below = r * int(m - 3);
    let gauge_below = if m > start { Some(gauge(k, &below, DEFAULT_BITS)?) } else { None };
    Ok(Threshold { k, r: r.clone(), m, gauge_at_m, gauge_below })
}

/// `c = 1 - 1 / ln((b - 2) / 4)`, which lies in `(0, 1)` once `b >= 13`.
pub fn choose_c(b_min: u64, bits: u32) -> Result<Enclosure> {
    if b_min < 3 {
        return Err(Error::InvalidBase(b_min.to_string()));
    }
    choose_c_for_thickness(&int(b_min - 2), bits)
}

/// `c = 1 - 1 / ln(τ / 4)` for a common lower bound `τ` on the thicknesses.
pub fn choose_c_for_thickness(tau: &Rational, bits: u32) -> Result<Enclosure> {
    let x = tau / int(4);
    if x <= Rational::one() {
        return Err(Error::InvalidArgument("thickness too small: need τ > 4e for c in (0, 1)".into()));
    }
    let l = ln_rational(&x, bits + 8)?;
    if l.lo() <= &Rational::one() {
        return Err(Error::InvalidArgument("thickness too small: need τ > 4e for c in (0, 1)".into()));
    }
    let c = &Enclosure::exact(Rational::one()) - &l.recip()?;
    Ok(c.round_out(bits))
}
