use num_integer::Roots;
use num_traits::Zero;
use serde::Serialize;

use super::enclosure::ln_rational;
use super::{format_rational, int, Enclosure, Rational, MAX_BITS};
use crate::error::{Error, Result};

/// Enclosure of `log(b1) / log(bi)` refined to a requested width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEnclosure {
    #[serde(with = "super::serde_rational")]
    pub value_lo: Rational,
    #[serde(with = "super::serde_rational")]
    pub value_hi: Rational,
    #[serde(with = "super::serde_rational")]
    pub precision: Rational,
}

impl LogEnclosure {
    pub fn is_exact(&self) -> bool {
        self.value_lo == self.value_hi
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.value_lo)
    }

    pub fn as_enclosure(&self) -> Enclosure {
        Enclosure::new(self.value_lo.clone(), self.value_hi.clone())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.value_lo <= x && x <= &self.value_hi
    }
}

impl std::fmt::Display for LogEnclosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.value_lo), format_rational(&self.value_hi))
    }
}

/// Writes `n = root^exp` with `exp` maximal.
pub fn perfect_power(n: u64) -> (u64, u32) {
    if n < 4 {
        return (n, 1);
    }
    let max_exp = 63 - n.leading_zeros();
    for e in (2..=max_exp).rev() {
        let r = n.nth_root(e);
        if r.checked_pow(e) == Some(n) {
            // r itself may be a power; the maximal exponent already absorbs it.
            return (r, e);
        }
    }
    (n, 1)
}

/// Rigorous enclosure of `log(b1) / log(bi)` of width at most `precision`.
///
/// When both bases are powers of a common integer the ratio is rational and
/// returned exactly.
pub fn log_ratio(bi: u64, b1: u64, precision: &Rational) -> Result<LogEnclosure> {
    if precision <= &Rational::zero() {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    if bi < 2 || b1 < 2 {
        return Err(Error::InvalidBase(format!("log_ratio needs bases >= 2, got {bi}, {b1}")));
    }
    let (ri, ei) = perfect_power(bi);
    let (r1, e1) = perfect_power(b1);
    if ri == r1 {
        let v = Rational::new((e1 as i64).into(), (ei as i64).into());
        return Ok(LogEnclosure { value_lo: v.clone(), value_hi: v, precision: precision.clone() });
    }
    let mut bits = 64 + precision_bits(precision);
    loop {
        let num = ln_rational(&int(b1), bits)?;
        let den = ln_rational(&int(bi), bits)?;
        let q = num.div(&den)?;
        if &q.width() <= precision {
            return Ok(LogEnclosure {
                value_lo: q.lo().clone(),
                value_hi: q.hi().clone(),
                precision: precision.clone(),
            });
        }
        if bits > MAX_BITS {
            return Err(Error::PrecisionExhausted(bits));
        }
        bits *= 2;
    }
}

/// Number of bits needed to resolve `precision`.
fn precision_bits(precision: &Rational) -> u32 {
    let d = precision.denom().bits() as i64 - precision.numer().bits() as i64;
    d.max(0) as u32 + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use num_bigint::BigUint;

    /// Brackets log(b1)/log(bi) by comparing b1^q with bi^p for the
    /// Stern–Brocot mediants, an independent integer-power oracle.
    fn power_bracket(bi: u64, b1: u64, steps: usize) -> (Rational, Rational) {
        // lo = a/b, hi = c/d with lo <= x <= hi; x <= p/q iff b1^q <= bi^p.
        let le = |p: u64, q: u64| BigUint::from(b1).pow(q as u32) <= BigUint::from(bi).pow(p as u32);
        let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, 0u64);
        for _ in 0..steps {
            let (p, q) = (a + c, b + d);
            if le(p, q) {
                c = p;
                d = q;
            } else {
                a = p;
                b = q;
            }
        }
        (rat(a as i64, b as i64), rat(c as i64, d as i64))
    }

    #[test]
    fn exact_power_relations() {
        let p = rat(1, 1000);
        assert_eq!(log_ratio(4, 2, &p).unwrap().exact_value(), Some(&rat(1, 2)));
        assert_eq!(log_ratio(2, 2, &p).unwrap().exact_value(), Some(&rat(1, 1)));
        assert_eq!(log_ratio(8, 4, &p).unwrap().exact_value(), Some(&rat(2, 3)));
        assert_eq!(log_ratio(27, 81, &p).unwrap().exact_value(), Some(&rat(4, 3)));
        assert_eq!(perfect_power(64), (2, 6));
        assert_eq!(perfect_power(12), (12, 1));
    }

    #[test]
    fn log3_of_2_against_bracketing_oracle() {
        let prec = rat(1, 1_000_000_000_000);
        let e = log_ratio(3, 2, &prec).unwrap();
        assert!(e.value_hi.clone() - e.value_lo.clone() <= prec);
        let (lo, hi) = power_bracket(3, 2, 25);
        // Oracle bracket and enclosure must overlap, and the oracle midpoint
        // agrees to the oracle's own width.
        assert!(e.value_lo <= hi && lo <= e.value_hi);
        let approx = crate::numeric::to_f64(&e.value_lo);
        assert!((approx - 0.630929753571457).abs() < 1e-14);
    }

    #[test]
    fn enclosures_shrink_and_nest_reference() {
        let mut last: Option<LogEnclosure> = None;
        let (olo, ohi) = power_bracket(10, 7, 25);
        for k in [4, 8, 16, 32, 48] {
            let prec = Rational::new(1.into(), num_bigint::BigInt::from(2u32).pow(k));
            let e = log_ratio(10, 7, &prec).unwrap();
            assert!(e.value_lo <= ohi && olo <= e.value_hi);
            if let Some(prev) = &last {
                assert!(e.value_hi.clone() - e.value_lo.clone() <= prev.value_hi.clone() - prev.value_lo.clone());
            }
            last = Some(e);
        }
    }

    #[test]
    fn rejects_non_positive_precision() {
        assert!(log_ratio(3, 2, &rat(0, 1)).is_err());
        assert!(log_ratio(3, 2, &rat(-1, 2)).is_err());
        assert!(log_ratio(1, 2, &rat(1, 2)).is_err());
    }
}
