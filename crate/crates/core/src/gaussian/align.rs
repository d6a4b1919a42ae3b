use num_traits::Signed;
use serde::Serialize;

use super::int::{GaussRational, GaussianInt};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussAlignment {
    pub l1: u32,
    pub l2: u32,
    /// `b1^l1 / b2^l2`, exactly.
    pub ratio: GaussRational,
    /// `|ratio - 1|^2`, exactly.
    #[serde(serialize_with = "ser_rat")]
    pub distance_sq: Rational,
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// `|b1^l1 - b2^l2|^2 < eps^2 N(b2)^l2`, decided in integers.
fn exact_close(p1: &GaussianInt, p2: &GaussianInt, eps: &Rational) -> bool {
    let diff = (p1 - p2).norm();
    let lhs = Rational::from_integer(diff) * Rational::from_integer(eps.denom() * eps.denom());
    let rhs = Rational::from_integer(eps.numer() * eps.numer() * p2.norm());
    lhs < rhs
}

/// Smallest `(l1, l2)`, ordered by `l1 + l2` then `l1`, with
/// `|b1^l1 / b2^l2 - 1| < eps` and `l1 + l2 <= bound`.
///
/// The log map `(log|z|, arg z)` screens candidates in floating point with a
/// generous margin; survivors are decided exactly.
pub fn gauss_alignment(b1: &GaussianInt, b2: &GaussianInt, eps: &Rational, bound: u32) -> Result<GaussAlignment> {
    for b in [b1, b2] {
        if b.is_zero() || b.is_unit() {
            return Err(Error::InvalidBase(format!("{b} is zero or a unit")));
        }
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let lg = |b: &GaussianInt| {
        let [x, y] = b.to_f64();
        (x.hypot(y).ln(), y.atan2(x))
    };
    let (r1, t1) = lg(b1);
    let (r2, t2) = lg(b2);
    let eps_f = crate::numeric::to_f64(eps);
    let tau = std::f64::consts::TAU;
    let mut pow1: Vec<GaussianInt> = vec![GaussianInt::one()];
    let mut pow2: Vec<GaussianInt> = vec![GaussianInt::one()];
    for s in 2..=bound {
        for l1 in 1..s {
            let l2 = s - l1;
            let log_mod = l1 as f64 * r1 - l2 as f64 * r2;
            let mut arg = (l1 as f64 * t1 - l2 as f64 * t2).rem_euclid(tau);
            if arg > tau / 2.0 {
                arg -= tau;
            }
            // |e^{a + iθ} - 1| is at least |e^a - 1| and at least the
            // distance from 1 to the ray of angle θ.
            let ray = if arg.abs() <= tau / 4.0 { arg.sin().abs() } else { 1.0 };
            let approx = (log_mod.exp() - 1.0).abs().max(ray);
            let slack = 1e-9 * (1.0 + s as f64) * (1.0 + log_mod.abs().exp());
            if approx > 2.0 * eps_f + slack && approx.is_finite() {
                continue;
            }
            while pow1.len() <= l1 as usize {
                let next = pow1.last().expect("seeded") * b1;
                pow1.push(next);
            }
            while pow2.len() <= l2 as usize {
                let next = pow2.last().expect("seeded") * b2;
                pow2.push(next);
            }
            let (p1, p2) = (&pow1[l1 as usize], &pow2[l2 as usize]);
            if exact_close(p1, p2, eps) {
                let ratio = GaussRational::quotient(p1, p2);
                let distance_sq = Rational::new((p1 - p2).norm(), p2.norm());
                return Ok(GaussAlignment { l1, l2, ratio, distance_sq });
            }
        }
    }
    Err(Error::AlignmentNotFound(bound as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    use crate::numeric::{int, rat};

    fn g(s: &str) -> GaussianInt {
        s.parse().unwrap()
    }

    #[test]
    fn associated_bases_align_exactly() {
        let a = gauss_alignment(&g("1+2i"), &g("2-i"), &rat(1, 1_000_000), 40).unwrap();
        assert_eq!((a.l1, a.l2), (4, 4));
        assert_eq!(a.ratio, GaussRational { re: int(1), im: int(0) });
        assert!(a.distance_sq.is_zero());
        // With a loose tolerance, (1+2i)/(2-i) = i is already close enough.
        let a = gauss_alignment(&g("1+2i"), &g("2-i"), &rat(3, 2), 40).unwrap();
        assert_eq!((a.l1, a.l2), (1, 1));
    }

    #[test]
    fn equal_bases() {
        let a = gauss_alignment(&g("3+2i"), &g("3+2i"), &rat(1, 1000), 10).unwrap();
        assert_eq!((a.l1, a.l2), (1, 1));
    }

    #[test]
    fn result_matches_exhaustive_exact_search() {
        let (b1, b2) = (g("1+2i"), g("2+i"));
        let eps = rat(1, 5);
        let a = gauss_alignment(&b1, &b2, &eps, 60).unwrap();
        let mut best = None;
        'outer: for s in 2..=60u32 {
            for l1 in 1..s {
                if exact_close(&b1.pow(l1), &b2.pow(s - l1), &eps) {
                    best = Some((l1, s - l1));
                    break 'outer;
                }
            }
        }
        assert_eq!(Some((a.l1, a.l2)), best);
        assert!(a.distance_sq < &eps * &eps);
    }

    #[test]
    fn unequal_norms_and_bounds() {
        let a = gauss_alignment(&g("1+i"), &g("2"), &rat(1, 100), 40).unwrap();
        // (1+i)^2 = 2i, so (1+i)^8 / 2^4 = 1.
        assert_eq!((a.l1, a.l2), (8, 4));
        assert_eq!(gauss_alignment(&g("1+i"), &g("2"), &rat(1, 100), 11), Err(Error::AlignmentNotFound(11)));
        assert!(gauss_alignment(&g("i"), &g("2"), &rat(1, 100), 11).is_err());
    }
}
