use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::align::Alignment;
use crate::error::{Error, Result};
use crate::expansions::MissingDigitSpec;
use crate::numeric::{ceil_int, floor_int, format_rational, int, rat, Interval, Rational};

/// The piece of `b_i^(m_i + 1) · C_{b_i, D_i}` kept for base `b_i`: the
/// hull runs from `left` and the set is cut at `right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Window {
    pub index: usize,
    pub base: u64,
    pub n: u64,
    pub exponent: u64,
    /// `b_i^(m_i) / b_1^n`.
    #[serde(with = "crate::numeric::serde_rational")]
    pub v: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub left: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub right: Rational,
    /// Hull of the uncut scaled set.
    pub hull: Interval,
    /// Length of the largest first-level gaps of the scaled set.
    #[serde(with = "crate::numeric::serde_rational")]
    pub largest_gap: Rational,
}

impl Window {
    pub fn interval(&self) -> Interval {
        Interval::new(self.left.clone(), self.right.clone()).expect("checked on construction")
    }
}

/// Left endpoint and length of the largest first-level gap of
/// `scale · C_{b,D}` whose left endpoint is closest to `target` (ties go to
/// the smaller endpoint), without materializing the level set.
pub fn nearest_largest_gap(spec: &MissingDigitSpec, scale: &Rational, target: &Rational) -> Result<(Rational, Rational)> {
    let b = spec.base();
    let (dmin, dmax) = spec.allowed_range().ok_or_else(|| Error::InvalidDigits("no allowed digits".into()))?;
    let bq = int(b);
    let unit = scale / &bq;
    // Part for digit c: unit · [c + dmin/(b-1), c + dmax/(b-1)].
    let off_hi = rat(dmax as i64, b as i64 - 1);
    let off_lo = rat(dmin as i64, b as i64 - 1);
    let spread = &off_hi - &off_lo;
    // Steps between consecutive allowed digits inside [dmin, dmax].
    let interior: Vec<u64> = spec.missing().iter().copied().filter(|&d| d > dmin && d < dmax).collect();
    let mut runs: Vec<(u64, u64)> = Vec::new();
    for d in interior {
        match runs.last_mut() {
            Some((start, len)) if *start + *len == d => *len += 1,
            _ => runs.push((d, 1)),
        }
    }
    let step = runs.iter().map(|&(_, l)| l + 1).max().unwrap_or(1);
    let gap = &unit * (int(step) - &spread);
    if !gap.is_positive() {
        return Err(Error::NoGap);
    }
    let ell = |c: u64| &unit * (int(c) + &off_hi);
    let pick = |cands: Vec<u64>| -> Rational {
        cands
            .into_iter()
            .map(ell)
            .min_by(|a, b| {
                let da = (a - target).abs();
                let db = (b - target).abs();
                da.cmp(&db).then_with(|| a.cmp(b))
            })
            .expect("at least one candidate")
    };
    let left = if step > 1 {
        pick(runs.iter().filter(|&&(_, l)| l + 1 == step).map(|&(s, _)| s - 1).collect())
    } else {
        if dmax == dmin {
            return Err(Error::NoGap);
        }
        // Candidates c = dmin .. dmax-1 with ell(c) affine in c.
        let x = target / &unit - &off_hi;
        let clamp = |v: BigInt| -> u64 {
            let lo = BigInt::from(dmin);
            let hi = BigInt::from(dmax - 1);
            u64::try_from(v.clamp(lo, hi)).expect("within digit range")
        };
        let mut cands = vec![clamp(floor_int(&x)), clamp(ceil_int(&x))];
        cands.dedup();
        pick(cands)
    };
    Ok((left, gap))
}

/// Windows for every base at the alignment `n`.
///
/// The set for base `b_i` is `b_i^(m_i + 1) · C_{b_i, D_i}`; for `i >= 2` it
/// is cut at the largest-gap left endpoint nearest `b_1^(n+1)`, which must
/// lie within `b_1^n / 2` of it; every left endpoint must stay below
/// `(4/3) b_1^n`.
pub fn build_windows(specs: &[MissingDigitSpec], alignment: &Alignment) -> Result<Vec<Window>> {
    if specs.len() != alignment.exponents.len() {
        return Err(Error::InvalidArgument("one spec per aligned base is required".into()));
    }
    let b1 = int(specs[0].base());
    let n = alignment.n;
    let b1n = b1.pow(n as i32);
    let target = &b1n * &b1;
    let half = &b1n / int(2);
    let four_thirds = &b1n * rat(4, 3);
    let mut out = Vec::with_capacity(specs.len());
    for (i, (spec, &m)) in specs.iter().zip(&alignment.exponents).enumerate() {
        let b = spec.base();
        let bq = int(b);
        let v = bq.pow(m as i32) / &b1n;
        if v <= rat(3, 4) || v >= rat(4, 3) {
            return Err(Error::WindowBound(format!(
                "base {b}: perturbation v = {} is outside (3/4, 4/3)",
                format_rational(&v)
            )));
        }
        let scale = bq.pow(m as i32 + 1);
        let (dmin, dmax) = spec.allowed_range().ok_or_else(|| Error::InvalidDigits("no allowed digits".into()))?;
        let hull = Interval::new(
            &scale * rat(dmin as i64, b as i64 - 1),
            &scale * rat(dmax as i64, b as i64 - 1),
        )?;
        let (right, largest_gap) = if i == 0 {
            let (_, g) = nearest_largest_gap(spec, &scale, &target)?;
            (hull.hi().clone(), g)
        } else {
            nearest_largest_gap(spec, &scale, &target)?
        };
        let left = hull.lo().clone();
        if (&right - &target).abs() > half {
            return Err(Error::WindowBound(format!(
                "base {b}: right cut {} is farther than b_1^n/2 from b_1^(n+1)",
                format_rational(&right)
            )));
        }
        if left > four_thirds {
            return Err(Error::WindowBound(format!(
                "base {b}: left end {} exceeds (4/3) b_1^n",
                format_rational(&left)
            )));
        }
        if right <= left {
            return Err(Error::WindowBound(format!("base {b}: empty window")));
        }
        out.push(Window { index: i, base: b, n, exponent: m, v, left, right, hull, largest_gap });
    }
    Ok(out)
}

/// `v_i · b_1^n` is the integer `b_i^(m_i)`.
#[cfg(test)]
fn scaled_v_is_power(w: &Window, b1: u64) -> bool {
    &w.v * int(b1).pow(w.n as i32) == int(BigInt::from(w.base).pow(w.exponent as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fy::{find_alignment, AlignmentProblem};
    use crate::thickness::{level_set, truncate_right_at_gap, LevelSetSpec};

    #[test]
    fn analytic_gap_matches_enumeration() {
        let cases: &[(u64, &[u64])] = &[(10, &[0]), (10, &[0, 5]), (7, &[0, 3]), (11, &[0, 2, 3, 7]), (9, &[0, 8])];
        for &(b, missing) in cases {
            let spec = MissingDigitSpec::new(b, missing.iter().copied()).unwrap();
            for scale_exp in 0..3i64 {
                let u = level_set(&LevelSetSpec::new(spec.clone(), scale_exp, 1).unwrap()).unwrap();
                let scale = int(b).pow(scale_exp as i32);
                for t in 0..=(2 * b as i64) {
                    let target = &scale * rat(t, 2 * b as i64);
                    let (_, cut) = truncate_right_at_gap(&u, &target).unwrap();
                    let (ell, gap) = nearest_largest_gap(&spec, &scale, &target).unwrap();
                    assert_eq!(ell, cut, "b={b} missing={missing:?} t={t}");
                    let max = u.gaps().iter().map(Interval::length).max().unwrap();
                    assert_eq!(gap, max);
                }
            }
        }
    }

    #[test]
    fn neighbouring_bases_windows() {
        let specs = vec![MissingDigitSpec::new(100, [0]).unwrap(), MissingDigitSpec::new(101, [0]).unwrap()];
        let p = AlignmentProblem::new(vec![100, 101], rat(1, 20), 3).unwrap();
        let a = find_alignment(&p).unwrap();
        let w = build_windows(&specs, &a).unwrap();
        assert_eq!(w[0].v, int(1));
        assert_eq!(w[0].left, rat(100 * 100, 99));
        assert_eq!(w[0].right, int(10_000));
        assert_eq!(w[1].v, rat(101, 100));
        assert_eq!(w[1].left, rat(101 * 101, 100));
        // Gap left endpoints of 101^2 C_{101,0} are 101 (c + 1); nearest to 100^2 is 101 * 99.
        assert_eq!(w[1].right, int(101 * 99));
        for x in &w {
            assert!((&x.right - int(10_000)).abs() <= int(50));
            assert!(x.left <= rat(400, 3));
            assert!(scaled_v_is_power(x, 100));
        }
        let ball = w.iter().map(|x| x.left.clone()).max().unwrap();
        let ball = w.iter().map(|x| x.right.clone()).min().unwrap() - ball;
        let sup = w.iter().map(|x| &x.right - &x.left).max().unwrap();
        assert!(ball >= int(10_000) * rat(13, 24));
        assert!(ball / sup >= rat(13, 27));
    }

    #[test]
    fn bad_alignment_is_rejected() {
        let specs = vec![MissingDigitSpec::new(10, [0]).unwrap(), MissingDigitSpec::new(11, [0]).unwrap()];
        let a = Alignment { n: 1, exponents: vec![1, 0], distances: vec![] };
        assert!(matches!(build_windows(&specs, &a), Err(Error::WindowBound(_))));
    }
}
