use std::collections::BTreeSet;

use num_traits::Signed;
use serde::Serialize;

use super::expand::{gauss_expand, Outcome, Termination};
use super::int::{GaussianDigitSystem, GaussianInt};
use crate::error::{Error, Result};
use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pruned {
    pub digits: Vec<GaussianInt>,
    pub removed: Vec<GaussianInt>,
}

/// Drops the digits closer than `eps |b|` to a corner `0, b, ib, b + ib` of
/// the canonical fundamental parallelogram.
pub fn small_digit_prune(sys: &GaussianDigitSystem, eps: &Rational) -> Result<Pruned> {
    if !eps.is_positive() || eps >= &Rational::new(1.into(), 2.into()) {
        return Err(Error::InvalidArgument("eps must lie in (0, 1/2)".into()));
    }
    let b = &sys.base;
    let ib = &GaussianInt::i() * b;
    let corners = [GaussianInt::zero(), b.clone(), ib.clone(), b + &ib];
    // N(d - c) < eps^2 N(b), cleared of denominators.
    let limit = eps.numer() * eps.numer() * b.norm();
    let den = eps.denom() * eps.denom();
    let (removed, digits): (Vec<GaussianInt>, Vec<GaussianInt>) =
        sys.digits.iter().cloned().partition(|d| corners.iter().any(|c| (d - c).norm() * &den < limit));
    if digits.is_empty() {
        return Err(Error::InvalidDigits("pruning removes every digit".into()));
    }
    Ok(Pruned { digits, removed })
}

/// Accepted when the expansion stops at `0` or `1` and avoids `missing`.
fn accepts(z: &GaussianInt, sys: &GaussianDigitSystem, missing: &GaussianInt) -> bool {
    let e = gauss_expand(z, sys, Termination::ZeroOrUnit);
    match &e.outcome {
        Outcome::Terminated { u } => (u.is_zero() || *u == GaussianInt::one()) && !e.digits.contains(missing),
        Outcome::Cycle { .. } => false,
    }
}

/// Nonzero `z` whose expansions in both systems end in `0` or `1` and avoid
/// the respective missing digit.
///
/// Candidates are `u b1^k + Σ_{j<k} r_j b1^j` with `u ∈ {0, 1}`, `k <=
/// max_digits` and `r_j ≠ missing1`; each is then re-expanded in both
/// systems, so the result does not depend on how the candidates were
/// produced. Sorted by `(norm, re, im)`.
pub fn gauss_search_common(
    sys1: &GaussianDigitSystem,
    sys2: &GaussianDigitSystem,
    missing1: &GaussianInt,
    missing2: &GaussianInt,
    max_digits: u32,
) -> Result<Vec<GaussianInt>> {
    for (sys, m) in [(sys1, missing1), (sys2, missing2)] {
        if sys.index_of(m).is_none() {
            return Err(Error::InvalidDigits(format!("{m} is not a digit of base {}", sys.base)));
        }
    }
    let d: Vec<GaussianInt> = sys1.digits.iter().filter(|x| *x != missing1).cloned().collect();
    if d.is_empty() {
        return Err(Error::InvalidDigits("no digits remain".into()));
    }
    if max_digits > 12 {
        return Err(Error::InvalidArgument("at most 12 digits".into()));
    }
    // Sums of exactly k digits, so the leading 1 lands at b1^k.
    let mut by_len: Vec<Vec<GaussianInt>> = vec![vec![GaussianInt::zero()]];
    for k in 1..=max_digits {
        let bk = sys1.base.pow(k - 1);
        let steps: Vec<GaussianInt> = d.iter().map(|r| r * &bk).collect();
        let mut next: Vec<GaussianInt> =
            by_len[k as usize - 1].iter().flat_map(|s| steps.iter().map(move |t| s + t)).collect();
        next.sort_by_key(GaussianInt::sort_key);
        next.dedup();
        by_len.push(next);
    }
    let mut candidates = BTreeSet::new();
    for (k, layer) in by_len.iter().enumerate() {
        let lead = sys1.base.pow(k as u32);
        for s in layer {
            for z in [s.clone(), s + &lead] {
                if !z.is_zero() {
                    candidates.insert(z.sort_key());
                }
            }
        }
    }
    let out: Vec<GaussianInt> = candidates
        .into_iter()
        .map(|(_, re, im)| GaussianInt { re, im })
        .filter(|z| accepts(z, sys1, missing1) && accepts(z, sys2, missing2))
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::int::residue_system;
    use super::*;
    use crate::numeric::rat;

    fn g(s: &str) -> GaussianInt {
        s.parse().unwrap()
    }

    #[test]
    fn pruning_near_corners() {
        let sys = residue_system(&g("4+3i")).unwrap();
        let tiny = small_digit_prune(&sys, &rat(1, 1000)).unwrap();
        // Only the corner 0 is itself a digit.
        assert_eq!(tiny.removed, vec![g("0")]);
        for eps in [rat(1, 10), rat(1, 4), rat(2, 5)] {
            let p = small_digit_prune(&sys, &eps).unwrap();
            assert_eq!(p.digits.len() + p.removed.len(), 25);
            let r = crate::numeric::to_f64(&eps) * 5.0;
            assert!(p.removed.len() as f64 <= 4.0 * (r.ceil() + 1.0).powi(2));
            let b = &sys.base;
            let ib = &GaussianInt::i() * b;
            let corners = [GaussianInt::zero(), b.clone(), ib.clone(), b + &ib];
            for d in &p.digits {
                for c in &corners {
                    let [x, y] = (d - c).to_f64();
                    assert!(x.hypot(y) >= r - 1e-12);
                }
            }
        }
        assert!(small_digit_prune(&sys, &rat(1, 2)).is_err());
    }

    #[test]
    fn common_search() {
        let s1 = residue_system(&g("1+2i")).unwrap();
        let s2 = residue_system(&g("2+i")).unwrap();
        let out = gauss_search_common(&s1, &s2, &g("0"), &g("0"), 6).unwrap();
        assert!(out.contains(&g("1")));
        assert!(out.len() > 1, "{out:?}");
        for z in &out {
            for (sys, m) in [(&s1, g("0")), (&s2, g("0"))] {
                let e = gauss_expand(z, sys, Termination::ZeroOrUnit);
                let u = e.unit().unwrap();
                assert!(u.is_zero() || *u == GaussianInt::one());
                assert!(!e.digits.contains(&m));
                assert_eq!(super::super::expand::reconstruct(&e, &sys.base).as_ref(), Some(z));
            }
        }
        for w in out.windows(2) {
            assert!(w[0].sort_key() < w[1].sort_key());
        }
    }

    #[test]
    fn missing_digit_must_belong() {
        let s1 = residue_system(&g("1+2i")).unwrap();
        assert!(gauss_search_common(&s1, &s1, &g("7"), &g("0"), 3).is_err());
    }
}
