use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{floor_int, int, log_ratio, rat, Enclosure, LogEnclosure, Rational};

/// Find `n` with every `n · log_{b_i}(b_1)` within `eps` of an integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignmentProblem {
    pub bases: Vec<u64>,
    #[serde(with = "crate::numeric::serde_rational")]
    pub eps: Rational,
    pub n_max: u64,
}

impl AlignmentProblem {
    pub fn new(bases: Vec<u64>, eps: Rational, n_max: u64) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::InvalidArgument("at least one base is required".into()));
        }
        if let Some(&b) = bases.iter().find(|&&b| b < 2) {
            return Err(Error::InvalidBase(b.to_string()));
        }
        if bases.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("bases must be strictly increasing".into()));
        }
        if eps <= Rational::zero() || eps >= rat(1, 2) {
            return Err(Error::InvalidArgument("eps must lie in (0, 1/2)".into()));
        }
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(AlignmentProblem { bases, eps, n_max })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Alignment {
    pub n: u64,
    /// Nearest integers `m_i` to `n · log_{b_i}(b_1)`, one per base
    /// (`m_1 = n`).
    pub exponents: Vec<u64>,
    /// Enclosures of `|n · log_{b_i}(b_1) - m_i|`.
    pub distances: Vec<Enclosure>,
}

/// `log_{b_i}(b_1)` for every base, exact when the bases are powers of a
/// common integer.
pub fn rotation_vector(bases: &[u64], precision: &Rational) -> Result<Vec<LogEnclosure>> {
    bases.iter().map(|&b| log_ratio(b, bases[0], precision)).collect()
}

enum Decision {
    Yes(u64, Enclosure),
    No,
}

/// Decides `dist(n w, Z) < eps` for `w = log_{b_i}(b_1)`.
fn decide(n: u64, w: &LogEnclosure, b1: u64, bi: u64, eps: &Rational) -> Decision {
    let nn = int(n);
    let lo = &w.value_lo * &nn;
    let hi = &w.value_hi * &nn;
    let m = floor_int(&((&lo + &hi) / int(2) + rat(1, 2)));
    let mr = Rational::from_integer(m.clone());
    let (dlo, dhi) = if lo >= mr {
        (&lo - &mr, &hi - &mr)
    } else if hi <= mr {
        (&mr - &hi, &mr - &lo)
    } else {
        (Rational::zero(), (&mr - &lo).max(&hi - &mr))
    };
    let Some(m_u) = m.to_u64() else { return Decision::No };
    if &dhi < eps {
        return Decision::Yes(m_u, Enclosure::new(dlo, dhi));
    }
    if &dlo >= eps {
        return Decision::No;
    }
    // Undecided by the enclosure: compare integer powers. With eps = p/q,
    // |n w - m| < p/q  iff  b_i^(qm - p) < b_1^(qn) < b_i^(qm + p).
    let (p, q) = (eps.numer(), eps.denom());
    let (Some(p), Some(q)) = (p.to_u32(), q.to_u32()) else { return Decision::No };
    let qn = q as u64 * n;
    let qm = q as u64 * m_u;
    let (Ok(qn), Ok(upper)) = (u32::try_from(qn), u32::try_from(qm + p as u64)) else { return Decision::No };
    let mid = BigUint::from(b1).pow(qn);
    let bi_big = BigUint::from(bi);
    let above = qm < p as u64 || bi_big.pow((qm - p as u64) as u32) < mid;
    let below = mid < bi_big.pow(upper);
    if above && below {
        Decision::Yes(m_u, Enclosure::new(dlo, dhi))
    } else {
        Decision::No
    }
}

fn precision_for(n_max: u64) -> Rational {
    let bits = 64 + (64 - n_max.leading_zeros());
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

fn check(n: u64, p: &AlignmentProblem, ws: &[LogEnclosure]) -> Option<Alignment> {
    let mut exponents = vec![n];
    let mut distances = vec![Enclosure::exact(Rational::zero())];
    for (i, w) in ws.iter().enumerate().skip(1) {
        match decide(n, w, p.bases[0], p.bases[i], &p.eps) {
            Decision::Yes(m, d) => {
                exponents.push(m);
                distances.push(d);
            }
            Decision::No => return None,
        }
    }
    Some(Alignment { n, exponents, distances })
}

/// Checks a prescribed `n`.
pub fn alignment_at(p: &AlignmentProblem, n: u64) -> Result<Option<Alignment>> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let ws = rotation_vector(&p.bases, &precision_for(n.max(p.n_max)))?;
    Ok(check(n, p, &ws))
}

/// Smallest `n` in `[1, n_max]` satisfying the tolerance for every base.
pub fn find_alignment(p: &AlignmentProblem) -> Result<Alignment> {
    let ws = rotation_vector(&p.bases, &precision_for(p.n_max))?;
    if ws.iter().all(LogEnclosure::is_exact) {
        // Rational rotation: the first n clearing all denominators works,
        // but a smaller n may already be within eps.
        let lcm = ws.iter().fold(BigInt::one(), |acc, w| num_integer::lcm(acc, w.value_lo.denom().clone()));
        if lcm.is_positive() && lcm <= BigInt::from(p.n_max) {
            let limit = lcm.to_u64().expect("bounded by n_max");
            return (1..=limit)
                .find_map(|n| check(n, p, &ws))
                .ok_or(Error::AlignmentNotFound(p.n_max));
        }
    }
    (1..=p.n_max)
        .into_par_iter()
        .find_map_first(|n| check(n, p, &ws))
        .ok_or(Error::AlignmentNotFound(p.n_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact oracle: |n log_bi(b1) - m| < p/q for some m iff
    /// bi^(qm - p) < b1^(qn) < bi^(qm + p).
    fn aligned_exact(n: u64, b1: u64, bi: u64, p: u32, q: u32) -> bool {
        let mid = BigUint::from(b1).pow(q * n as u32);
        // Only the integers next to the float estimate can qualify.
        let approx = (n as f64 * (b1 as f64).ln() / (bi as f64).ln()).round() as u64;
        (approx.saturating_sub(1)..=approx + 1).any(|m| {
            let lo_e = q as i64 * m as i64 - p as i64;
            let hi_e = (q as u64 * m + p as u64) as u32;
            let above = lo_e < 0 || BigUint::from(bi).pow(lo_e as u32) < mid;
            above && mid < BigUint::from(bi).pow(hi_e)
        })
    }

    #[test]
    fn power_relation_is_exact() {
        let p = AlignmentProblem::new(vec![2, 4], rat(1, 100), 10).unwrap();
        let a = find_alignment(&p).unwrap();
        assert_eq!(a.n, 2);
        assert_eq!(a.exponents, vec![2, 1]);
        assert!(a.distances[1].is_exact());
    }

    #[test]
    fn two_three_needs_84() {
        let p = AlignmentProblem::new(vec![2, 3], rat(1, 100), 1000).unwrap();
        let a = find_alignment(&p).unwrap();
        assert_eq!(a.n, 84);
        assert_eq!(a.exponents, vec![84, 53]);
        for n in 1..84 {
            assert!(!aligned_exact(n, 2, 3, 1, 100), "n = {n}");
        }
        assert!(aligned_exact(84, 2, 3, 1, 100));
    }

    #[test]
    fn neighbouring_bases_align_at_once() {
        for b in [100u64, 1000, 52_012_851] {
            let p = AlignmentProblem::new(vec![b, b + 1], rat(1, 10), 5).unwrap();
            let a = find_alignment(&p).unwrap();
            assert_eq!(a.n, 1);
            assert_eq!(a.exponents, vec![1, 1]);
        }
    }

    #[test]
    fn not_found_within_bound() {
        let p = AlignmentProblem::new(vec![2, 3], rat(1, 100), 83).unwrap();
        assert_eq!(find_alignment(&p), Err(Error::AlignmentNotFound(83)));
    }

    #[test]
    fn prescribed_n() {
        let p = AlignmentProblem::new(vec![2, 3], rat(1, 100), 100).unwrap();
        assert!(alignment_at(&p, 84).unwrap().is_some());
        assert!(alignment_at(&p, 83).unwrap().is_none());
    }

    #[test]
    fn invalid_problems() {
        assert!(AlignmentProblem::new(vec![3, 2], rat(1, 10), 5).is_err());
        assert!(AlignmentProblem::new(vec![2, 3], rat(1, 2), 5).is_err());
        assert!(AlignmentProblem::new(vec![1, 3], rat(1, 10), 5).is_err());
        assert!(AlignmentProblem::new(vec![2, 3], rat(1, 10), 0).is_err());
    }

    #[test]
    fn three_bases_minimal() {
        let p = AlignmentProblem::new(vec![2, 3, 5], rat(1, 20), 100_000).unwrap();
        let a = find_alignment(&p).unwrap();
        for n in 1..a.n {
            let ok = aligned_exact(n, 2, 3, 1, 20) && aligned_exact(n, 2, 5, 1, 20);
            assert!(!ok, "n = {n} also qualifies");
        }
        assert!(aligned_exact(a.n, 2, 3, 1, 20) && aligned_exact(a.n, 2, 5, 1, 20));
    }
}
