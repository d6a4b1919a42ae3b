use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::constants::k2_constant;
use crate::error::{Error, Result};
use crate::numeric::{int, Enclosure, Interval, Rational, DEFAULT_BITS};
use crate::thickness::Thickness;

/// Convex region in `R^d`: an interval (d = 1), an axis-parallel box or a
/// Euclidean ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interval(Interval),
    Box(Vec<Interval>),
    Ball {
        #[serde(with = "crate::numeric::serde_rational::vec")]
        center: Vec<Rational>,
        #[serde(serialize_with = "crate::numeric::serde_rational::serialize")]
        radius: Rational,
    },
}

impl Region {
    fn dimension(&self) -> usize {
        match self {
            Region::Interval(_) => 1,
            Region::Box(b) => b.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    /// Exact diameter, where one exists (not for boxes in dimension > 1).
    fn diameter(&self) -> Option<Rational> {
        match self {
            Region::Interval(i) => Some(i.length()),
            Region::Box(b) if b.len() == 1 => Some(b[0].length()),
            Region::Box(_) => None,
            Region::Ball { radius, .. } => Some(radius * int(2)),
        }
    }

    /// Whether `inner` is contained in `self`.
    fn contains(&self, inner: &Region) -> Result<bool> {
        let as_ball = |r: &Region| match r {
            Region::Interval(i) => Some((vec![(i.lo() + i.hi()) / int(2)], i.length() / int(2))),
            Region::Ball { center, radius } => Some((center.clone(), radius.clone())),
            Region::Box(_) => None,
        };
        let (c, r) = as_ball(inner)
            .ok_or_else(|| Error::InvalidArgument("the common ball must be an interval or a ball".into()))?;
        Ok(match self {
            Region::Interval(i) => i.lo() <= &(&c[0] - &r) && &(&c[0] + &r) <= i.hi(),
            Region::Box(b) => b.iter().zip(&c).all(|(i, x)| i.lo() <= &(x - &r) && &(x + &r) <= i.hi()),
            Region::Ball { center, radius } => {
                let d2 = center.iter().zip(&c).fold(Rational::zero(), |acc, (a, b)| acc + (a - b) * (a - b));
                let slack = radius - &r;
                !slack.is_negative() && d2 <= &slack * &slack
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FYSet {
    pub thickness: Thickness,
    #[serde(with = "crate::numeric::serde_rational")]
    pub diameter: Rational,
    pub hull: Region,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FYInstance {
    pub dimension: u32,
    pub sets: Vec<FYSet>,
    pub ball: Region,
    #[serde(with = "crate::numeric::serde_rational")]
    pub c: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FYCertificate {
    pub instance: FYInstance,
    #[serde(with = "crate::numeric::serde_rational")]
    pub k2: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub beta: Rational,
    /// `Σ τ_i^{-c}`.
    pub lhs: Enclosure,
    /// `β^c (1 - β^{1-c}) / K₂`.
    pub rhs: Enclosure,
    pub verdict: Verdict,
    /// `rhs.lo - lhs.hi`; nonnegative exactly when the verdict is a pass.
    #[serde(with = "crate::numeric::serde_rational")]
    pub margin: Rational,
    pub failed_condition: Option<String>,
    pub bits: u32,
}

fn validate(inst: &FYInstance) -> Result<()> {
    let d = inst.dimension as usize;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if inst.sets.is_empty() {
        return Err(Error::InvalidArgument("at least one set is required".into()));
    }
    if inst.c <= Rational::zero() || inst.c >= int(inst.dimension) {
        return Err(Error::InvalidArgument("exponent c must lie in (0, d)".into()));
    }
    if inst.ball.dimension() != d || inst.sets.iter().any(|s| s.hull.dimension() != d) {
        return Err(Error::InvalidArgument("region dimensions do not match".into()));
    }
    for (i, s) in inst.sets.iter().enumerate() {
        if s.thickness <= Thickness::Finite(Rational::zero()) {
            return Err(Error::InvalidArgument(format!("set {i} has non-positive thickness")));
        }
        if !s.diameter.is_positive() {
            return Err(Error::InvalidArgument(format!("set {i} has non-positive diameter")));
        }
    }
    Ok(())
}

/// Evaluates the criterion at the default precision, refining while the
/// comparison is undecided.
pub fn check_fy(inst: &FYInstance) -> Result<FYCertificate> {
    check_fy_refining(inst, DEFAULT_BITS)
}

/// Like [`check_fy`], starting from `bits` instead of the default.
pub fn check_fy_refining(inst: &FYInstance, bits: u32) -> Result<FYCertificate> {
    let mut bits = bits.max(16);
    let cap = bits.max(4096);
    loop {
        let cert = check_fy_with_bits(inst, bits)?;
        let undecided = cert.verdict == Verdict::Fail
            && cert.failed_condition.as_deref() == Some(CONDITION_3)
            && cert.lhs.lo() <= cert.rhs.hi();
        if !undecided || bits >= cap {
            return Ok(cert);
        }
        bits *= 2;
    }
}

const CONDITION_3: &str = "condition 3: sum of tau_i^-c exceeds beta^c (1 - beta^(1-c)) / K2";

pub fn check_fy_with_bits(inst: &FYInstance, bits: u32) -> Result<FYCertificate> {
    validate(inst)?;
    let ball_diam = inst
        .ball
        .diameter()
        .ok_or_else(|| Error::InvalidArgument("the common ball must be an interval or a ball".into()))?;
    let sup_diam = inst.sets.iter().map(|s| s.diameter.clone()).max().expect("nonempty");
    let beta = (&ball_diam / &sup_diam).min(Rational::new(1.into(), 4.into()));
    let k2 = k2_constant(inst.dimension);
    let c = Enclosure::exact(inst.c.clone());

    let mut lhs = Enclosure::exact(Rational::zero());
    for s in &inst.sets {
        if let Thickness::Finite(t) = &s.thickness {
            let term = Enclosure::exact(t.clone()).powr(&-&c, bits)?;
            lhs = &lhs + &term;
        }
    }
    let rhs = if beta.is_positive() {
        let b = Enclosure::exact(beta.clone());
        let bc = b.powr(&c, bits)?;
        let one_minus_c = Enclosure::exact(Rational::one() - &inst.c);
        let tail = &Enclosure::exact(Rational::one()) - &b.powr(&one_minus_c, bits)?;
        (&bc * &tail).scale(&k2.recip())
    } else {
        Enclosure::exact(Rational::zero())
    };
    let lhs = lhs.round_out(bits + 16);
    let rhs = rhs.round_out(bits + 16);

    let mut failed = None;
    for (i, s) in inst.sets.iter().enumerate() {
        if !s.hull.contains(&inst.ball)? {
            failed = Some(format!("condition 2: ball not contained in the hull of set {i}"));
            break;
        }
    }
    let margin = rhs.lo() - lhs.hi();
    if failed.is_none() && margin.is_negative() {
        failed = Some(CONDITION_3.to_string());
    }
    Ok(FYCertificate {
        instance: inst.clone(),
        k2,
        beta,
        lhs,
        rhs,
        verdict: if failed.is_none() { Verdict::Pass } else { Verdict::Fail },
        margin,
        failed_condition: failed,
        bits,
    })
}
