use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    pub fn units() -> [GaussianInt; 4] {
        [Self::new(1, 0), Self::new(-1, 0), Self::new(0, 1), Self::new(0, -1)]
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussianInt { re: self.re.clone(), im: -&self.im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `self / d` when `d` divides `self`.
    pub fn div_exact(&self, d: &GaussianInt) -> Option<GaussianInt> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let p = self * &d.conj();
        let (qr, rr) = p.re.div_rem(&n);
        let (qi, ri) = p.im.div_rem(&n);
        (rr.is_zero() && ri.is_zero()).then_some(GaussianInt { re: qr, im: qi })
    }

    pub fn divides(&self, z: &GaussianInt) -> bool {
        z.div_exact(self).is_some()
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN)]
    }

    /// Total order used for deterministic listings: norm, then real part,
    /// then imaginary part.
    pub fn sort_key(&self) -> (BigInt, BigInt, BigInt) {
        (self.norm(), self.re.clone(), self.im.clone())
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &BigInt| -> String {
            if im.is_one() {
                "i".to_string()
            } else if *im == -BigInt::one() {
                "-i".to_string()
            } else {
                format!("{im}i")
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}{}", self.re, im_part(&self.im))
                } else {
                    write!(f, "{}+{}", self.re, im_part(&self.im))
                }
            }
        }
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    /// Accepts `a`, `bi`, `a+bi`, `a-bi`, with `i` standing for `1i`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidArgument(format!("cannot parse Gaussian integer {s:?}"));
        if t.is_empty() {
            return Err(bad());
        }
        let coeff = |c: &str| -> Result<BigInt> {
            match c {
                "" | "+" => Ok(BigInt::one()),
                "-" => Ok(-BigInt::one()),
                _ => c.parse().map_err(|_| bad()),
            }
        };
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussianInt { re: t.parse().map_err(|_| bad())?, im: BigInt::zero() });
        };
        // Split at the last sign that is not the leading one.
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(k, _)| k).last();
        match split {
            Some(k) => {
                let re: BigInt = body[..k].parse().map_err(|_| bad())?;
                Ok(GaussianInt { re, im: coeff(&body[k..])? })
            }
            None => Ok(GaussianInt { re: BigInt::zero(), im: coeff(body)? }),
        }
    }
}

impl Serialize for GaussianInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, o: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -&self.re, im: -&self.im }
    }
}

/// Element of `Q(i)`, used for exact cell centers and rotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    /// `z / d`.
    pub fn quotient(z: &GaussianInt, d: &GaussianInt) -> Self {
        let n = d.norm();
        let p = z * &d.conj();
        GaussRational { re: Rational::new(p.re, n.clone()), im: Rational::new(p.im, n) }
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [crate::numeric::to_f64(&self.re), crate::numeric::to_f64(&self.im)]
    }
}

impl Serialize for GaussRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.re), format_rational(&self.im)].serialize(s)
    }
}

/// A base and one representative per residue class modulo it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussianDigitSystem {
    pub base: GaussianInt,
    pub digits: Vec<GaussianInt>,
    #[serde(skip)]
    class: HashMap<(BigInt, BigInt), usize>,
}

/// Residue class of `z` modulo `b`: `z conj(b)` reduced mod `N(b)` in both
/// coordinates. Two integers are congruent iff their keys agree.
fn class_key(z: &GaussianInt, b: &GaussianInt, n: &BigInt) -> (BigInt, BigInt) {
    let p = z * &b.conj();
    (p.re.mod_floor(n), p.im.mod_floor(n))
}

fn check_base(b: &GaussianInt) -> Result<()> {
    if b.is_zero() || b.is_unit() {
        return Err(Error::InvalidBase(format!("{b} is zero or a unit")));
    }
    Ok(())
}

impl GaussianDigitSystem {
    /// Validates that `digits` is a complete residue system modulo `base`.
    pub fn new(base: GaussianInt, digits: Vec<GaussianInt>) -> Result<Self> {
        check_base(&base)?;
        let n = base.norm();
        if BigInt::from(digits.len()) != n {
            return Err(Error::InvalidDigits(format!("{} digits given, N({base}) = {n}", digits.len())));
        }
        let mut class = HashMap::with_capacity(digits.len());
        for (k, d) in digits.iter().enumerate() {
            if let Some(j) = class.insert(class_key(d, &base, &n), k) {
                return Err(Error::InvalidDigits(format!("{} and {d} are congruent modulo {base}", digits[j])));
            }
        }
        Ok(GaussianDigitSystem { base, digits, class })
    }

    pub fn norm(&self) -> BigInt {
        self.base.norm()
    }

    /// Index of the digit congruent to `z`.
    pub fn digit_index(&self, z: &GaussianInt) -> usize {
        self.class[&class_key(z, &self.base, &self.norm())]
    }

    pub fn digit_for(&self, z: &GaussianInt) -> &GaussianInt {
        &self.digits[self.digit_index(z)]
    }

    pub fn index_of(&self, d: &GaussianInt) -> Option<usize> {
        self.digits.iter().position(|x| x == d)
    }
}

/// Lattice points of the half-open parallelogram `{α b + β i b : α, β ∈ [0,1)}`,
/// sorted by `(norm, re, im)`.
pub fn residue_system(b: &GaussianInt) -> Result<GaussianDigitSystem> {
    check_base(b)?;
    let n = b.norm();
    let ib = &GaussianInt::i() * b;
    let corners = [GaussianInt::zero(), b.clone(), ib.clone(), b + &ib];
    let lo_re = corners.iter().map(|c| c.re.clone()).min().expect("four corners");
    let hi_re = corners.iter().map(|c| c.re.clone()).max().expect("four corners");
    let lo_im = corners.iter().map(|c| c.im.clone()).min().expect("four corners");
    let hi_im = corners.iter().map(|c| c.im.clone()).max().expect("four corners");
    let (lo_re, hi_re, lo_im, hi_im) = (to_i64(&lo_re)?, to_i64(&hi_re)?, to_i64(&lo_im)?, to_i64(&hi_im)?);
    let mut digits = Vec::new();
    for x in lo_re..=hi_re {
        for y in lo_im..=hi_im {
            let z = GaussianInt::new(x, y);
            let p = &z * &b.conj();
            if !p.re.is_negative() && p.re < n && !p.im.is_negative() && p.im < n {
                digits.push(z);
            }
        }
    }
    digits.sort_by_key(GaussianInt::sort_key);
    GaussianDigitSystem::new(b.clone(), digits)
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().filter(|v| v.abs() < 1 << 20).ok_or_else(|| Error::InvalidBase("base too large to enumerate".into()))
}

pub fn validate_digit_system(b: &GaussianInt, digits: &[GaussianInt]) -> bool {
    GaussianDigitSystem::new(b.clone(), digits.to_vec()).is_ok()
}
