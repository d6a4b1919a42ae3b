use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use serde::Serialize;

use super::align::{alignment_at, find_alignment, Alignment, AlignmentProblem};
use super::check::{check_fy_refining, FYCertificate, FYInstance, FYSet, Region, Verdict};
use super::constants::{choose_c_for_thickness, solve_threshold_m, Threshold};
use super::window::{build_windows, Window};
use crate::error::{Error, Result};
use crate::expansions::{avoids, expand_nat, DigitString, MissingDigitSpec};
use crate::numeric::{ceil_int, floor_int, int, ln_rational, rat, Interval, Rational, DEFAULT_BITS};
use crate::search::AvoidingRange;
use crate::thickness::{thickness_formula, Thickness};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifyOptions {
    /// Alignment tolerance; derived from the bases when absent.
    #[serde(serialize_with = "crate::numeric::serde_rational::option::serialize")]
    pub eps: Option<Rational>,
    /// Use this alignment instead of searching for the smallest one.
    pub n: Option<u64>,
    pub n_max: u64,
    pub witness: bool,
    /// Candidates examined in the witness search.
    pub witness_budget: u64,
    /// Starting precision of the enclosures; refined when undecided.
    pub bits: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { eps: None, n: None, n_max: 10_000, witness: false, witness_budget: 1_000_000, bits: DEFAULT_BITS }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "serialize_biguint")]
    pub value: BigUint,
    pub expansions: Vec<DigitString>,
}

fn serialize_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommonCertificate {
    pub bases: Vec<u64>,
    /// Specs actually certified; `0` is added to the missing digits where it
    /// was allowed (fewer integers qualify, so witnesses stay valid).
    pub specs: Vec<MissingDigitSpec>,
    pub augmented: Vec<bool>,
    pub threshold: Threshold,
    #[serde(with = "crate::numeric::serde_rational")]
    pub eps: Rational,
    pub alignment: Option<Alignment>,
    pub windows: Vec<Window>,
    pub thickness: Vec<Thickness>,
    /// How `c` was chosen: `"log"` for `1 - 1/ln(τ_min/4)`, `"fallback"`
    /// when the thickness is too small for that choice.
    pub c_choice: String,
    pub fy: Option<FYCertificate>,
    pub verdict: Verdict,
    pub failed_condition: Option<String>,
    pub witness: Option<Witness>,
}

/// Largest tolerance keeping every `b_i^{±ε}` inside `(3/4, 4/3)`:
/// a rational just below `ln(4/3) / ln(b_max)`.
pub fn default_epsilon(b_max: u64) -> Result<Rational> {
    let num = ln_rational(&rat(4, 3), 96)?;
    let den = ln_rational(&int(b_max), 96)?;
    let q = num.div(&den)?;
    let scale = BigInt::one() << 40u32;
    let eps = Rational::new(floor_int(&(q.lo() * Rational::from_integer(scale.clone()))), scale);
    Ok(eps.min(rat(1, 4)))
}

fn fail(mut cert: CommonCertificate, why: String) -> CommonCertificate {
    cert.verdict = Verdict::Fail;
    cert.failed_condition = Some(why);
    cert
}

/// Assembles and checks the intersection criterion for the windows of
/// `specs` (sorted by base) at an alignment `n`, and optionally looks for an
/// explicit integer in the common window.
///
/// A failing condition is reported in the certificate; only malformed input
/// is an error.
pub fn certify_common_integer(specs: &[MissingDigitSpec], opts: &CertifyOptions) -> Result<CommonCertificate> {
    if specs.is_empty() {
        return Err(Error::InvalidArgument("at least one base is required".into()));
    }
    let mut specs: Vec<MissingDigitSpec> = specs.to_vec();
    specs.sort_by_key(MissingDigitSpec::base);
    let bases: Vec<u64> = specs.iter().map(MissingDigitSpec::base).collect();
    if bases.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("bases must be distinct".into()));
    }
    if let Some(&b) = bases.iter().find(|&&b| b < 3) {
        return Err(Error::InvalidBase(format!("{b}: certificates need bases >= 3")));
    }
    let mut augmented = Vec::with_capacity(specs.len());
    for s in specs.iter_mut() {
        let add = s.is_allowed(0);
        if add {
            *s = s.with_zero_missing()?;
        }
        augmented.push(add);
    }
    let mut taus = Vec::with_capacity(specs.len());
    for s in &specs {
        let f = thickness_formula(s)?;
        taus.push(f.value);
    }
    let r_min = specs.iter().map(|s| s.run_fraction().clone()).min().expect("nonempty");
    let k = (specs.len() as u32).max(2);
    let threshold = solve_threshold_m(k, &r_min)?;
    let eps = match &opts.eps {
        Some(e) => e.clone(),
        None => default_epsilon(*bases.last().expect("nonempty"))?,
    };

    let tau_min = taus.iter().min().expect("nonempty").clone();
    let (c, c_choice) = match choose_c_for_thickness(&tau_min, opts.bits) {
        Ok(c) => (c.lo().clone(), "log"),
        Err(_) => (rat(1, 2), "fallback"),
    };

    let mut cert = CommonCertificate {
        bases: bases.clone(),
        specs: specs.clone(),
        augmented,
        threshold,
        eps: eps.clone(),
        alignment: None,
        windows: Vec::new(),
        thickness: taus.iter().cloned().map(Thickness::Finite).collect(),
        c_choice: c_choice.to_string(),
        fy: None,
        verdict: Verdict::Fail,
        failed_condition: None,
        witness: None,
    };

    let problem = AlignmentProblem::new(bases.clone(), eps, opts.n.unwrap_or(opts.n_max).max(1))?;
    let alignment = match opts.n {
        Some(n) => alignment_at(&problem, n)?,
        None => match find_alignment(&problem) {
            Ok(a) => Some(a),
            Err(Error::AlignmentNotFound(_)) => None,
            Err(e) => return Err(e),
        },
    };
    let Some(alignment) = alignment else {
        return Ok(fail(cert, "alignment: no n within the bound meets the tolerance".into()));
    };
    cert.alignment = Some(alignment.clone());
    let windows = match build_windows(&specs, &alignment) {
        Ok(w) => w,
        Err(Error::WindowBound(msg)) => return Ok(fail(cert, format!("window: {msg}"))),
        Err(e) => return Err(e),
    };
    cert.windows = windows.clone();

    let lo = windows.iter().map(|w| w.left.clone()).max().expect("nonempty");
    let hi = windows.iter().map(|w| w.right.clone()).min().expect("nonempty");
    if lo >= hi {
        return Ok(fail(cert, "window: the windows do not overlap".into()));
    }
    let ball = Interval::new(lo, hi)?;
    let inst = FYInstance {
        dimension: 1,
        sets: windows
            .iter()
            .zip(&taus)
            .map(|(w, t)| FYSet {
                thickness: Thickness::Finite(t.clone()),
                diameter: &w.right - &w.left,
                hull: Region::Interval(w.interval()),
            })
            .collect(),
        ball: Region::Interval(ball.clone()),
        c,
    };
    let fy = check_fy_refining(&inst, opts.bits)?;
    cert.verdict = fy.verdict;
    cert.failed_condition = fy.failed_condition.clone();
    cert.fy = Some(fy);
    if cert.verdict == Verdict::Pass && opts.witness {
        cert.witness = find_witness(&specs, &ball, opts.witness_budget)?;
    }
    Ok(cert)
}

/// First integer in `ball` avoiding every spec, enumerated from the
/// sparsest base.
fn find_witness(specs: &[MissingDigitSpec], ball: &Interval, budget: u64) -> Result<Option<Witness>> {
    let lo = ceil_int(ball.lo());
    let hi = floor_int(ball.hi());
    if hi < lo || !hi.is_positive() {
        return Ok(None);
    }
    let lo = BigUint::try_from(lo.max(BigInt::one())).expect("positive");
    let hi = BigUint::try_from(hi).expect("positive");
    let sparsest = specs
        .iter()
        .min_by(|a, b| a.density_exponent().total_cmp(&b.density_exponent()))
        .expect("nonempty");
    for x in AvoidingRange::new(sparsest, &lo, &hi)?.take(budget as usize) {
        if specs.iter().all(|s| avoids(&x, s)) {
            let expansions = specs.iter().map(|s| expand_nat(&x, s.base())).collect::<Result<_>>()?;
            return Ok(Some(Witness { value: x, expansions }));
        }
    }
    Ok(None)
}
