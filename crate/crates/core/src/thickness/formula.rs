use num_traits::One;
use serde::Serialize;

use super::{gap_system, level_set, GapEntry, LevelSetSpec, Thickness};
use crate::error::{Error, Result};
use crate::expansions::MissingDigitSpec;
use crate::numeric::Rational;

/// Closed-form thickness `(b-1) r - 1/b` of `C_{b,D}` and its lower bound
/// `r (b-2)`, valid when `0` is missing, `b-1` is allowed, no two missing
/// digits are consecutive, and every run of allowed digits is at least `b r`
/// long.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThicknessFormula {
    #[serde(with = "crate::numeric::serde_rational")]
    pub value: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub lower_bound: Rational,
    /// Level-k gap and bridge lengths as `1/(b^k (b-1))` and
    /// `(r - 1/(b(b-1))) / b^(k-1)`, evaluated at k = 1.
    #[serde(with = "crate::numeric::serde_rational")]
    pub stated_gap_1: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub stated_bridge_1: Rational,
}

pub fn thickness_formula(spec: &MissingDigitSpec) -> Result<ThicknessFormula> {
    let f = spec.flags();
    if !f.all() {
        return Err(Error::InvalidDigits(format!(
            "closed form needs 0 missing, b-1 allowed and no consecutive missing digits ({})",
            spec.describe()
        )));
    }
    let b = Rational::from_integer(spec.base().into());
    let one = Rational::one();
    let r = spec.run_fraction();
    let value = (&b - &one) * r - b.recip();
    let lower_bound = r * (&b - Rational::from_integer(2.into()));
    let stated_gap_1 = (&b * (&b - &one)).recip();
    let stated_bridge_1 = r - &stated_gap_1;
    Ok(ThicknessFormula { value, lower_bound, stated_gap_1, stated_bridge_1 })
}

/// Comparison of the closed form with the exact gap-system thickness of the
/// level-`depth` set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulaCheck {
    pub spec: MissingDigitSpec,
    pub depth: u32,
    pub formula: ThicknessFormula,
    pub exact: Thickness,
    pub agrees: bool,
    /// Largest first-level gap and shortest bridge actually present.
    #[serde(with = "crate::numeric::serde_rational")]
    pub largest_gap: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub shortest_first_bridge: Rational,
    /// Whether the stated level-1 gap length equals `largest_gap`.
    pub stated_gap_matches: bool,
    /// Gaps attaining the exact minimum ratio; filled only on disagreement.
    pub evidence: Vec<GapEntry>,
}

pub fn check_formula(spec: &MissingDigitSpec, depth: u32) -> Result<FormulaCheck> {
    let formula = thickness_formula(spec)?;
    let u = level_set(&LevelSetSpec::new(spec.clone(), 0, depth)?)?;
    let gs = gap_system(&u)?;
    let exact = gs.thickness();
    let agrees = exact == Thickness::Finite(formula.value.clone());
    let largest_gap = gs.gaps.first().map(|g| g.gap.length()).ok_or(Error::NoGap)?;
    let shortest_first_bridge = gs
        .gaps
        .iter()
        .take_while(|g| g.gap.length() == largest_gap)
        .map(|g| g.left.length().min(g.right.length()))
        .min()
        .expect("one largest gap");
    let evidence = if agrees {
        Vec::new()
    } else {
        let min = exact.finite().cloned();
        gs.gaps.into_iter().filter(|g| Some(g.ratio()) == min).collect()
    };
    Ok(FormulaCheck {
        spec: spec.clone(),
        depth,
        stated_gap_matches: formula.stated_gap_1 == largest_gap,
        formula,
        exact,
        agrees,
        largest_gap,
        shortest_first_bridge,
        evidence,
    })
}
