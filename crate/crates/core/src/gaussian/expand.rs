use std::collections::HashMap;

use serde::Serialize;

use super::int::{GaussianDigitSystem, GaussianInt};

/// Which quotients end the division walk.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Stop at `0` or at a unit (the unit becomes the leading coefficient).
    #[default]
    ZeroOrUnit,
    /// Stop only at `0`: a plain digit expansion.
    ZeroOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// `z = u b^k + Σ_{j<k} r_j b^j` with `k` the number of digits.
    Terminated { u: GaussianInt },
    /// The quotient at step `start` reappears `period` steps later.
    Cycle { start: usize, period: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussExpansion {
    pub input: GaussianInt,
    pub outcome: Outcome,
    /// `r_0, r_1, ...`, least significant first.
    pub digits: Vec<GaussianInt>,
    /// Quotients `z_0 = z, z_1, ...`; one longer than `digits`.
    pub trajectory: Vec<GaussianInt>,
}

impl GaussExpansion {
    pub fn k(&self) -> usize {
        self.digits.len()
    }

    pub fn unit(&self) -> Option<&GaussianInt> {
        match &self.outcome {
            Outcome::Terminated { u } => Some(u),
            Outcome::Cycle { .. } => None,
        }
    }
}

fn abs(z: &GaussianInt) -> f64 {
    let [x, y] = z.to_f64();
    x.hypot(y)
}

/// Repeated division `z_t = z_{t+1} b + r_t` with `r_t` the digit congruent
/// to `z_t`. Every state is remembered, so a repeat is reported as a cycle.
pub fn gauss_expand(z: &GaussianInt, sys: &GaussianDigitSystem, policy: Termination) -> GaussExpansion {
    let b = &sys.base;
    let abs_b = abs(b);
    let max_d = sys.digits.iter().map(abs).fold(0.0, f64::max);
    let stop = |w: &GaussianInt| w.is_zero() || (policy == Termination::ZeroOrUnit && w.is_unit());
    let mut seen: HashMap<GaussianInt, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut trajectory = vec![z.clone()];
    let mut cur = z.clone();
    loop {
        if stop(&cur) {
            return GaussExpansion { input: z.clone(), outcome: Outcome::Terminated { u: cur }, digits, trajectory };
        }
        if let Some(&start) = seen.get(&cur) {
            let period = digits.len() - start;
            return GaussExpansion { input: z.clone(), outcome: Outcome::Cycle { start, period }, digits, trajectory };
        }
        seen.insert(cur.clone(), digits.len());
        let r = sys.digit_for(&cur).clone();
        let next = (&cur - &r).div_exact(b).expect("digit is congruent");
        debug_assert!(abs(&next) <= (abs(&cur) + max_d) / abs_b * (1.0 + 1e-9) + 1e-9);
        digits.push(r);
        trajectory.push(next.clone());
        cur = next;
    }
}

/// `u b^k + Σ r_j b^j` for a terminated expansion.
pub fn reconstruct(e: &GaussExpansion, b: &GaussianInt) -> Option<GaussianInt> {
    let u = e.unit()?;
    let mut acc = u.clone();
    for r in e.digits.iter().rev() {
        acc = &(&acc * b) + r;
    }
    Some(acc)
}
