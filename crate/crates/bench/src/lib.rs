//! Fixtures shared by the criterion benchmarks.

use digitgap::thickness::{level_set, LevelSetSpec};
use digitgap::{IntervalUnion, MissingDigitSpec};

/// Level `depth` of the zero-free base-`b` Cantor set.
pub fn zero_free_level(b: u64, depth: u32) -> IntervalUnion {
    let spec = MissingDigitSpec::new(b, [0]).expect("valid base");
    level_set(&LevelSetSpec::new(spec, 0, depth).expect("depth >= 1")).expect("two digits")
}

pub fn zero_free(bases: &[u64]) -> Vec<MissingDigitSpec> {
    bases.iter().map(|&b| MissingDigitSpec::new(b, [0]).expect("valid base")).collect()
}
