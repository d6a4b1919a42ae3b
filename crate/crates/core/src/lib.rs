//! Missing-digit Cantor sets in one and several bases.
//!
//! The crate builds finite levels of missing-digit Cantor sets as exact
//! interval unions, computes their Newhouse thickness, evaluates the
//! quantitative thickness-intersection criterion with explicit constants,
//! searches for integers avoiding prescribed digits in several bases at once,
//! and handles digit expansions over the Gaussian integers.

pub mod error;
pub mod expansions;
pub mod fy;
pub mod gaussian;
pub mod numeric;
pub mod search;
pub mod thickness;

pub use error::{Error, Result};
pub use expansions::{avoids, eval_digits, expand_nat, DigitString, MissingDigitSpec};
pub use numeric::{Enclosure, Interval, IntervalUnion, LogEnclosure, Rational};
pub use thickness::{GapSystem, Thickness};
