//! Explicit constants and conditions of the thickness-intersection
//! criterion, torus alignment of several bases, the windows cut out of the
//! scaled Cantor sets, and nonemptiness certificates for integers avoiding
//! digits in several bases.

mod align;
mod certify;
mod check;
mod constants;
mod window;

pub use align::{alignment_at, find_alignment, rotation_vector, Alignment, AlignmentProblem};
pub use certify::{certify_common_integer, default_epsilon, CertifyOptions, CommonCertificate, Witness};
pub use check::{check_fy, check_fy_refining, check_fy_with_bits, FYCertificate, FYInstance, FYSet, Region, Verdict};
pub use constants::{
    choose_c, choose_c_for_thickness, gauge, gauge_constant, k2_constant, solve_threshold_m, Threshold,
};
pub use window::{build_windows, nearest_largest_gap, Window};
