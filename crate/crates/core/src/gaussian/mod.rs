//! Digit expansions over the Gaussian integers.

mod align;
mod cells;
mod expand;
mod int;
mod render;
mod search;

pub use align::{gauss_alignment, GaussAlignment};
pub use cells::{
    central_digit, digit_hull, enumerate_representable, fundamental_tile_check, level_cells, thickness_growth_scan,
    Cell, GrowthRow, GrowthScan, TileCheck,
};
pub use expand::{gauss_expand, reconstruct, GaussExpansion, Outcome, Termination};
pub use int::{residue_system, validate_digit_system, GaussRational, GaussianDigitSystem, GaussianInt};
pub use render::{render_file, render_ppm, render_svg, Figure, ImageSpec};
pub use search::{gauss_search_common, small_digit_prune, Pruned};
