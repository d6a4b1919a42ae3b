use std::collections::HashSet;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::int::{GaussRational, GaussianDigitSystem, GaussianInt};
use crate::error::{Error, Result};
use crate::thickness::planar::{thickness_2d_estimate, Metric, PlanarOptions, PlanarThickness, Polygon};

fn check_subset(sys: &GaussianDigitSystem, d: &[GaussianInt]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::InvalidDigits("empty digit subset".into()));
    }
    if let Some(x) = d.iter().find(|x| sys.index_of(x).is_none()) {
        return Err(Error::InvalidDigits(format!("{x} is not a digit of base {}", sys.base)));
    }
    Ok(())
}

/// Every `Σ_{j<k} r_j b^j` with `1 <= k <= max_digits` and `r_j ∈ d`,
/// de-duplicated and sorted by `(norm, re, im)`.
pub fn enumerate_representable(sys: &GaussianDigitSystem, d: &[GaussianInt], max_digits: u32) -> Result<Vec<GaussianInt>> {
    check_subset(sys, d)?;
    if max_digits < 1 {
        return Err(Error::InvalidArgument("at least one digit is required".into()));
    }
    if (d.len() as f64).powi(max_digits as i32) > 5e7 {
        return Err(Error::InvalidArgument("enumeration too large".into()));
    }
    let b = &sys.base;
    let mut all: HashSet<GaussianInt> = d.iter().cloned().collect();
    let mut level: Vec<GaussianInt> = all.iter().cloned().collect();
    for _ in 1..max_digits {
        // Prepending a low digit: r + b s.
        let mut next: Vec<GaussianInt> =
            level.par_iter().flat_map_iter(|s| d.iter().map(move |r| r + &(b * s))).collect();
        next.par_sort_unstable_by_key(GaussianInt::sort_key);
        next.dedup();
        all.extend(next.iter().cloned());
        level = next;
    }
    let mut out: Vec<GaussianInt> = all.into_iter().collect();
    out.sort_by_key(GaussianInt::sort_key);
    Ok(out)
}

fn cmul(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Convex polygon containing `C_{b,D_b} = {Σ_{t>=1} r_t b^{-t}}`: the hull of
/// a finite level, widened past the tail bound `max|r| / (|b|^H (|b| - 1))`
/// far enough that every first-level image `(r + hull) / b` lies inside it.
pub fn digit_hull(sys: &GaussianDigitSystem) -> Vec<[f64; 2]> {
    let n = sys.norm().to_f64().unwrap_or(f64::INFINITY);
    let abs_b = n.sqrt();
    let depth = ((50_000f64).ln() / n.ln()).floor().max(1.0) as i32;
    let inv_b = GaussRational::quotient(&GaussianInt::one(), &sys.base).to_f64();
    let digits: Vec<[f64; 2]> = sys.digits.iter().map(GaussianInt::to_f64).collect();
    let mut pts = vec![[0.0, 0.0]];
    let mut scale = [1.0, 0.0];
    for _ in 0..depth {
        scale = cmul(scale, inv_b);
        let steps: Vec<[f64; 2]> = digits.iter().map(|&d| cmul(d, scale)).collect();
        pts = convex_hull(pts.iter().flat_map(|p| steps.iter().map(move |s| [p[0] + s[0], p[1] + s[1]])).collect());
    }
    // With a circumscribed 16-gon of inradius `pad`, `(r + hull) / b` stays
    // inside the hull as soon as `rho + pad / (|b| cos(π/16)) <= pad`.
    let max_d = digits.iter().map(|d| d[0].hypot(d[1])).fold(0.0, f64::max);
    let rho = max_d / (abs_b.powi(depth) * (abs_b - 1.0));
    let c16 = (std::f64::consts::PI / 16.0).cos();
    let pad = rho / (1.0 - 1.0 / (abs_b * c16)) * (1.0 + 1e-9);
    let ring: Vec<[f64; 2]> = (0..16)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 8.0;
            [pad / c16 * t.cos(), pad / c16 * t.sin()]
        })
        .collect();
    convex_hull(pts.iter().flat_map(|p| ring.iter().map(move |o| [p[0] + o[0], p[1] + o[1]])).collect())
}

/// One level-`L` piece `Σ_{t=1}^{L} r_t b^{-t} + b^{-L} Hull`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// `r_1, ..., r_L`.
    pub digits: Vec<GaussianInt>,
    pub center: GaussRational,
    /// `b^{-L}`: the similarity taking the hull to the cell.
    pub rotation: GaussRational,
    /// `N(b)^{-L/2}`.
    pub scale: f64,
    pub polygon: Polygon,
}

pub fn level_cells(sys: &GaussianDigitSystem, d: &[GaussianInt], level: u32) -> Result<Vec<Cell>> {
    check_subset(sys, d)?;
    if level < 1 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    if (d.len() as f64).powi(level as i32) > 5e6 {
        return Err(Error::InvalidArgument("too many cells".into()));
    }
    let hull = digit_hull(sys);
    let b = &sys.base;
    let bl = b.pow(level);
    let rotation = GaussRational::quotient(&GaussianInt::one(), &bl);
    let rot = rotation.to_f64();
    let scale = sys.norm().to_f64().unwrap_or(f64::INFINITY).powf(-(level as f64) / 2.0);
    // Prefix sums P = Σ r_t b^{L-t}, built digit by digit.
    let mut prefixes: Vec<(Vec<GaussianInt>, GaussianInt)> = vec![(Vec::new(), GaussianInt::zero())];
    for _ in 0..level {
        prefixes = prefixes
            .into_iter()
            .flat_map(|(ds, p)| {
                d.iter().map(move |r| {
                    let mut ds = ds.clone();
                    ds.push(r.clone());
                    (ds, &(&p * b) + r)
                })
            })
            .collect();
    }
    Ok(prefixes
        .into_par_iter()
        .map(|(digits, p)| {
            let center = GaussRational::quotient(&p, &bl);
            let c = center.to_f64();
            let vertices = hull
                .iter()
                .map(|&v| {
                    let w = cmul(v, rot);
                    [c[0] + w[0], c[1] + w[1]]
                })
                .collect();
            Cell { digits, center, rotation: rotation.clone(), scale, polygon: Polygon::new(vertices) }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TileCheck {
    pub level: u32,
    pub samples: u64,
    pub covered: u64,
    pub fraction: f64,
    /// `(|D| / N(b))^L`, the measure of the level-`L` union modulo `Z[i]`.
    pub expected: f64,
}

/// Samples points of `[0,1)^2`, rounds each to the lattice `b^{-L} Z[i]` and
/// reads off its first `L` digits exactly; the point is covered (modulo
/// `Z[i]`) when all of them lie in `d`.
pub fn fundamental_tile_check(
    sys: &GaussianDigitSystem,
    d: &[GaussianInt],
    level: u32,
    samples: u64,
    seed: u64,
) -> Result<TileCheck> {
    check_subset(sys, d)?;
    if level < 2 {
        return Err(Error::InvalidArgument("level must be at least 2".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let allowed: Vec<bool> = sys.digits.iter().map(|x| d.contains(x)).collect();
    let bl = sys.base.pow(level).to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<[f64; 2]> = (0..samples).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let covered = points
        .par_iter()
        .filter(|&&p| {
            let w = cmul(p, bl);
            let mut q = GaussianInt::new(w[0].round() as i64, w[1].round() as i64);
            (0..level).all(|_| {
                let k = sys.digit_index(&q);
                q = (&q - &sys.digits[k]).div_exact(&sys.base).expect("congruent digit");
                allowed[k]
            })
        })
        .count() as u64;
    let n = sys.norm().to_f64().unwrap_or(f64::INFINITY);
    Ok(TileCheck {
        level,
        samples,
        covered,
        fraction: covered as f64 / samples as f64,
        expected: (d.len() as f64 / n).powi(level as i32),
    })
}

/// The digit nearest the mean of all digits, whose cell sits in the middle of
/// `b C_{b,D_b}`; removing it never touches the outer boundary.
pub fn central_digit(sys: &GaussianDigitSystem) -> GaussianInt {
    let n = sys.digits.len() as f64;
    let (sx, sy) = sys.digits.iter().map(GaussianInt::to_f64).fold((0.0, 0.0), |a, p| (a.0 + p[0], a.1 + p[1]));
    let mean = [sx / n, sy / n];
    sys.digits
        .iter()
        .min_by(|a, b| {
            let da = a.to_f64();
            let db = b.to_f64();
            let ea = (da[0] - mean[0]).hypot(da[1] - mean[1]);
            let eb = (db[0] - mean[0]).hypot(db[1] - mean[1]);
            ea.total_cmp(&eb).then_with(|| a.sort_key().cmp(&b.sort_key()))
        })
        .expect("nonempty digit system")
        .clone()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub base: GaussianInt,
    pub norm: u64,
    pub missing: GaussianInt,
    pub level: u32,
    pub estimate: PlanarThickness,
    pub doubled: PlanarThickness,
    /// `|doubled - estimate| / estimate`.
    pub relative_change: f64,
    /// `estimate / N(b)^{1/2}`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthScan {
    pub rows: Vec<GrowthRow>,
    pub all_positive: bool,
    /// Estimates non-decreasing in `N(b)` (at the doubled resolution).
    pub monotone: bool,
    pub max_relative_change: f64,
    /// Smallest `estimate / N(b)^{1/2}` over the table.
    pub fitted_constant: f64,
}

/// Planar thickness of the level-`L` cells with the central digit removed,
/// for each base, at `resolution` and `2 * resolution`.
pub fn thickness_growth_scan(bases: &[GaussianInt], level: u32, resolution: u32, metric: Metric) -> Result<GrowthScan> {
    if bases.is_empty() {
        return Err(Error::InvalidArgument("at least one base is required".into()));
    }
    let opts = PlanarOptions { metric, ..Default::default() };
    let mut rows = Vec::with_capacity(bases.len());
    for b in bases {
        let sys = super::int::residue_system(b)?;
        let missing = central_digit(&sys);
        let d: Vec<GaussianInt> = sys.digits.iter().filter(|x| **x != missing).cloned().collect();
        let polys: Vec<Polygon> = level_cells(&sys, &d, level)?.into_iter().map(|c| c.polygon).collect();
        let estimate = thickness_2d_estimate(&polys, resolution, opts)?;
        let doubled = thickness_2d_estimate(&polys, resolution * 2, opts)?;
        let norm = sys.norm().to_u64().expect("enumerable base");
        let relative_change = (doubled.value() - estimate.value()).abs() / estimate.value();
        let normalized = doubled.value() / (norm as f64).sqrt();
        rows.push(GrowthRow { base: b.clone(), norm, missing, level, estimate, doubled, relative_change, normalized });
    }
    rows.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.base.sort_key().cmp(&b.base.sort_key())));
    let all_positive = rows.iter().all(|r| r.estimate.value() > 0.0 && r.doubled.value() > 0.0);
    let monotone = rows.windows(2).all(|w| w[1].doubled.value() >= w[0].doubled.value());
    let max_relative_change = rows.iter().map(|r| r.relative_change).fold(0.0, f64::max);
    let fitted_constant = rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
    Ok(GrowthScan { rows, all_positive, monotone, max_relative_change, fitted_constant })
}
