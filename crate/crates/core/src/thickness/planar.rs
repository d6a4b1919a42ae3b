//! Rasterized thickness estimate for finite unions of convex polygons.
//!
//! The union is drawn conservatively (a pixel is filled when it overlaps a
//! polygon in positive area), complement pixels are grouped into
//! 4-connected components, and the thickness quotient is evaluated on the
//! pixel squares. Gaps shrink by at most a pixel per side, so the estimate
//! converges as the resolution grows; it is never exact.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Convex polygon, vertices in either orientation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Self {
        Polygon { vertices }
    }

    pub fn axis_square(x0: f64, y0: f64, side: f64) -> Self {
        Polygon::new(vec![[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]])
    }

    fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for v in &self.vertices {
            b[0] = b[0].min(v[0]);
            b[1] = b[1].min(v[1]);
            b[2] = b[2].max(v[0]);
            b[3] = b[3].max(v[1]);
        }
        b
    }

    /// x-extent of the polygon clipped to the band `ylo <= y <= yhi`, if
    /// the clipped piece has positive height.
    fn band_extent(&self, ylo: f64, yhi: f64, tol: f64) -> Option<(f64, f64)> {
        let (mut xa, mut xb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ya, mut yb) = (f64::INFINITY, f64::NEG_INFINITY);
        let n = self.vertices.len();
        let mut take = |x: f64, y: f64| {
            xa = xa.min(x);
            xb = xb.max(x);
            ya = ya.min(y);
            yb = yb.max(y);
        };
        for k in 0..n {
            let p = self.vertices[k];
            let q = self.vertices[(k + 1) % n];
            if p[1] >= ylo && p[1] <= yhi {
                take(p[0], p[1]);
            }
            for y in [ylo, yhi] {
                if (p[1] - y) * (q[1] - y) < 0.0 {
                    let t = (y - p[1]) / (q[1] - p[1]);
                    take(p[0] + t * (q[0] - p[0]), y);
                }
            }
        }
        (yb - ya > tol && xb - xa > tol).then_some((xa, xb))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarOptions {
    pub metric: Metric,
    /// Gaps whose diameter is below this many pixels are treated as
    /// unresolved and skipped.
    pub min_gap_pixels: f64,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        PlanarOptions { metric: Metric::Euclidean, min_gap_pixels: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarThickness {
    /// `None` when the complement has no resolved bounded component, in
    /// which case the thickness is infinite (the union has interior).
    pub estimate: Option<f64>,
    /// Heuristic half-width from one pixel of uncertainty on each side of
    /// the minimizing gap.
    pub error_bar: f64,
    pub bounded_gaps: usize,
    pub skipped_gaps: usize,
    pub resolution: u32,
    pub pixel: f64,
    pub metric: Metric,
}

impl PlanarThickness {
    pub fn value(&self) -> f64 {
        self.estimate.unwrap_or(f64::INFINITY)
    }
}

struct Raster {
    nx: usize,
    ny: usize,
    filled: Vec<bool>,
    pixel: f64,
}

fn rasterize(cells: &[Polygon], resolution: u32) -> Raster {
    let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    let boxes: Vec<[f64; 4]> = cells.iter().map(Polygon::bbox).collect();
    for b in &boxes {
        bb[0] = bb[0].min(b[0]);
        bb[1] = bb[1].min(b[1]);
        bb[2] = bb[2].max(b[2]);
        bb[3] = bb[3].max(b[3]);
    }
    let side = (bb[2] - bb[0]).max(bb[3] - bb[1]);
    let h = side / resolution as f64;
    let pad = 2.0;
    let (ox, oy) = (bb[0] - pad * h, bb[1] - pad * h);
    let nx = ((bb[2] - bb[0]) / h).ceil() as usize + 4;
    let ny = ((bb[3] - bb[1]) / h).ceil() as usize + 4;
    let tol = 1e-7 * h;

    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); ny];
    for (k, b) in boxes.iter().enumerate() {
        let r0 = (((b[1] - oy) / h).floor().max(0.0) as usize).min(ny - 1);
        let r1 = (((b[3] - oy) / h).ceil().max(0.0) as usize).min(ny);
        for row in rows.iter_mut().take(r1).skip(r0) {
            row.push(k);
        }
    }
    let mut filled = vec![false; nx * ny];
    filled.par_chunks_mut(nx).enumerate().for_each(|(j, line)| {
        let ylo = oy + j as f64 * h;
        let yhi = ylo + h;
        for &k in &rows[j] {
            if let Some((xa, xb)) = cells[k].band_extent(ylo, yhi, tol) {
                let i0 = ((xa + tol - ox) / h).floor().max(0.0) as usize;
                let i1 = (((xb - tol - ox) / h).ceil().max(0.0) as usize).min(nx);
                for px in line.iter_mut().take(i1).skip(i0) {
                    *px = true;
                }
            }
        }
    });
    Raster { nx, ny, filled, pixel: h }
}

struct Component {
    pixels: Vec<(usize, usize)>,
    boundary: Vec<(usize, usize)>,
}

fn components(r: &Raster) -> Vec<Component> {
    let (nx, ny) = (r.nx, r.ny);
    let mut label = vec![usize::MAX; nx * ny];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..nx * ny {
        if r.filled[start] || label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut comp = Component { pixels: Vec::new(), boundary: Vec::new() };
        label[start] = id;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let (i, j) = (p % nx, p / nx);
            comp.pixels.push((i, j));
            let mut touches_fill = false;
            let nbrs = [
                (i > 0).then(|| p - 1),
                (i + 1 < nx).then(|| p + 1),
                (j > 0).then(|| p - nx),
                (j + 1 < ny).then(|| p + nx),
            ];
            for q in nbrs.into_iter().flatten() {
                if r.filled[q] {
                    touches_fill = true;
                } else if label[q] == usize::MAX {
                    label[q] = id;
                    queue.push_back(q);
                }
            }
            if touches_fill {
                comp.boundary.push((i, j));
            }
        }
        out.push(comp);
    }
    out
}

/// Diameter of the union of the pixel squares, in pixels.
fn diameter(c: &Component, metric: Metric) -> f64 {
    let (mut i0, mut i1, mut j0, mut j1) = (usize::MAX, 0, usize::MAX, 0);
    for &(i, j) in &c.pixels {
        i0 = i0.min(i);
        i1 = i1.max(i);
        j0 = j0.min(j);
        j1 = j1.max(j);
    }
    match metric {
        Metric::Chebyshev => ((i1 - i0).max(j1 - j0) + 1) as f64,
        Metric::Euclidean => {
            // Corners of the extreme pixels of each row span the hull.
            let mut ext: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
            for &(i, j) in &c.boundary {
                let e = ext.entry(j).or_insert((i, i));
                e.0 = e.0.min(i);
                e.1 = e.1.max(i);
            }
            let mut pts: Vec<(i64, i64)> = Vec::with_capacity(ext.len() * 4);
            for (&j, &(a, b)) in &ext {
                let (j, a, b) = (j as i64, a as i64, b as i64);
                pts.extend([(a, j), (a, j + 1), (b + 1, j), (b + 1, j + 1)]);
            }
            let hull = convex_hull(pts);
            let mut best = 0i64;
            for (k, p) in hull.iter().enumerate() {
                for q in &hull[k + 1..] {
                    best = best.max((p.0 - q.0).pow(2) + (p.1 - q.1).pow(2));
                }
            }
            (best as f64).sqrt().max(1.0)
        }
    }
}

fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Distance between two pixel squares, in pixels.
fn square_distance(a: (usize, usize), b: (usize, usize), metric: Metric) -> f64 {
    let dx = (a.0.abs_diff(b.0) as f64 - 1.0).max(0.0);
    let dy = (a.1.abs_diff(b.1) as f64 - 1.0).max(0.0);
    match metric {
        Metric::Euclidean => (dx * dx + dy * dy).sqrt(),
        Metric::Chebyshev => dx.max(dy),
    }
}

/// Bucketed point set for nearest-pixel queries.
struct Buckets {
    size: usize,
    bx: usize,
    by: usize,
    cells: Vec<Vec<(usize, usize)>>,
}

impl Buckets {
    fn new(nx: usize, ny: usize, size: usize) -> Self {
        let bx = nx.div_ceil(size);
        let by = ny.div_ceil(size);
        Buckets { size, bx, by, cells: vec![Vec::new(); bx * by] }
    }

    fn insert(&mut self, p: (usize, usize)) {
        self.cells[(p.1 / self.size) * self.bx + p.0 / self.size].push(p);
    }

    /// Nearest stored pixel to `q`, if closer than `best`.
    fn nearest(&self, q: (usize, usize), mut best: f64, metric: Metric) -> f64 {
        let (cx, cy) = ((q.0 / self.size) as i64, (q.1 / self.size) as i64);
        let max_ring = self.bx.max(self.by) as i64;
        for ring in 0..=max_ring {
            // Every pixel in ring `ring` is at least (ring - 1) * size - 1
            // pixels away in either metric.
            let lower = ((ring - 1) * self.size as i64 - 1).max(0) as f64;
            if lower >= best {
                break;
            }
            for by in cy - ring..=cy + ring {
                if by < 0 || by >= self.by as i64 {
                    continue;
                }
                let edge_row = by == cy - ring || by == cy + ring;
                let step = if edge_row { 1 } else { (2 * ring).max(1) as usize };
                let mut bx = cx - ring;
                while bx <= cx + ring {
                    if bx >= 0 && bx < self.bx as i64 {
                        for &p in &self.cells[by as usize * self.bx + bx as usize] {
                            best = best.min(square_distance(p, q, metric));
                        }
                    }
                    bx += step as i64;
                }
            }
        }
        best
    }
}

/// Thickness estimate of the union of `cells` on a grid whose longer side
/// has `resolution` pixels.
pub fn thickness_2d_estimate(cells: &[Polygon], resolution: u32, opts: PlanarOptions) -> Result<PlanarThickness> {
    if cells.is_empty() {
        return Err(Error::EmptySet);
    }
    if resolution < 64 {
        return Err(Error::InvalidArgument("resolution must be at least 64".into()));
    }
    let raster = rasterize(cells, resolution);
    let comps = components(&raster);
    // The padded border is empty and connected, so component 0 (which holds
    // pixel (0, 0)) is the unbounded gap.
    let mut gaps: Vec<(f64, usize)> = comps
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| (diameter(c, opts.metric), k))
        .collect();
    let total = gaps.len();
    gaps.retain(|&(d, _)| d >= opts.min_gap_pixels);
    let skipped = total - gaps.len();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut buckets = Buckets::new(raster.nx, raster.ny, 16);
    for &p in &comps[0].boundary {
        buckets.insert(p);
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for &(diam, k) in &gaps {
        let mut dist = f64::INFINITY;
        for &q in &comps[k].boundary {
            dist = buckets.nearest(q, dist, opts.metric);
            if dist == 0.0 {
                break;
            }
        }
        let ratio = dist / diam;
        if best.is_none_or(|b| ratio < b.0) {
            best = Some((ratio, dist, diam));
        }
        for &p in &comps[k].boundary {
            buckets.insert(p);
        }
    }
    let (estimate, error_bar) = match best {
        Some((ratio, _, diam)) => (Some(ratio), 2.0 * std::f64::consts::SQRT_2 * (ratio + 1.0) / diam),
        None => (None, 0.0),
    };
    Ok(PlanarThickness {
        estimate,
        error_bar,
        bounded_gaps: gaps.len(),
        skipped_gaps: skipped,
        resolution,
        pixel: raster.pixel,
        metric: opts.metric,
    })
}
