use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::cells::Cell;
use super::int::{GaussianDigitSystem, GaussianInt};
use crate::error::{Error, Result};

const PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
];

/// What to draw: filled convex cells with a color index, or points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Figure {
    Cells(Vec<(Vec<[f64; 2]>, usize)>),
    Points(Vec<[f64; 2]>),
}

impl Figure {
    /// Cells colored by their leading digit.
    pub fn from_cells(cells: &[Cell], sys: &GaussianDigitSystem) -> Self {
        Figure::Cells(
            cells
                .iter()
                .map(|c| {
                    let color = c.digits.first().and_then(|d| sys.index_of(d)).unwrap_or(0);
                    (c.polygon.vertices.clone(), color)
                })
                .collect(),
        )
    }

    pub fn from_points(points: &[GaussianInt]) -> Self {
        Figure::Points(points.iter().map(GaussianInt::to_f64).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Figure::Cells(c) => c.len(),
            Figure::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let mut add = |p: &[f64; 2]| {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        };
        match self {
            Figure::Cells(cells) => cells.iter().flat_map(|c| c.0.iter()).for_each(&mut add),
            Figure::Points(pts) => pts.iter().for_each(&mut add),
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ImageSpec {
    pub width: u32,
    pub height: u32,
    /// Distinct colors per leading digit; otherwise everything is drawn in
    /// the first palette color.
    pub color_by_digit: bool,
}

impl Default for ImageSpec {
    fn default() -> Self {
        ImageSpec { width: 512, height: 512, color_by_digit: true }
    }
}

/// Maps figure coordinates to pixels: uniform scale, 4% margin, y up.
struct View {
    scale: f64,
    ox: f64,
    oy: f64,
    h: f64,
}

impl View {
    fn new(fig: &Figure, spec: &ImageSpec) -> Self {
        let b = fig.bbox();
        let (w, h) = (spec.width as f64, spec.height as f64);
        let span_x = (b[2] - b[0]).max(1e-12);
        let span_y = (b[3] - b[1]).max(1e-12);
        let scale = 0.92 * (w / span_x).min(h / span_y);
        let ox = (w - scale * span_x) / 2.0 - scale * b[0];
        let oy = (h - scale * span_y) / 2.0 - scale * b[1];
        View { scale, ox, oy, h }
    }

    fn map(&self, p: &[f64; 2]) -> [f64; 2] {
        [self.ox + self.scale * p[0], self.h - (self.oy + self.scale * p[1])]
    }
}

fn check(fig: &Figure, spec: &ImageSpec) -> Result<()> {
    if fig.is_empty() {
        return Err(Error::EmptySet);
    }
    if spec.width == 0 || spec.height == 0 || spec.width > 16_384 || spec.height > 16_384 {
        return Err(Error::InvalidArgument("image size must be within 1..=16384".into()));
    }
    Ok(())
}

fn color(spec: &ImageSpec, idx: usize) -> [u8; 3] {
    if spec.color_by_digit {
        PALETTE[idx % PALETTE.len()]
    } else {
        PALETTE[0]
    }
}

pub fn render_svg(fig: &Figure, spec: &ImageSpec) -> Result<String> {
    check(fig, spec)?;
    let view = View::new(fig, spec);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = spec.width,
        h = spec.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    match fig {
        Figure::Cells(cells) => {
            for (poly, idx) in cells {
                let [r, g, b] = color(spec, *idx);
                let pts: Vec<String> = poly
                    .iter()
                    .map(|p| {
                        let q = view.map(p);
                        format!("{:.3},{:.3}", q[0], q[1])
                    })
                    .collect();
                let _ = writeln!(s, r#"<polygon points="{}" fill="rgb({r},{g},{b})"/>"#, pts.join(" "));
            }
        }
        Figure::Points(pts) => {
            let [r, g, b] = color(spec, 0);
            for p in pts {
                let q = view.map(p);
                let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="1.5" fill="rgb({r},{g},{b})"/>"#, q[0], q[1]);
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn inside_convex(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut sign = 0.0f64;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if c != 0.0 {
            if sign != 0.0 && c.signum() != sign {
                return false;
            }
            sign = c.signum();
        }
    }
    true
}

/// Binary PPM (`P6`); a pixel takes the color of the last cell containing its
/// center.
pub fn render_ppm(fig: &Figure, spec: &ImageSpec) -> Result<Vec<u8>> {
    check(fig, spec)?;
    let view = View::new(fig, spec);
    let (w, h) = (spec.width as usize, spec.height as usize);
    let mut px = vec![255u8; w * h * 3];
    let mut paint = |x: usize, y: usize, c: [u8; 3]| {
        let o = (y * w + x) * 3;
        px[o..o + 3].copy_from_slice(&c);
    };
    match fig {
        Figure::Cells(cells) => {
            for (poly, idx) in cells {
                let mapped: Vec<[f64; 2]> = poly.iter().map(|p| view.map(p)).collect();
                let x0 = mapped.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min).floor().max(0.0) as usize;
                let x1 = mapped.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max).ceil().min(w as f64) as usize;
                let y0 = mapped.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min).floor().max(0.0) as usize;
                let y1 = mapped.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max).ceil().min(h as f64) as usize;
                let c = color(spec, *idx);
                for y in y0..y1 {
                    for x in x0..x1 {
                        if inside_convex(&mapped, [x as f64 + 0.5, y as f64 + 0.5]) {
                            paint(x, y, c);
                        }
                    }
                }
            }
        }
        Figure::Points(pts) => {
            let c = color(spec, 0);
            for p in pts {
                let q = view.map(p);
                let (x, y) = (q[0].floor(), q[1].floor());
                if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
                    paint(x as usize, y as usize, c);
                }
            }
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(&px);
    Ok(out)
}

/// Writes SVG or PPM according to the extension. Nothing is written when
/// rendering fails.
pub fn render_file(path: &Path, fig: &Figure, spec: &ImageSpec) -> Result<()> {
    let bytes = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("svg") => render_svg(fig, spec)?.into_bytes(),
        Some("ppm") => render_ppm(fig, spec)?,
        _ => return Err(Error::InvalidArgument(format!("{}: expected a .svg or .ppm file", path.display()))),
    };
    std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
