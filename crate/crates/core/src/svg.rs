//! Deterministic SVG drawings of planar complexes and polylines.

use std::fmt::Write as _;

use crate::complexes::SimplicialComplex2;
use crate::geometry::Point;

pub const CANVAS: f64 = 600.0;
const MARGIN: f64 = 20.0;

/// Maps data coordinates (first two axes) onto the fixed canvas, keeping the
/// aspect ratio and flipping y so that up is up.
#[derive(Debug, Clone, Copy)]
struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn fit<'a>(pts: impl Iterator<Item = &'a Point>) -> Self {
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) =
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo_x = lo_x.min(p.x());
            hi_x = hi_x.max(p.x());
            lo_y = lo_y.min(p.y());
            hi_y = hi_y.max(p.y());
        }
        if !lo_x.is_finite() {
            return Self { min_x: 0.0, max_y: 0.0, scale: 1.0 };
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y);
        let scale = if span > 0.0 { (CANVAS - 2.0 * MARGIN) / span } else { 1.0 };
        Self { min_x: lo_x, max_y: hi_y, scale }
    }

    fn map(&self, p: &Point) -> (f64, f64) {
        (MARGIN + (p.x() - self.min_x) * self.scale, MARGIN + (self.max_y - p.y()) * self.scale)
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">",
        c = CANVAS
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
}

fn dot(out: &mut String, (x, y): (f64, f64)) {
    let _ = writeln!(out, "<circle class=\"vertex\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"black\"/>");
}

fn line(out: &mut String, (x1, y1): (f64, f64), (x2, y2): (f64, f64), class: &str) {
    let _ = writeln!(
        out,
        "<line class=\"{class}\" x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke=\"black\" stroke-width=\"1\"/>"
    );
}

/// Renders a complex whose vertex `i` sits at `points[i]`.
pub fn render_complex(k: &SimplicialComplex2, points: &[Point]) -> Result<String, String> {
    if points.len() != k.n_vertices() {
        return Err(format!("complex has {} vertices but {} points were given", k.n_vertices(), points.len()));
    }
    let f = Frame::fit(points.iter());
    let mut out = String::new();
    header(&mut out);
    for t in k.triangles() {
        let [a, b, c] = t.map(|v| f.map(&points[v]));
        let _ = writeln!(
            out,
            "<polygon class=\"triangle\" points=\"{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}\" fill=\"steelblue\" fill-opacity=\"0.25\" stroke=\"none\"/>",
            a.0, a.1, b.0, b.1, c.0, c.1
        );
    }
    for [a, b] in k.edges() {
        line(&mut out, f.map(&points[*a]), f.map(&points[*b]), "edge");
    }
    for p in points {
        dot(&mut out, f.map(p));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders closed polylines over an optional cloud of sample points.
pub fn render_polylines(loops: &[Vec<Point>], points: &[Point]) -> String {
    let f = Frame::fit(loops.iter().flatten().chain(points));
    let mut out = String::new();
    header(&mut out);
    for lp in loops {
        for k in 0..lp.len() {
            line(&mut out, f.map(&lp[k]), f.map(&lp[(k + 1) % lp.len()]), "edge");
        }
    }
    for p in points {
        dot(&mut out, f.map(p));
    }
    out.push_str("</svg>\n");
    out
}
