//! Closed planar curves: the polyline through ordered samples, which for a
//! covering sample of a smooth closed curve is the medial axis of `S^eps`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{self, ComplexError};
use crate::geometry::{self, dist, Contact, Point, Segment, TOL};
use crate::homology;
use crate::sampling::Sample;

/// Equidistance tolerance of the medial-axis check, relative to `eps`.
pub const MEDIAL_TOL_FACTOR: f64 = 5e-3;
/// Exclusion slack for boundary points of `S^eps`.
const BOUNDARY_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("curve reconstruction works in the plane, got dimension {0}")]
    NotPlanar(usize),
    #[error("consecutive polyline vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("polyline segments {0} and {1} intersect")]
    NonSimple(usize, usize),
    #[error("reconstruction rejected: {}", .0.reasons.join("; "))]
    Rejected(Box<CurveReport>),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Simple closed polygon in the plane (at least three vertices).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedPolyline {
    vertices: Vec<Point>,
}

impl ClosedPolyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self, CurveError> {
        let n = vertices.len();
        if n < 3 {
            return Err(CurveError::TooFewPoints(n));
        }
        if let Some(p) = vertices.iter().find(|p| p.dim() != 2) {
            return Err(CurveError::NotPlanar(p.dim()));
        }
        for i in 0..n {
            if dist(&vertices[i], &vertices[(i + 1) % n]) <= TOL {
                return Err(CurveError::RepeatedVertex(i, (i + 1) % n));
            }
        }
        let p = Self { vertices };
        if let Some((a, b)) = first_crossing(&[p.segments()]) {
            return Err(CurveError::NonSimple(a.1, b.1));
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Segment `i` joins vertex `i` to vertex `i + 1 (mod n)`.
    pub fn segments(&self) -> Vec<Segment> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| Segment::new(self.vertices[i].clone(), self.vertices[(i + 1) % n].clone()).expect("distinct"))
            .collect()
    }
}

/// First pair of offending segments across a set of closed polylines, as
/// `((polyline, segment), (polyline, segment))`. Consecutive segments of the
/// same polyline may only share their common vertex; all others must be
/// disjoint.
fn first_crossing(polys: &[Vec<Segment>]) -> Option<((usize, usize), (usize, usize))> {
    let flat: Vec<(usize, usize, &Segment)> =
        polys.iter().enumerate().flat_map(|(p, segs)| segs.iter().enumerate().map(move |(i, s)| (p, i, s))).collect();
    for x in 0..flat.len() {
        for y in x + 1..flat.len() {
            let (pa, ia, sa) = flat[x];
            let (pb, ib, sb) = flat[y];
            let n = polys[pa].len();
            let adjacent = pa == pb && (ib == ia + 1 || (ia == 0 && ib == n - 1));
            let contact = geometry::segments_intersect(sa, sb).expect("planar");
            let ok = if adjacent {
                // A triangle's segments are pairwise adjacent.
                contact == Contact::SharedEndpoint
            } else {
                contact == Contact::Disjoint
            };
            if !ok {
                return Some(((pa, ia), (pb, ib)));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMode {
    /// Trust the input order.
    Given,
    /// Greedy nearest-neighbour chain from point 0.
    NearestNeighbor,
}

fn check_planar(s: &Sample) -> Result<(), CurveError> {
    if s.len() < 3 {
        return Err(CurveError::TooFewPoints(s.len()));
    }
    if let Some(p) = s.points.iter().find(|p| p.dim() != 2) {
        return Err(CurveError::NotPlanar(p.dim()));
    }
    Ok(())
}

/// Cyclic order of the sample points along the curve.
///
/// Nearest-neighbour chaining fails instead of returning a self-crossing
/// polygon.
pub fn order_samples(s: &Sample, mode: OrderMode) -> Result<Vec<usize>, CurveError> {
    check_planar(s)?;
    let n = s.len();
    let order = match mode {
        OrderMode::Given => (0..n).collect(),
        OrderMode::NearestNeighbor => {
            let mut used = vec![false; n];
            let mut order = Vec::with_capacity(n);
            let mut cur = 0;
            used[0] = true;
            order.push(0);
            for _ in 1..n {
                let next = (0..n)
                    .filter(|&j| !used[j])
                    .min_by(|&a, &b| dist(&s.points[cur], &s.points[a]).total_cmp(&dist(&s.points[cur], &s.points[b])))
                    .expect("unused point remains");
                used[next] = true;
                order.push(next);
                cur = next;
            }
            ClosedPolyline::new(order.iter().map(|&i| s.points[i].clone()).collect())?;
            order
        }
    };
    Ok(order)
}

/// Diagnostics for a curve reconstruction, accepted or not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveReport {
    pub accepted: bool,
    pub reasons: Vec<String>,
    pub eps: f64,
    pub n_points: usize,
    pub components: usize,
    /// Betti numbers of the whole `eps`-nerve.
    pub nerve_betti: (usize, usize),
    pub simple: bool,
    pub max_edge_length: f64,
    /// Sample indices of each reconstructed loop, in curve order.
    pub orders: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveReconstruction {
    pub polylines: Vec<ClosedPolyline>,
    pub report: CurveReport,
}

/// Polyline through the ordered samples, one loop per nerve component.
///
/// Accepted only if every loop is simple, every polyline edge is at most
/// `2 eps` long and every component of the `eps`-nerve is a homology circle.
pub fn reconstruct_curve(s: &Sample, eps: f64, mode: OrderMode) -> Result<CurveReconstruction, CurveError> {
    check_planar(s)?;
    let nerve = complexes::cech_nerve(s, eps)?;
    let comp = nerve.components();
    let n_comp = comp.iter().max().map_or(0, |c| c + 1);
    let mut reasons = Vec::new();
    let mut orders = Vec::new();
    for c in 0..n_comp {
        let members: Vec<usize> = (0..s.len()).filter(|&v| comp[v] == c).collect();
        let betti = homology::betti_numbers(&nerve.induced(&members));
        if betti != (1, 1) {
            reasons.push(format!(
                "nerve component {c} ({} points) has Betti numbers {betti:?}, not (1, 1)",
                members.len()
            ));
            continue;
        }
        let sub = Sample::from_points(members.iter().map(|&v| s.points[v].clone()).collect());
        match order_samples(&sub, mode) {
            Ok(local) => orders.push(local.iter().map(|&k| members[k]).collect::<Vec<_>>()),
            Err(e) => reasons.push(format!("component {c}: ordering failed: {e}")),
        }
    }

    let mut max_edge: f64 = 0.0;
    let mut loops = Vec::new();
    for (c, order) in orders.iter().enumerate() {
        let n = order.len();
        for k in 0..n {
            let (a, b) = (order[k], order[(k + 1) % n]);
            let d = dist(&s.points[a], &s.points[b]);
            max_edge = max_edge.max(d);
            if d > 2.0 * eps + TOL {
                reasons.push(format!("loop {c}: edge {a}-{b} has length {d} > 2 eps"));
            }
        }
        let pts: Vec<Point> = order.iter().map(|&i| s.points[i].clone()).collect();
        match ClosedPolyline::new(pts) {
            Ok(p) => loops.push(p),
            Err(e) => reasons.push(format!("loop {c}: {e}")),
        }
    }
    let mut simple = loops.len() == orders.len();
    let segs: Vec<Vec<Segment>> = loops.iter().map(ClosedPolyline::segments).collect();
    if let Some(((pa, ia), (pb, ib))) = first_crossing(&segs) {
        simple = false;
        reasons.push(format!("segment {ia} of loop {pa} meets segment {ib} of loop {pb}"));
    }

    let report = CurveReport {
        accepted: reasons.is_empty(),
        reasons,
        eps,
        n_points: s.len(),
        components: n_comp,
        nerve_betti: homology::betti_numbers(&nerve),
        simple,
        max_edge_length: max_edge,
        orders,
    };
    if !report.accepted {
        return Err(CurveError::Rejected(Box::new(report)));
    }
    Ok(CurveReconstruction { polylines: loops, report })
}

/// Numerical medial-axis certificate for a reconstructed polyline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedialAxisReport {
    pub probes: usize,
    pub passed: usize,
    pub pass_fraction: f64,
    pub boundary_points: usize,
    pub tolerance: f64,
}

/// Points of the boundary of `S^eps`: a uniform angular grid on every
/// circle plus every pairwise circle intersection, keeping only points not
/// interior to another ball. The grid is refined until at least `target`
/// points survive (or the grid reaches `2^20` points per circle).
pub fn boundary_points(s: &Sample, eps: f64, target: usize) -> Vec<Point> {
    let n = s.len();
    let mut per_circle = target.div_ceil(n.max(1)).max(8);
    let mut corners = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (&s.points[i], &s.points[j]);
            let d = dist(p, q);
            if d == 0.0 || d > 2.0 * eps {
                continue;
            }
            let mid = p.lerp(q, 0.5);
            let h = (eps * eps - d * d / 4.0).max(0.0).sqrt();
            let (nx, ny) = (-(q.y() - p.y()) / d, (q.x() - p.x()) / d);
            corners.push(Point::xy(mid.x() + h * nx, mid.y() + h * ny));
            corners.push(Point::xy(mid.x() - h * nx, mid.y() - h * ny));
        }
    }
    let exterior = |b: &Point| s.points.iter().all(|c| dist(b, c) >= eps - BOUNDARY_SLACK);
    corners.retain(exterior);
    loop {
        let mut out = corners.clone();
        for c in &s.points {
            for k in 0..per_circle {
                let a = std::f64::consts::TAU * k as f64 / per_circle as f64;
                let b = Point::xy(c.x() + eps * a.cos(), c.y() + eps * a.sin());
                if exterior(&b) {
                    out.push(b);
                }
            }
        }
        if out.len() >= target || per_circle >= 1 << 20 {
            return out;
        }
        per_circle *= 2;
    }
}

/// Checks, at `n_probe` interior points of every polyline segment, that the
/// probe lies in `S^eps` and that its nearest boundary points on the two
/// sides of the segment are equidistant within `5e-3 * eps`.
pub fn validate_medial_axis(
    p: &ClosedPolyline,
    s: &Sample,
    eps: f64,
    n_probe: usize,
    n_boundary: usize,
) -> Result<MedialAxisReport, CurveError> {
    check_planar(s)?;
    let boundary = boundary_points(s, eps, n_boundary);
    let tol = MEDIAL_TOL_FACTOR * eps;
    let mut probes = 0;
    let mut passed = 0;
    for seg in p.segments() {
        let d = seg.direction();
        for j in 1..=n_probe {
            let z = seg.at(j as f64 / (n_probe + 1) as f64);
            probes += 1;
            let inside = s.points.iter().any(|c| dist(&z, c) <= eps + TOL);
            let side = |b: &Point| d[0] * (b.y() - z.y()) - d[1] * (b.x() - z.x());
            let nearest = boundary.iter().min_by(|a, b| dist(&z, a).total_cmp(&dist(&z, b)));
            let ok = inside
                && nearest.is_some_and(|b1| {
                    let s1 = side(b1);
                    let other = boundary
                        .iter()
                        .filter(|b| side(b) * s1 < 0.0)
                        .map(|b| dist(&z, b))
                        .fold(f64::INFINITY, f64::min);
                    (other - dist(&z, b1)).abs() <= tol
                });
            if ok {
                passed += 1;
            }
        }
    }
    Ok(MedialAxisReport {
        probes,
        passed,
        pass_fraction: if probes == 0 { 0.0 } else { passed as f64 / probes as f64 },
        boundary_points: boundary.len(),
        tolerance: tol,
    })
}

/// `n` points on a circle, in angular order starting at angle `phase`.
pub fn circle_sample(center: (f64, f64), radius: f64, n: usize, phase: f64) -> Sample {
    Sample::from_points(
        (0..n)
            .map(|k| {
                let a = phase + std::f64::consts::TAU * k as f64 / n as f64;
                Point::xy(center.0 + radius * a.cos(), center.1 + radius * a.sin())
            })
            .collect(),
    )
}
