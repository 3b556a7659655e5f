//! Euclidean primitives in `R^d`.
//!
//! Every membership or intersection predicate in the crate treats balls as
//! closed and widens them by [`TOL`]: "within distance `r`" means
//! `distance <= r + TOL`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global absolute tolerance for closed-ball predicates.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero-length vector has no direction")]
    ZeroVector,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("operation requires dimension 2, got {0}")]
    NotPlanar(usize),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(f64),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

/// A point in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self { coords })
    }

    /// Shorthand for planar points. Panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        Self::new(vec![x, y]).expect("finite planar coordinates")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    /// `self + s * dir`, with `dir` given as a raw vector.
    pub fn offset(&self, dir: &[f64], s: f64) -> Point {
        Point { coords: self.coords.iter().zip(dir).map(|(a, d)| a + s * d).collect() }
    }

    /// Vector `other - self`.
    pub fn to(&self, other: &Point) -> Vec<f64> {
        other.coords.iter().zip(&self.coords).map(|(b, a)| b - a).collect()
    }

    /// Affine combination `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + t * (b - a)).collect() }
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(GeometryError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Squared distance without a dimension check. Callers guarantee equal dimensions.
pub(crate) fn dist2(p: &Point, q: &Point) -> f64 {
    p.coords.iter().zip(&q.coords).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub(crate) fn dist(p: &Point, q: &Point) -> f64 {
    dist2(p, q).sqrt()
}

pub fn euclidean_distance(p: &Point, q: &Point) -> Result<f64> {
    p.check_dim(q)?;
    Ok(dist(p, q))
}

/// Closed ball. Radius zero is only produced by [`min_enclosing_ball_3`] on
/// coincident inputs; [`Ball::new`] insists on a positive radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self { center, radius })
    }

    /// Closed membership with the global tolerance.
    pub fn contains(&self, p: &Point) -> bool {
        dist(&self.center, p) <= self.radius + TOL
    }
}

/// Smallest ball enclosing three points in any dimension.
///
/// If the triangle is right or obtuse (including collinear and repeated
/// points) the answer is the diametral ball of its longest side, otherwise it
/// is the circumscribed ball.
pub fn min_enclosing_ball_3(p: &Point, q: &Point, r: &Point) -> Result<Ball> {
    p.check_dim(q)?;
    p.check_dim(r)?;
    let (pts, sq) = sorted_sides(p, q, r);
    let [a2, b2, c2] = sq;
    // pts[2] is the vertex opposite the longest side pts[0]-pts[1].
    if a2 + b2 <= c2 {
        let center = pts[0].lerp(pts[1], 0.5);
        return Ok(Ball { center, radius: c2.sqrt() / 2.0 });
    }
    // Barycentric circumcenter: weights a^2 (b^2 + c^2 - a^2) etc, where a is
    // the side opposite each vertex.
    let opp = [dist2(pts[1], pts[2]), dist2(pts[0], pts[2]), dist2(pts[0], pts[1])];
    let sum: f64 = opp.iter().sum();
    let w: Vec<f64> = opp.iter().map(|&s| s * (sum - 2.0 * s)).collect();
    let total: f64 = w.iter().sum();
    let dim = p.dim();
    let mut c = vec![0.0; dim];
    for (k, pt) in pts.iter().enumerate() {
        for (ci, x) in c.iter_mut().zip(pt.coords()) {
            *ci += w[k] / total * x;
        }
    }
    let center = Point { coords: c };
    let radius = pts.iter().map(|pt| dist(&center, pt)).fold(0.0_f64, f64::max);
    Ok(Ball { center, radius })
}

/// Returns the three points reordered so the longest side is `[0]-[1]`,
/// together with the squared side lengths `[|12|^2, |02|^2, |01|^2]` sorted
/// so the last one is the longest.
fn sorted_sides<'a>(p: &'a Point, q: &'a Point, r: &'a Point) -> ([&'a Point; 3], [f64; 3]) {
    let pq = dist2(p, q);
    let qr = dist2(q, r);
    let pr = dist2(p, r);
    if pq >= qr && pq >= pr {
        ([p, q, r], [qr, pr, pq])
    } else if qr >= pr {
        ([q, r, p], [pr, pq, qr])
    } else {
        ([p, r, q], [pq, qr, pr])
    }
}

/// A straight segment with distinct endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        a.check_dim(&b)?;
        if dist2(&a, &b) == 0.0 {
            return Err(GeometryError::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        dist(&self.a, &self.b)
    }

    pub fn direction(&self) -> Vec<f64> {
        self.a.to(&self.b)
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(&self.b, t)
    }
}

/// Parameter interval `[t0, t1]` of the segment inside the closed ball, or
/// `None` when they do not meet.
pub fn segment_ball_intersection(s: &Segment, b: &Ball) -> Result<Option<(f64, f64)>> {
    s.a.check_dim(&b.center)?;
    let d = s.direction();
    let f = b.center.to(&s.a);
    let r = b.radius + TOL;
    let qa = dot(&d, &d);
    let qb = 2.0 * dot(&d, &f);
    let qc = dot(&f, &f) - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Ok(None);
    }
    let sq = disc.sqrt();
    // Stable root pair.
    let q = -0.5 * (qb + qb.signum() * sq);
    let (mut t0, mut t1) = if q != 0.0 {
        let x = q / qa;
        let y = qc / q;
        (x.min(y), x.max(y))
    } else {
        (-sq / (2.0 * qa), sq / (2.0 * qa))
    };
    if t1 < 0.0 || t0 > 1.0 {
        return Ok(None);
    }
    t0 = t0.max(0.0);
    t1 = t1.min(1.0);
    Ok(Some((t0, t1)))
}

/// How two closed planar segments meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contact {
    Disjoint,
    /// The only common point is an endpoint of both segments.
    SharedEndpoint,
    /// Any other common point: a crossing, a T-junction or a collinear overlap.
    Intersecting,
}

impl Contact {
    pub fn touches(self) -> bool {
        self != Contact::Disjoint
    }
}

fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x())
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    p.x() >= a.x().min(b.x()) - TOL
        && p.x() <= a.x().max(b.x()) + TOL
        && p.y() >= a.y().min(b.y()) - TOL
        && p.y() <= a.y().max(b.y()) + TOL
}

fn same_point(p: &Point, q: &Point) -> bool {
    dist(p, q) <= TOL
}

/// Classifies the contact between two closed segments in the plane.
pub fn segments_intersect(s1: &Segment, s2: &Segment) -> Result<Contact> {
    for s in [s1, s2] {
        if s.a.dim() != 2 {
            return Err(GeometryError::NotPlanar(s.a.dim()));
        }
    }
    let (p1, p2, q1, q2) = (&s1.a, &s1.b, &s2.a, &s2.b);
    let scale1 = s1.length();
    let scale2 = s2.length();
    // Orientation values normalized to signed distances.
    let d1 = orient(q1, q2, p1) / scale2;
    let d2 = orient(q1, q2, p2) / scale2;
    let d3 = orient(p1, p2, q1) / scale1;
    let d4 = orient(p1, p2, q2) / scale1;
    let sign = |v: f64| {
        if v > TOL {
            1
        } else if v < -TOL {
            -1
        } else {
            0
        }
    };
    let (o1, o2, o3, o4) = (sign(d1), sign(d2), sign(d3), sign(d4));

    let mut common = Vec::new();
    if o1 == 0 && on_segment(q1, q2, p1) {
        common.push(p1);
    }
    if o2 == 0 && on_segment(q1, q2, p2) {
        common.push(p2);
    }
    if o3 == 0 && on_segment(p1, p2, q1) {
        common.push(q1);
    }
    if o4 == 0 && on_segment(p1, p2, q2) {
        common.push(q2);
    }
    let proper = o1 * o2 < 0 && o3 * o4 < 0;
    if proper {
        return Ok(Contact::Intersecting);
    }
    if common.is_empty() {
        return Ok(Contact::Disjoint);
    }
    // Every touching point must be a shared endpoint for adjacency.
    let shared = |p: &Point| (same_point(p, p1) || same_point(p, p2)) && (same_point(p, q1) || same_point(p, q2));
    if common.iter().all(|p| shared(p)) {
        let first = common[0];
        if common.iter().all(|p| same_point(p, first)) {
            return Ok(Contact::SharedEndpoint);
        }
    }
    Ok(Contact::Intersecting)
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub fn angle_between(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(GeometryError::DimensionMismatch(u.len(), v.len()));
    }
    let nu = norm(u);
    let nv = norm(v);
    if nu == 0.0 || nv == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0).acos())
}

/// Minimum distance between two segments in `R^d`.
pub fn segment_segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    let d1 = s1.direction();
    let d2 = s2.direction();
    let r = s2.a.to(&s1.a);
    let a = dot(&d1, &d1);
    let e = dot(&d2, &d2);
    let f = dot(&d2, &r);
    let c = dot(&d1, &r);
    let b = dot(&d1, &d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-14 * a * e { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    dist(&s1.at(s), &s2.at(t))
}

/// Distance from a point to a segment.
pub fn point_segment_distance(p: &Point, s: &Segment) -> f64 {
    let d = s.direction();
    let t = (dot(&s.a.to(p), &d) / dot(&d, &d)).clamp(0.0, 1.0);
    dist(p, &s.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn seg(a: (f64, f64), b: (f64, f64)) -> Segment {
        Segment::new(Point::xy(a.0, a.1), Point::xy(b.0, b.1)).unwrap()
    }

    #[test]
    fn distance_examples() {
        let o = Point::xy(0.0, 0.0);
        assert_eq!(euclidean_distance(&o, &o).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&o, &Point::xy(3.0, 4.0)).unwrap(), 5.0);
        let d = euclidean_distance(&Point::xy(1.0, 1.0), &Point::xy(2.0, 2.0)).unwrap();
        assert_abs_diff_eq!(d, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let p = Point::new(vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(euclidean_distance(&p, &Point::xy(1.0, 0.0)), Err(GeometryError::DimensionMismatch(3, 2)));
    }

    #[test]
    fn point_rejects_bad_coordinates() {
        assert!(Point::new(vec![1.0]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn enclosing_ball_examples() {
        let s = 2.0;
        let h = s * 3f64.sqrt() / 2.0;
        let b = min_enclosing_ball_3(&Point::xy(0.0, 0.0), &Point::xy(s, 0.0), &Point::xy(s / 2.0, h)).unwrap();
        assert_abs_diff_eq!(b.radius, s / 3f64.sqrt(), epsilon = 1e-12);

        let b = min_enclosing_ball_3(&Point::xy(0.0, 0.0), &Point::xy(1.0, 0.0), &Point::xy(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(b.radius, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.center.x(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.center.y(), 0.0, epsilon = 1e-12);

        let p = Point::xy(0.3, -0.7);
        let b = min_enclosing_ball_3(&p, &p, &p).unwrap();
        assert_eq!(b.radius, 0.0);
    }

    #[test]
    fn enclosing_ball_two_coincident() {
        let p = Point::xy(0.0, 0.0);
        let q = Point::xy(2.0, 0.0);
        let b = min_enclosing_ball_3(&p, &p, &q).unwrap();
        assert_abs_diff_eq!(b.radius, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn enclosing_ball_in_three_dimensions() {
        let p = Point::new(vec![1.0, 0.0, 0.0]).unwrap();
        let q = Point::new(vec![0.0, 1.0, 0.0]).unwrap();
        let r = Point::new(vec![0.0, 0.0, 1.0]).unwrap();
        let b = min_enclosing_ball_3(&p, &q, &r).unwrap();
        // Equilateral with side sqrt(2).
        assert_abs_diff_eq!(b.radius, 2f64.sqrt() / 3f64.sqrt(), epsilon = 1e-12);
        for c in b.center.coords() {
            assert_abs_diff_eq!(*c, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn segment_ball_examples() {
        let s = seg((0.0, 0.0), (2.0, 0.0));
        let b = Ball::new(Point::xy(1.0, 0.0), 0.5).unwrap();
        let (t0, t1) = segment_ball_intersection(&s, &b).unwrap().unwrap();
        assert_abs_diff_eq!(t0, 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(t1, 0.75, epsilon = 1e-9);

        let far = Ball::new(Point::xy(1.0, 5.0), 0.5).unwrap();
        assert_eq!(segment_ball_intersection(&s, &far).unwrap(), None);

        let big = Ball::new(Point::xy(1.0, 0.0), 3.0).unwrap();
        assert_eq!(segment_ball_intersection(&s, &big).unwrap(), Some((0.0, 1.0)));
    }

    #[test]
    fn segment_ball_beyond_end() {
        let s = seg((0.0, 0.0), (1.0, 0.0));
        let b = Ball::new(Point::xy(3.0, 0.0), 1.0).unwrap();
        assert_eq!(segment_ball_intersection(&s, &b).unwrap(), None);
    }

    #[test]
    fn contact_examples() {
        let c = segments_intersect(&seg((0.0, 0.0), (1.0, 1.0)), &seg((0.0, 1.0), (1.0, 0.0))).unwrap();
        assert_eq!(c, Contact::Intersecting);
        let c = segments_intersect(&seg((0.0, 0.0), (1.0, 0.0)), &seg((0.0, 1.0), (1.0, 1.0))).unwrap();
        assert_eq!(c, Contact::Disjoint);
        let c = segments_intersect(&seg((0.0, 0.0), (1.0, 0.0)), &seg((1.0, 0.0), (1.0, 1.0))).unwrap();
        assert_eq!(c, Contact::SharedEndpoint);
    }

    #[test]
    fn contact_edge_cases() {
        // T-junction.
        let c = segments_intersect(&seg((0.0, 0.0), (2.0, 0.0)), &seg((1.0, 0.0), (1.0, 1.0))).unwrap();
        assert_eq!(c, Contact::Intersecting);
        // Collinear overlap that also shares an endpoint.
        let c = segments_intersect(&seg((0.0, 0.0), (2.0, 0.0)), &seg((0.0, 0.0), (1.0, 0.0))).unwrap();
        assert_eq!(c, Contact::Intersecting);
        // Collinear, touching end to end.
        let c = segments_intersect(&seg((0.0, 0.0), (1.0, 0.0)), &seg((1.0, 0.0), (2.0, 0.0))).unwrap();
        assert_eq!(c, Contact::SharedEndpoint);
        // Collinear and apart.
        let c = segments_intersect(&seg((0.0, 0.0), (1.0, 0.0)), &seg((2.0, 0.0), (3.0, 0.0))).unwrap();
        assert_eq!(c, Contact::Disjoint);
    }

    #[test]
    fn contact_requires_plane() {
        let a = Point::new(vec![0.0, 0.0, 0.0]).unwrap();
        let b = Point::new(vec![1.0, 0.0, 0.0]).unwrap();
        let s = Segment::new(a, b).unwrap();
        assert_eq!(segments_intersect(&s, &s), Err(GeometryError::NotPlanar(3)));
    }

    #[test]
    fn angle_examples() {
        use std::f64::consts::PI;
        assert_abs_diff_eq!(angle_between(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), PI / 2.0, epsilon = 1e-12);
        assert_eq!(angle_between(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(angle_between(&[1.0, 0.0], &[1.0, 3f64.sqrt()]).unwrap(), PI / 3.0, epsilon = 1e-12);
        assert_eq!(angle_between(&[0.0, 0.0], &[1.0, 0.0]), Err(GeometryError::ZeroVector));
    }

    #[test]
    fn segment_distance_cases() {
        let s1 = seg((0.0, 0.0), (1.0, 0.0));
        assert_abs_diff_eq!(segment_segment_distance(&s1, &seg((0.0, 1.0), (1.0, 1.0))), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(segment_segment_distance(&s1, &seg((2.0, 0.0), (3.0, 0.0))), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(segment_segment_distance(&s1, &seg((0.5, -1.0), (0.5, 1.0))), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(point_segment_distance(&Point::xy(2.0, 1.0), &s1), 2f64.sqrt(), epsilon = 1e-12);
    }

    fn pt() -> impl Strategy<Value = Point> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point::xy(x, y))
    }

    proptest! {
        #[test]
        fn distance_axioms(p in pt(), q in pt(), r in pt()) {
            let d = |a: &Point, b: &Point| euclidean_distance(a, b).unwrap();
            prop_assert!((d(&p, &q) - d(&q, &p)).abs() <= 1e-12);
            prop_assert_eq!(d(&p, &p), 0.0);
            prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
        }

        #[test]
        fn enclosing_ball_is_minimal(p in pt(), q in pt(), r in pt()) {
            let b = min_enclosing_ball_3(&p, &q, &r).unwrap();
            for x in [&p, &q, &r] {
                prop_assert!(dist(&b.center, x) <= b.radius + 1e-9);
            }
            // Grid oracle: no smaller ball around a grid center holds all three.
            let shrunk = b.radius - 1e-6;
            let (lo_x, hi_x) = (p.x().min(q.x()).min(r.x()), p.x().max(q.x()).max(r.x()));
            let (lo_y, hi_y) = (p.y().min(q.y()).min(r.y()), p.y().max(q.y()).max(r.y()));
            let n = 60;
            for i in 0..=n {
                for j in 0..=n {
                    let c = Point::xy(
                        lo_x + (hi_x - lo_x) * i as f64 / n as f64,
                        lo_y + (hi_y - lo_y) * j as f64 / n as f64,
                    );
                    let worst = [&p, &q, &r].iter().map(|x| dist(&c, x)).fold(0.0, f64::max);
                    prop_assert!(worst > shrunk);
                }
            }
        }

        #[test]
        fn segment_ball_matches_pointwise(a in pt(), b in pt(), c in pt(), rad in 0.1..8.0f64) {
            prop_assume!(dist(&a, &b) > 1e-3);
            let s = Segment::new(a, b).unwrap();
            let ball = Ball::new(c, rad).unwrap();
            let iv = segment_ball_intersection(&s, &ball).unwrap();
            for k in 0..1000 {
                let t = k as f64 / 999.0;
                let inside = dist(&s.at(t), &ball.center) <= rad + TOL;
                let in_iv = iv.is_some_and(|(t0, t1)| t >= t0 - 1e-9 && t <= t1 + 1e-9);
                // Skip parameters within rounding reach of the sphere.
                let margin = (dist(&s.at(t), &ball.center) - rad).abs();
                if margin > 1e-7 {
                    prop_assert_eq!(inside, in_iv, "t = {}", t);
                }
            }
        }
    }
}
