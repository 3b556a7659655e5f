//! Ground-truth embedded metric graphs with straight-line edges.
//!
//! A [`GraphSpec`] is the raw, unchecked description (the JSON file format).
//! [`EmbeddedMetricGraph`] can only be obtained through validation, so every
//! other operation may assume a valid embedding.

use std::f64::consts::FRAC_PI_2;

use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, dist, Point, Segment, TOL};

/// Slack on the geodesic constraint `d_G >= l`; inclusive so that the
/// feature-size estimate errs on the small side.
pub const GEODESIC_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error("graph has no edges")]
    NoEdges,
    #[error("step must be positive, got {0}")]
    BadStep(f64),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("arclength {t} outside [0, {length}] on edge {edge}")]
    ParameterOutOfRange { edge: usize, t: f64, length: f64 },
}

/// Raw graph description as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DimensionTooSmall { dim: usize },
    WrongArity { vertex: usize, expected: usize, found: usize },
    NonFinite { vertex: usize },
    EndpointOutOfRange { edge: usize, index: usize },
    SelfLoop { edge: usize },
    DuplicateEdge { first: usize, second: usize },
    CoincidentVertices { a: usize, b: usize },
    VertexOnEdge { vertex: usize, edge: usize },
    EdgesIntersect { a: usize, b: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DimensionTooSmall { dim } => write!(f, "dim must be >= 2, got {dim}"),
            Violation::WrongArity { vertex, expected, found } => {
                write!(f, "vertices[{vertex}]: expected {expected} coordinates, found {found}")
            }
            Violation::NonFinite { vertex } => write!(f, "vertices[{vertex}]: non-finite coordinate"),
            Violation::EndpointOutOfRange { edge, index } => {
                write!(f, "edges[{edge}]: vertex index {index} out of range")
            }
            Violation::SelfLoop { edge } => write!(f, "edges[{edge}]: self-loop"),
            Violation::DuplicateEdge { first, second } => {
                write!(f, "edges[{second}]: duplicate of edges[{first}]")
            }
            Violation::CoincidentVertices { a, b } => {
                write!(f, "vertices[{a}] and vertices[{b}] coincide")
            }
            Violation::VertexOnEdge { vertex, edge } => {
                write!(f, "vertices[{vertex}] lies on edges[{edge}]: not an embedding")
            }
            Violation::EdgesIntersect { a, b } => {
                write!(f, "edges[{a}] and edges[{b}] meet away from a shared vertex: not an embedding")
            }
        }
    }
}

/// Every violation found in a [`GraphSpec`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

impl GraphSpec {
    pub fn new(vertices: Vec<Vec<f64>>, edges: Vec<[usize; 2]>) -> Self {
        let dim = vertices.first().map_or(2, |v| v.len());
        Self { dim, vertices, edges }
    }

    /// Checks every structural and embedding invariant and reports all
    /// violations, not just the first.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        if self.dim < 2 {
            out.push(Violation::DimensionTooSmall { dim: self.dim });
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.len() != self.dim {
                out.push(Violation::WrongArity { vertex: i, expected: self.dim, found: v.len() });
            } else if v.iter().any(|c| !c.is_finite()) {
                out.push(Violation::NonFinite { vertex: i });
            }
        }
        // Geometric checks are meaningless on malformed coordinates.
        let coords_ok = out.is_empty();

        let n = self.vertices.len();
        let mut seen = std::collections::HashMap::new();
        let mut good_edges = Vec::new();
        for (k, &[i, j]) in self.edges.iter().enumerate() {
            let mut ok = true;
            for idx in [i, j] {
                if idx >= n {
                    out.push(Violation::EndpointOutOfRange { edge: k, index: idx });
                    ok = false;
                }
            }
            if i == j {
                out.push(Violation::SelfLoop { edge: k });
                ok = false;
            }
            let key = (i.min(j), i.max(j));
            if let Some(&first) = seen.get(&key) {
                out.push(Violation::DuplicateEdge { first, second: k });
                ok = false;
            } else {
                seen.insert(key, k);
            }
            if ok {
                good_edges.push(k);
            }
        }
        if !coords_ok {
            return ValidationReport { violations: out };
        }

        let pts: Vec<Point> = self.vertices.iter().map(|v| Point::new(v.clone()).unwrap()).collect();
        for a in 0..n {
            for b in a + 1..n {
                if dist(&pts[a], &pts[b]) <= TOL {
                    out.push(Violation::CoincidentVertices { a, b });
                }
            }
        }
        let segs: Vec<(usize, Option<Segment>)> = good_edges
            .iter()
            .map(|&k| {
                let [i, j] = self.edges[k];
                (k, Segment::new(pts[i].clone(), pts[j].clone()).ok())
            })
            .collect();
        for &(k, ref s) in &segs {
            let Some(s) = s else { continue };
            let [i, j] = self.edges[k];
            for (v, p) in pts.iter().enumerate() {
                if v != i && v != j && geometry::point_segment_distance(p, s) <= TOL {
                    out.push(Violation::VertexOnEdge { vertex: v, edge: k });
                }
            }
        }
        for x in 0..segs.len() {
            for y in x + 1..segs.len() {
                let (ka, Some(sa)) = &segs[x] else { continue };
                let (kb, Some(sb)) = &segs[y] else { continue };
                let [a0, a1] = self.edges[*ka];
                let [b0, b1] = self.edges[*kb];
                let shared = [a0, a1].iter().find(|v| **v == b0 || **v == b1).copied();
                let bad = match shared {
                    // Adjacent edges must leave the shared vertex in different directions.
                    Some(v) => {
                        let oa = if a0 == v { a1 } else { a0 };
                        let ob = if b0 == v { b1 } else { b0 };
                        let u = pts[v].to(&pts[oa]);
                        let w = pts[v].to(&pts[ob]);
                        geometry::angle_between(&u, &w).map_or(true, |ang| ang <= 1e-9)
                    }
                    None => geometry::segment_segment_distance(sa, sb) <= TOL,
                };
                if bad {
                    out.push(Violation::EdgesIntersect { a: *ka, b: *kb });
                }
            }
        }
        ValidationReport { violations: out }
    }
}

/// A point of the graph given by an edge and an arclength offset from the
/// edge's first endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub edge: usize,
    pub t: f64,
}

/// Validated embedded metric graph. Immutable; vertex-to-vertex shortest
/// paths are computed once at construction.
#[derive(Debug, Clone)]
pub struct EmbeddedMetricGraph {
    dim: usize,
    vertices: Vec<Point>,
    edges: Vec<(usize, usize)>,
    lengths: Vec<f64>,
    vertex_dist: Vec<Vec<f64>>,
}

impl TryFrom<GraphSpec> for EmbeddedMetricGraph {
    type Error = GraphError;

    fn try_from(spec: GraphSpec) -> Result<Self, GraphError> {
        let report = spec.validate();
        if !report.is_valid() {
            return Err(GraphError::Invalid(report));
        }
        let vertices: Vec<Point> = spec.vertices.into_iter().map(|v| Point::new(v).expect("validated")).collect();
        let edges: Vec<(usize, usize)> = spec.edges.iter().map(|&[i, j]| (i, j)).collect();
        let lengths = edges.iter().map(|&(i, j)| dist(&vertices[i], &vertices[j])).collect();
        let mut g = Self { dim: spec.dim, vertices, edges, lengths, vertex_dist: Vec::new() };
        g.vertex_dist = g.all_pairs_vertex_distances();
        Ok(g)
    }
}

impl EmbeddedMetricGraph {
    pub fn from_parts(vertices: Vec<Vec<f64>>, edges: Vec<[usize; 2]>) -> Result<Self, GraphError> {
        GraphSpec::new(vertices, edges).try_into()
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            dim: self.dim,
            vertices: self.vertices.iter().map(|p| p.coords().to_vec()).collect(),
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn vertex_distance(&self, a: usize, b: usize) -> f64 {
        self.vertex_dist[a][b]
    }

    fn all_pairs_vertex_distances(&self) -> Vec<Vec<f64>> {
        let n = self.vertices.len();
        let mut g: UnGraph<(), f64> = UnGraph::with_capacity(n, self.edges.len());
        for _ in 0..n {
            g.add_node(());
        }
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            g.add_edge(NodeIndex::new(i), NodeIndex::new(j), self.lengths[k]);
        }
        (0..n)
            .map(|s| {
                let found = petgraph::algo::dijkstra(&g, NodeIndex::new(s), None, |e| *e.weight());
                let mut row = vec![f64::INFINITY; n];
                for (node, d) in found {
                    row[node.index()] = d;
                }
                row
            })
            .collect()
    }

    pub fn shortest_edge_length(&self) -> Result<f64, GraphError> {
        self.lengths.iter().copied().reduce(f64::min).ok_or(GraphError::NoEdges)
    }

    /// Checked constructor for points on the graph.
    pub fn graph_point(&self, edge: usize, t: f64) -> Result<GraphPoint, GraphError> {
        let length = *self.lengths.get(edge).ok_or(GraphError::EdgeOutOfRange(edge))?;
        if !(t >= -TOL && t <= length + TOL) {
            return Err(GraphError::ParameterOutOfRange { edge, t, length });
        }
        Ok(GraphPoint { edge, t: t.clamp(0.0, length) })
    }

    pub fn point_at(&self, gp: GraphPoint) -> Result<Point, GraphError> {
        let gp = self.graph_point(gp.edge, gp.t)?;
        let (i, j) = self.edges[gp.edge];
        Ok(self.vertices[i].lerp(&self.vertices[j], gp.t / self.lengths[gp.edge]))
    }

    /// Geodesic distance between two graph points; `+inf` across components.
    pub fn geodesic_distance(&self, a: GraphPoint, b: GraphPoint) -> f64 {
        let (ai, aj) = self.edges[a.edge];
        let (bi, bj) = self.edges[b.edge];
        let (la, lb) = (self.lengths[a.edge], self.lengths[b.edge]);
        let mut best = f64::INFINITY;
        if a.edge == b.edge {
            best = (a.t - b.t).abs();
        }
        for (va, oa) in [(ai, a.t), (aj, la - a.t)] {
            for (vb, ob) in [(bi, b.t), (bj, lb - b.t)] {
                best = best.min(oa + self.vertex_dist[va][vb] + ob);
            }
        }
        best
    }

    /// Connected components of the graph, as a component id per vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            for (c, d) in comp.iter_mut().zip(&self.vertex_dist[s]) {
                if d.is_finite() {
                    *c = next;
                }
            }
            next += 1;
        }
        comp
    }

    /// `(b0, b1)` of the graph from its combinatorics: `b1 = m - n + b0`.
    pub fn betti(&self) -> (usize, usize) {
        let b0 = self.components().into_iter().max().map_or(0, |c| c + 1);
        let b1 = self.edges.len() + b0 - self.vertices.len();
        (b0, b1)
    }

    /// Largest `1 / sin(alpha / 2)` over acute angles `alpha` between edges
    /// meeting at a vertex. Non-acute pairs contribute `sqrt(2)`, and so does a
    /// graph without any vertex of degree two or more.
    pub fn xi(&self) -> f64 {
        let fallback = std::f64::consts::SQRT_2;
        let mut best = fallback;
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            incident[i].push(k);
            incident[j].push(k);
        }
        for (v, inc) in incident.iter().enumerate() {
            let dirs: Vec<Vec<f64>> = inc
                .iter()
                .map(|&k| {
                    let (i, j) = self.edges[k];
                    let other = if i == v { j } else { i };
                    self.vertices[v].to(&self.vertices[other])
                })
                .collect();
            for x in 0..dirs.len() {
                for y in x + 1..dirs.len() {
                    let alpha = geometry::angle_between(&dirs[x], &dirs[y]).expect("validated edges");
                    let c = if alpha < FRAC_PI_2 { 1.0 / (alpha / 2.0).sin() } else { fallback };
                    best = best.max(c);
                }
            }
        }
        best
    }

    /// Geodesic feature size estimate at arclength step `step`.
    ///
    /// Uses `tau_G = inf { |x - y| : d_G(x, y) >= l } / 2`. One side of each
    /// pair runs over an arclength grid of spacing at most `step`; for every
    /// grid point the geodesically feasible part of each other edge is a union
    /// of at most two intervals, and the Euclidean distance to a segment is
    /// convex, so the inner minimum is taken exactly.
    pub fn gfs(&self, step: f64) -> Result<GfsEstimate, GraphError> {
        if !step.is_finite() || step <= 0.0 {
            return Err(GraphError::BadStep(step));
        }
        let l = self.shortest_edge_length()?;
        let need = l - GEODESIC_SLACK;
        let m = self.edges.len();
        let best = (0..m)
            .into_par_iter()
            .map(|e| {
                let len = self.lengths[e];
                let k = (len / step).ceil().max(1.0) as usize;
                let mut best = f64::INFINITY;
                for i in 0..=k {
                    let s = len * i as f64 / k as f64;
                    let x = self.point_at(GraphPoint { edge: e, t: s }).expect("in range");
                    for f in 0..m {
                        best = best.min(self.min_feasible_distance(e, s, &x, f, need));
                    }
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min);
        Ok(GfsEstimate { estimate: best / 2.0, error_bound: 2.0 * step, step })
    }

    /// Smallest Euclidean distance from `x` (at offset `s` on edge `e`) to a
    /// point of edge `f` whose geodesic distance from `x` is at least `need`.
    fn min_feasible_distance(&self, e: usize, s: f64, x: &Point, f: usize, need: f64) -> f64 {
        let (ei, ej) = self.edges[e];
        let (fi, fj) = self.edges[f];
        let le = self.lengths[e];
        let lf = self.lengths[f];
        let to_fi = (s + self.vertex_dist[ei][fi]).min(le - s + self.vertex_dist[ej][fi]);
        let to_fj = (s + self.vertex_dist[ei][fj]).min(le - s + self.vertex_dist[ej][fj]);
        // d(t) = min(to_fi + t, to_fj + lf - t [, |s - t| on the same edge]).
        let lo = (need - to_fi).max(0.0);
        let hi = (lf + to_fj - need).min(lf);
        let mut intervals = Vec::with_capacity(2);
        if lo <= hi {
            if e == f {
                if s - need >= lo {
                    intervals.push((lo, (s - need).min(hi)));
                }
                if s + need <= hi {
                    intervals.push(((s + need).max(lo), hi));
                }
            } else {
                intervals.push((lo, hi));
            }
        }
        let a = &self.vertices[fi];
        let dir = a.to(&self.vertices[fj]);
        let unit: Vec<f64> = dir.iter().map(|c| c / lf).collect();
        let proj = geometry::dot(&a.to(x), &unit);
        intervals
            .into_iter()
            .map(|(t0, t1)| dist(x, &a.offset(&unit, proj.clamp(t0, t1))))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Result of [`EmbeddedMetricGraph::gfs`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GfsEstimate {
    pub estimate: f64,
    pub error_bound: f64,
    pub step: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validate_examples() {
        assert!(fixtures::unit_triangle().to_spec().validate().is_valid());

        let crossing =
            GraphSpec::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]], vec![[0, 1], [2, 3]]);
        let r = crossing.validate();
        assert_eq!(r.violations, vec![Violation::EdgesIntersect { a: 0, b: 1 }]);

        let dup = GraphSpec::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![[0, 1], [1, 0]]);
        assert_eq!(dup.validate().violations, vec![Violation::DuplicateEdge { first: 0, second: 1 }]);
    }

    #[test]
    fn validate_reports_every_violation() {
        let spec = GraphSpec {
            dim: 2,
            vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0]],
            edges: vec![[0, 0], [0, 5]],
        };
        let r = spec.validate();
        assert!(r.violations.contains(&Violation::WrongArity { vertex: 2, expected: 2, found: 1 }));
        assert!(r.violations.contains(&Violation::SelfLoop { edge: 0 }));
        assert!(r.violations.contains(&Violation::EndpointOutOfRange { edge: 1, index: 5 }));
    }

    #[test]
    fn validate_overlap_and_vertex_on_edge() {
        // Collinear overlap from a shared vertex.
        let spec = GraphSpec::new(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]], vec![[0, 1], [0, 2]]);
        let r = spec.validate();
        assert!(r.violations.contains(&Violation::VertexOnEdge { vertex: 2, edge: 0 }));
        assert!(r.violations.contains(&Violation::EdgesIntersect { a: 0, b: 1 }));

        let spec = GraphSpec::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![]);
        assert_eq!(spec.validate().violations, vec![Violation::CoincidentVertices { a: 0, b: 1 }]);
    }

    #[test]
    fn validate_three_dimensional_skew_edges() {
        // These cross in projection but not in space.
        let spec = GraphSpec::new(
            vec![vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]],
            vec![[0, 1], [2, 3]],
        );
        assert!(spec.validate().is_valid());
    }

    #[test]
    fn shortest_edge_examples() {
        assert_abs_diff_eq!(fixtures::unit_triangle().shortest_edge_length().unwrap(), 1.0, epsilon = 1e-12);
        let rect = EmbeddedMetricGraph::from_parts(
            vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![0.0, 1.0]],
            vec![[0, 1], [1, 2], [2, 3], [3, 0]],
        )
        .unwrap();
        assert_eq!(rect.shortest_edge_length().unwrap(), 1.0);
        let seg = EmbeddedMetricGraph::from_parts(vec![vec![0.0, 0.0], vec![0.0, 3.0]], vec![[0, 1]]).unwrap();
        assert_eq!(seg.shortest_edge_length().unwrap(), 3.0);
        let lone = EmbeddedMetricGraph::from_parts(vec![vec![0.0, 0.0]], vec![]).unwrap();
        assert_eq!(lone.shortest_edge_length(), Err(GraphError::NoEdges));
    }

    #[test]
    fn geodesic_examples() {
        let g = fixtures::unit_triangle();
        let a = g.graph_point(0, 0.3).unwrap();
        assert_eq!(g.geodesic_distance(a, a), 0.0);
        // Vertices 0 and 1 are the endpoints of edge 0.
        let v0 = g.graph_point(0, 0.0).unwrap();
        let v1 = g.graph_point(0, 1.0).unwrap();
        assert_abs_diff_eq!(g.geodesic_distance(v0, v1), 1.0, epsilon = 1e-12);
        let m0 = g.graph_point(0, 0.5).unwrap();
        let m1 = g.graph_point(1, 0.5).unwrap();
        assert_abs_diff_eq!(g.geodesic_distance(m0, m1), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn geodesic_disconnected_is_infinite() {
        let g = EmbeddedMetricGraph::from_parts(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 2.0]],
            vec![[0, 1], [2, 3]],
        )
        .unwrap();
        let d = g.geodesic_distance(GraphPoint { edge: 0, t: 0.5 }, GraphPoint { edge: 1, t: 0.5 });
        assert!(d.is_infinite());
        assert_eq!(g.betti(), (2, 0));
    }

    #[test]
    fn point_at_examples() {
        let g = EmbeddedMetricGraph::from_parts(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![[0, 1]]).unwrap();
        assert_eq!(g.point_at(GraphPoint { edge: 0, t: 0.0 }).unwrap(), Point::xy(0.0, 0.0));
        assert_eq!(g.point_at(GraphPoint { edge: 0, t: 1.0 }).unwrap(), Point::xy(1.0, 0.0));
        assert_eq!(g.point_at(GraphPoint { edge: 0, t: 0.25 }).unwrap(), Point::xy(0.25, 0.0));
        assert!(matches!(g.point_at(GraphPoint { edge: 0, t: 1.5 }), Err(GraphError::ParameterOutOfRange { .. })));
        assert_eq!(g.point_at(GraphPoint { edge: 3, t: 0.0 }), Err(GraphError::EdgeOutOfRange(3)));
    }

    #[test]
    fn xi_examples() {
        assert_abs_diff_eq!(fixtures::unit_triangle().xi(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fixtures::unit_square().xi(), 2f64.sqrt(), epsilon = 1e-12);
        let star = fixtures::star(&[0.0, 30.0, 150.0, 260.0]);
        assert_abs_diff_eq!(star.xi(), 1.0 / 15f64.to_radians().sin(), epsilon = 1e-9);
        assert_abs_diff_eq!(fixtures::unit_segment().xi(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn gfs_examples() {
        let est = fixtures::unit_segment().gfs(1e-3).unwrap();
        assert_abs_diff_eq!(est.estimate, 0.5, epsilon = 2e-3);
        assert_eq!(est.error_bound, 2e-3);
        // Frozen from the brute-force oracle and the analytic midpoint minimizers.
        let tri = fixtures::unit_triangle().gfs(1e-4).unwrap();
        assert_abs_diff_eq!(tri.estimate, 0.25, epsilon = 2e-4);
        let sq = fixtures::unit_square().gfs(1e-4).unwrap();
        assert_abs_diff_eq!(sq.estimate, 2f64.sqrt() / 4.0, epsilon = 2e-4);
    }

    #[test]
    fn gfs_errors() {
        let g = fixtures::unit_triangle();
        assert_eq!(g.gfs(0.0), Err(GraphError::BadStep(0.0)));
        assert_eq!(g.gfs(-1.0), Err(GraphError::BadStep(-1.0)));
        let lone = EmbeddedMetricGraph::from_parts(vec![vec![0.0, 0.0]], vec![]).unwrap();
        assert_eq!(lone.gfs(1e-3), Err(GraphError::NoEdges));
    }

    #[test]
    fn gfs_bounds_and_step_stability() {
        for g in fixtures::suite().into_iter().map(|f| f.graph) {
            let l = g.shortest_edge_length().unwrap();
            let d = 2e-3 * l;
            let a = g.gfs(d).unwrap().estimate;
            let b = g.gfs(d / 2.0).unwrap().estimate;
            assert!(a > 0.0 && a <= l / 2.0 + 2.0 * d, "estimate {a} for l = {l}");
            assert!((a - b).abs() <= 3.0 * d);
        }
    }

    #[test]
    fn gfs_definition_holds_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fx in fixtures::suite() {
            let g = fx.graph;
            let l = g.shortest_edge_length().unwrap();
            let est = g.gfs(1e-3 * l).unwrap();
            let r = est.estimate - est.error_bound;
            for _ in 0..1000 {
                let a = random_graph_point(&g, &mut rng);
                let b = random_graph_point(&g, &mut rng);
                let pa = g.point_at(a).unwrap();
                let pb = g.point_at(b).unwrap();
                if dist(&pa, &pb) < 2.0 * r {
                    assert!(g.geodesic_distance(a, b) < l, "{}: {:?} {:?}", fx.name, a, b);
                }
            }
        }
    }

    #[test]
    fn geodesic_is_a_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..5 {
            let g = fixtures::random_planar_graph(&mut ChaCha8Rng::seed_from_u64(seed), 7, 10);
            let pts: Vec<GraphPoint> = (0..20).map(|_| random_graph_point(&g, &mut rng)).collect();
            for _ in 0..200 {
                let [a, b, c] = [0; 3].map(|_| pts[rng.gen_range(0..pts.len())]);
                let dab = g.geodesic_distance(a, b);
                let dba = g.geodesic_distance(b, a);
                assert!((dab - dba).abs() <= 1e-9 || (dab.is_infinite() && dba.is_infinite()));
                assert_eq!(g.geodesic_distance(a, a), 0.0);
                let rhs = g.geodesic_distance(a, c) + g.geodesic_distance(c, b);
                assert!(dab <= rhs + 1e-9);
            }
        }
    }

    #[test]
    fn xi_at_least_sqrt2() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = fixtures::random_planar_graph(&mut rng, 8, 12);
            assert!(g.xi() >= 2f64.sqrt() - 1e-12);
        }
    }

    fn random_graph_point(g: &EmbeddedMetricGraph, rng: &mut ChaCha8Rng) -> GraphPoint {
        let e = rng.gen_range(0..g.edges().len());
        GraphPoint { edge: e, t: rng.gen_range(0.0..=g.edge_length(e)) }
    }
}
