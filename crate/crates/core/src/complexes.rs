//! Two-skeleta of Čech nerves and Vietoris–Rips complexes.
//!
//! Closed balls are convex and so are all their intersections, so the
//! collection of `eps`-balls around a sample is a good cover and its nerve
//! has the homotopy type of the union `S^eps`. Only simplices up to
//! dimension two are built: first homology depends on nothing higher.

use std::collections::BTreeSet;

use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{self, dist, TOL};
use crate::graph::{EmbeddedMetricGraph, GraphError};
use crate::homology;
use crate::sampling::{self, CoverMode, Sample, SamplingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("sample is empty")]
    EmptySample,
    #[error("eps must be positive, got {0}")]
    BadEps(f64),
    #[error("scale factor xi must be at least 1, got {0}")]
    BadXi(f64),
    #[error("scale must be positive, got {0}")]
    BadScale(f64),
    #[error("sample points have mixed dimensions")]
    MixedDimensions,
    #[error("vertex {index} out of range for {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },
    #[error("simplex {0:?} repeats a vertex")]
    Degenerate(Vec<usize>),
    #[error("duplicate simplex {0:?}")]
    Duplicate(Vec<usize>),
    #[error("triangle {triangle:?} is missing face {face:?}")]
    MissingFace { triangle: [usize; 3], face: [usize; 2] },
    #[error("metric is not a valid distance matrix: {0}")]
    BadMetric(String),
    #[error("eps = {eps} is not below the conjecture threshold {threshold}")]
    AboveThreshold { eps: f64, threshold: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// Simplicial complex truncated at dimension two, on vertices `0..n`.
///
/// Simplices are stored with sorted vertices in lexicographic order, which
/// also fixes the edge indexing used by the homology module.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SimplicialComplex2 {
    n_vertices: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl SimplicialComplex2 {
    /// Builds a complex, sorting simplices and rejecting anything that breaks
    /// face closure, range or uniqueness.
    pub fn new(n_vertices: usize, edges: Vec<[usize; 2]>, triangles: Vec<[usize; 3]>) -> Result<Self, ComplexError> {
        let mut edges: Vec<[usize; 2]> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e
            })
            .collect();
        let mut triangles: Vec<[usize; 3]> = triangles
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        edges.sort_unstable();
        triangles.sort_unstable();
        let k = Self { n_vertices, edges, triangles };
        k.validate()?;
        Ok(k)
    }

    /// Constructor for already sorted, already closed input.
    fn from_sorted(n_vertices: usize, edges: Vec<[usize; 2]>, triangles: Vec<[usize; 3]>) -> Self {
        let k = Self { n_vertices, edges, triangles };
        debug_assert_eq!(k.validate(), Ok(()));
        k
    }

    /// Checks range, sortedness, uniqueness and face closure.
    pub fn validate(&self) -> Result<(), ComplexError> {
        let n = self.n_vertices;
        let check = |s: &[usize]| -> Result<(), ComplexError> {
            for &v in s {
                if v >= n {
                    return Err(ComplexError::VertexOutOfRange { index: v, n });
                }
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ComplexError::Degenerate(s.to_vec()));
            }
            Ok(())
        };
        for e in &self.edges {
            check(e)?;
        }
        for t in &self.triangles {
            check(t)?;
        }
        if let Some(w) = self.edges.windows(2).find(|w| w[0] >= w[1]) {
            return Err(ComplexError::Duplicate(w[1].to_vec()));
        }
        if let Some(w) = self.triangles.windows(2).find(|w| w[0] >= w[1]) {
            return Err(ComplexError::Duplicate(w[1].to_vec()));
        }
        for t in &self.triangles {
            for face in triangle_faces(t) {
                if self.edge_index(face).is_none() {
                    return Err(ComplexError::MissingFace { triangle: *t, face });
                }
            }
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Position of a sorted edge in [`Self::edges`].
    pub fn edge_index(&self, e: [usize; 2]) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn has_triangle(&self, t: [usize; 3]) -> bool {
        self.triangles.binary_search(&t).is_ok()
    }

    /// Simplex-wise inclusion.
    pub fn is_subcomplex_of(&self, other: &Self) -> bool {
        self.n_vertices <= other.n_vertices
            && self.edges.iter().all(|&e| other.edge_index(e).is_some())
            && self.triangles.iter().all(|&t| other.has_triangle(t))
    }

    /// Component id for every vertex of the 1-skeleton.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = homology::UnionFind::new(self.n_vertices);
        for &[a, b] in &self.edges {
            uf.union(a, b);
        }
        let mut ids = vec![usize::MAX; self.n_vertices];
        let mut next = 0;
        let mut out = Vec::with_capacity(self.n_vertices);
        for v in 0..self.n_vertices {
            let r = uf.find(v);
            if ids[r] == usize::MAX {
                ids[r] = next;
                next += 1;
            }
            out.push(ids[r]);
        }
        out
    }

    /// Full subcomplex on the given (sorted) vertices, reindexed to `0..k`.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let map = |v: usize| vertices.binary_search(&v).ok();
        let edges = self.edges.iter().filter_map(|&[a, b]| Some([map(a)?, map(b)?])).collect();
        let triangles = self.triangles.iter().filter_map(|&[a, b, c]| Some([map(a)?, map(b)?, map(c)?])).collect();
        Self::from_sorted(vertices.len(), edges, triangles)
    }
}

pub fn triangle_faces(t: &[usize; 3]) -> [[usize; 2]; 3] {
    [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]]
}

fn check_sample(s: &Sample) -> Result<(), ComplexError> {
    let d = s.dim().ok_or(ComplexError::EmptySample)?;
    if s.points.iter().any(|p| p.dim() != d) {
        return Err(ComplexError::MixedDimensions);
    }
    Ok(())
}

/// Sorted neighbour lists of the graph "within `threshold`" (tolerant).
fn neighbour_lists(n: usize, threshold: f64, d: impl Fn(usize, usize) -> f64 + Sync) -> Vec<Vec<usize>> {
    (0..n).into_par_iter().map(|i| (i + 1..n).filter(|&j| d(i, j) <= threshold + TOL).collect()).collect()
}

/// 2-skeleton of the nerve of closed `eps`-balls around the sample.
///
/// Edge `{i, j}` iff `|x_i - x_j| <= 2 eps`; triangle `{i, j, k}` iff the
/// smallest ball enclosing the three centers has radius at most `eps`.
pub fn cech_nerve(s: &Sample, eps: f64) -> Result<SimplicialComplex2, ComplexError> {
    check_sample(s)?;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(ComplexError::BadEps(eps));
    }
    let pts = &s.points;
    let n = pts.len();
    let nbrs = neighbour_lists(n, 2.0 * eps, |i, j| dist(&pts[i], &pts[j]));
    let triangles = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let nbrs = &nbrs;
            nbrs[i].iter().flat_map(move |&j| {
                sorted_intersection(&nbrs[i], &nbrs[j]).into_iter().filter_map(move |k| {
                    let b = geometry::min_enclosing_ball_3(&pts[i], &pts[j], &pts[k]).expect("same dimension");
                    (b.radius <= eps + TOL).then_some([i, j, k])
                })
            })
        })
        .collect();
    Ok(SimplicialComplex2::from_sorted(n, flatten_edges(&nbrs), triangles))
}

fn flatten_edges(nbrs: &[Vec<usize>]) -> Vec<[usize; 2]> {
    nbrs.iter().enumerate().flat_map(|(i, js)| js.iter().map(move |&j| [i, j])).collect()
}

/// Elements common to two sorted lists.
fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut x, mut y) = (0, 0);
    let mut out = Vec::new();
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
    out
}

/// Nerves at scales `eps` and `xi * eps`; the first is a subcomplex of the second.
pub fn nerve_pair(s: &Sample, eps: f64, xi: f64) -> Result<(SimplicialComplex2, SimplicialComplex2), ComplexError> {
    if !xi.is_finite() || xi < 1.0 {
        return Err(ComplexError::BadXi(xi));
    }
    let k1 = cech_nerve(s, eps)?;
    let k2 = cech_nerve(s, xi * eps)?;
    debug_assert!(k1.is_subcomplex_of(&k2));
    Ok((k1, k2))
}

/// Dense symmetric distance matrix, `+inf` for unreachable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl MetricMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ComplexError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ComplexError::BadMetric("matrix is not square".into()));
        }
        let m = Self { n, data: rows.into_iter().flatten().collect() };
        m.validate()?;
        Ok(m)
    }

    pub fn euclidean(s: &Sample) -> Result<Self, ComplexError> {
        check_sample(s)?;
        let n = s.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = dist(&s.points[i], &s.points[j]);
            }
        }
        Ok(Self { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Zero diagonal, symmetry and nonnegativity, plus the triangle
    /// inequality on finite entries (cubic; meant for tests and small inputs).
    pub fn validate(&self) -> Result<(), ComplexError> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(ComplexError::BadMetric(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                let d = self.get(i, j);
                if d.is_nan() || d < 0.0 {
                    return Err(ComplexError::BadMetric(format!("d({i},{j}) = {d}")));
                }
                if (d - self.get(j, i)).abs() > 1e-9 && !(d.is_infinite() && self.get(j, i).is_infinite()) {
                    return Err(ComplexError::BadMetric(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, j) > self.get(i, k) + self.get(k, j) + 1e-9 {
                        return Err(ComplexError::BadMetric(format!("triangle inequality fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Shortest-path metric of the 1-skeleton of `k`, edges weighted by
/// Euclidean length between the sample points.
pub fn skeleton_geodesic_metric(k: &SimplicialComplex2, s: &Sample) -> Result<MetricMatrix, ComplexError> {
    check_sample(s)?;
    let n = k.n_vertices();
    if n > s.len() {
        return Err(ComplexError::VertexOutOfRange { index: n - 1, n: s.len() });
    }
    let mut g: UnGraph<(), f64> = UnGraph::with_capacity(n, k.edges().len());
    for _ in 0..n {
        g.add_node(());
    }
    for &[a, b] in k.edges() {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(b), dist(&s.points[a], &s.points[b]));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|src| {
            let mut row = vec![f64::INFINITY; n];
            for (v, d) in petgraph::algo::dijkstra(&g, NodeIndex::new(src), None, |e| *e.weight()) {
                row[v.index()] = d;
            }
            row
        })
        .collect();
    // Symmetrize exactly; Dijkstra sums may differ in the last bit by direction.
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = if i == j { 0.0 } else { rows[i][j].min(rows[j][i]) };
        }
    }
    Ok(MetricMatrix { n, data })
}

/// 2-skeleton of the Vietoris–Rips complex: edges at distance at most
/// `scale`, triangles whose three sides all are.
pub fn vietoris_rips(metric: &MetricMatrix, scale: f64) -> Result<SimplicialComplex2, ComplexError> {
    if scale.is_nan() || scale <= 0.0 {
        return Err(ComplexError::BadScale(scale));
    }
    let n = metric.len();
    let nbrs = neighbour_lists(n, scale, |i, j| metric.get(i, j));
    let triangles = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let nbrs = &nbrs;
            nbrs[i]
                .iter()
                .flat_map(move |&j| sorted_intersection(&nbrs[i], &nbrs[j]).into_iter().map(move |k| [i, j, k]))
        })
        .collect();
    Ok(SimplicialComplex2::from_sorted(n, flatten_edges(&nbrs), triangles))
}

/// Outcome of one run of the Vietoris–Rips reconstruction conjecture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub holds: bool,
    pub betti_vr: (usize, usize),
    pub betti_graph: (usize, usize),
    pub eps: f64,
    pub xi: f64,
    pub gfs: f64,
    pub threshold: f64,
    pub vr_scale: f64,
    pub n_points: usize,
    pub seed: u64,
}

/// `gfs / (2 (2 + xi))` at the default step `1e-3 * l`.
pub fn conjecture_threshold(g: &EmbeddedMetricGraph) -> Result<(f64, f64, f64), ComplexError> {
    let l = g.shortest_edge_length()?;
    let gfs = g.gfs(1e-3 * l)?.estimate;
    let xi = g.xi();
    Ok((gfs / (2.0 * (2.0 + xi)), gfs, xi))
}

/// Tests, on one sample, whether the Rips complex of the 1-skeleton
/// geodesic metric of the `eps`-nerve at scale `2 (1 + xi) eps` has the
/// Betti numbers of `g`. The answer is reported, never assumed.
pub fn conjecture_test(g: &EmbeddedMetricGraph, eps: f64, seed: u64) -> Result<ConjectureReport, ComplexError> {
    let (threshold, gfs, xi) = conjecture_threshold(g)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(ComplexError::BadEps(eps));
    }
    if eps >= threshold {
        return Err(ComplexError::AboveThreshold { eps, threshold });
    }
    let s = sampling::sample_cover(g, eps, CoverMode::Jittered, seed)?;
    let k1 = cech_nerve(&s, eps)?;
    let metric = skeleton_geodesic_metric(&k1, &s)?;
    let vr_scale = 2.0 * (1.0 + xi) * eps;
    let vr = vietoris_rips(&metric, vr_scale)?;
    let betti_vr = homology::betti_numbers(&vr);
    let betti_graph = g.betti();
    Ok(ConjectureReport {
        holds: betti_vr == betti_graph,
        betti_vr,
        betti_graph,
        eps,
        xi,
        gfs,
        threshold,
        vr_scale,
        n_points: s.len(),
        seed,
    })
}

/// Set view used by tests and the oracle cross-checks.
pub fn simplex_sets(k: &SimplicialComplex2) -> (BTreeSet<[usize; 2]>, BTreeSet<[usize; 3]>) {
    (k.edges().iter().copied().collect(), k.triangles().iter().copied().collect())
}
