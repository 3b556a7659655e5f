//! Standard test graphs and a random planar graph generator.

use rand::Rng;

use crate::complexes::SimplicialComplex2;
use crate::geometry::{self, Point, Segment};
use crate::graph::{EmbeddedMetricGraph, GraphSpec};

pub struct Fixture {
    pub name: &'static str,
    pub graph: EmbeddedMetricGraph,
}

fn build(vertices: Vec<Vec<f64>>, edges: Vec<[usize; 2]>) -> EmbeddedMetricGraph {
    EmbeddedMetricGraph::from_parts(vertices, edges).expect("fixture graphs are valid")
}

fn cycle(n: usize) -> Vec<[usize; 2]> {
    (0..n).map(|i| [i, (i + 1) % n]).collect()
}

pub fn unit_segment() -> EmbeddedMetricGraph {
    build(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![[0, 1]])
}

pub fn unit_triangle() -> EmbeddedMetricGraph {
    build(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]], cycle(3))
}

pub fn unit_square() -> EmbeddedMetricGraph {
    build(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], cycle(4))
}

pub fn square_with_diagonal() -> EmbeddedMetricGraph {
    let mut edges = cycle(4);
    edges.push([0, 2]);
    build(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], edges)
}

/// Two unit squares glued along a common edge.
pub fn two_squares() -> EmbeddedMetricGraph {
    build(
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        vec![[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 0], [1, 4]],
    )
}

/// An "H": two vertical bars of length 2 joined at their midpoints by a
/// crossbar of length 2. All edges have length at least 1.
pub fn h_tree() -> EmbeddedMetricGraph {
    build(
        vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 2.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![2.0, 2.0]],
        vec![[0, 1], [1, 2], [1, 4], [3, 4], [4, 5]],
    )
}

pub fn regular_hexagon() -> EmbeddedMetricGraph {
    let vertices = (0..6)
        .map(|k| {
            let a = std::f64::consts::PI / 3.0 * k as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    build(vertices, cycle(6))
}

/// Unit-length rays from the origin at the given angles (degrees).
pub fn star(angles_deg: &[f64]) -> EmbeddedMetricGraph {
    let mut vertices = vec![vec![0.0, 0.0]];
    let mut edges = Vec::new();
    for (k, a) in angles_deg.iter().enumerate() {
        let r = a.to_radians();
        vertices.push(vec![r.cos(), r.sin()]);
        edges.push([0, k + 1]);
    }
    build(vertices, edges)
}

/// The six graphs used for end-to-end checks, with known first Betti numbers
/// `1, 1, 2, 2, 0, 1`.
pub fn suite() -> Vec<Fixture> {
    vec![
        Fixture { name: "triangle", graph: unit_triangle() },
        Fixture { name: "square", graph: unit_square() },
        Fixture { name: "square_diagonal", graph: square_with_diagonal() },
        Fixture { name: "two_squares", graph: two_squares() },
        Fixture { name: "h_tree", graph: h_tree() },
        Fixture { name: "hexagon", graph: regular_hexagon() },
    ]
}

/// Random straight-line planar graph on up to `n_vertices` points in
/// `[0, 3]^2`.
///
/// Vertices are at least 0.4 apart, edges are at least 0.4 long, edges stay
/// 0.15 away from non-incident vertices and adjacent edges meet at 25 degrees
/// or more. These keep the feature size, and hence sample sizes, moderate.
/// Always returns at least one edge.
pub fn random_planar_graph<R: Rng>(rng: &mut R, n_vertices: usize, edge_attempts: usize) -> EmbeddedMetricGraph {
    const MIN_SEP: f64 = 0.4;
    const CLEARANCE: f64 = 0.15;
    let min_angle = 25f64.to_radians();
    let mut pts: Vec<Point> = Vec::new();
    let mut tries = 0;
    while pts.len() < n_vertices.max(2) && tries < 1000 {
        tries += 1;
        let p = Point::xy(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        if pts.iter().all(|q| geometry::dist(&p, q) >= MIN_SEP) {
            pts.push(p);
        }
    }
    let n = pts.len();
    let mut edges: Vec<[usize; 2]> = Vec::new();
    let admissible = |edges: &[[usize; 2]], i: usize, j: usize| -> bool {
        if i == j || edges.iter().any(|e| (e[0] == i && e[1] == j) || (e[0] == j && e[1] == i)) {
            return false;
        }
        let Ok(s) = Segment::new(pts[i].clone(), pts[j].clone()) else { return false };
        if s.length() < MIN_SEP {
            return false;
        }
        for (v, p) in pts.iter().enumerate() {
            if v != i && v != j && geometry::point_segment_distance(p, &s) < CLEARANCE {
                return false;
            }
        }
        for e in edges {
            let shared = [e[0], e[1]].into_iter().find(|&v| v == i || v == j);
            match shared {
                Some(v) => {
                    let a = if v == i { j } else { i };
                    let b = if e[0] == v { e[1] } else { e[0] };
                    let ang = geometry::angle_between(&pts[v].to(&pts[a]), &pts[v].to(&pts[b])).unwrap_or(0.0);
                    if ang < min_angle {
                        return false;
                    }
                }
                None => {
                    let t = Segment::new(pts[e[0]].clone(), pts[e[1]].clone()).unwrap();
                    if geometry::segment_segment_distance(&s, &t) < CLEARANCE {
                        return false;
                    }
                }
            }
        }
        true
    };
    for _ in 0..edge_attempts {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if admissible(&edges, i, j) {
            edges.push([i, j]);
        }
    }
    if edges.is_empty() {
        // Shortest admissible pair, or the bare segment 0-1 when none is.
        let (mut bi, mut bj, mut bd) = (0, 1, f64::INFINITY);
        for i in 0..n {
            for j in i + 1..n {
                let d = geometry::dist(&pts[i], &pts[j]);
                if d < bd && admissible(&edges, i, j) {
                    (bi, bj, bd) = (i, j, d);
                }
            }
        }
        edges.push([bi, bj]);
    }
    // Drop isolated vertices so every vertex lies on an edge.
    let mut used: Vec<usize> = edges.iter().flat_map(|e| [e[0], e[1]]).collect();
    used.sort_unstable();
    used.dedup();
    let remap = |v: usize| used.binary_search(&v).unwrap();
    let spec = GraphSpec::new(
        used.iter().map(|&v| pts[v].coords().to_vec()).collect(),
        edges.iter().map(|e| [remap(e[0]), remap(e[1])]).collect(),
    );
    spec.try_into().expect("generator only emits valid embeddings")
}

/// Random flag-like 2-complex: each pair is an edge with probability
/// `p_edge`, each triangle of the resulting graph is filled with
/// probability `p_tri`.
pub fn random_complex<R: Rng>(rng: &mut R, n_vertices: usize, p_edge: f64, p_tri: f64) -> SimplicialComplex2 {
    let mut edges = Vec::new();
    for i in 0..n_vertices {
        for j in i + 1..n_vertices {
            if rng.gen_bool(p_edge) {
                edges.push([i, j]);
            }
        }
    }
    let tris = filled_triangles(rng, n_vertices, &edges, p_tri);
    SimplicialComplex2::new(n_vertices, edges, tris).expect("closed by construction")
}

fn filled_triangles<R: Rng>(rng: &mut R, n: usize, edges: &[[usize; 2]], p: f64) -> Vec<[usize; 3]> {
    let mut adj = vec![vec![false; n]; n];
    for &[a, b] in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut tris = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if adj[a][b] && adj[b][c] && adj[a][c] && rng.gen_bool(p) {
                    tris.push([a, b, c]);
                }
            }
        }
    }
    tris
}

/// Random pair `K1 ⊆ K2` with at most `max_k1_edges` edges in `K1`.
pub fn random_nested_pair<R: Rng>(
    rng: &mut R,
    n_vertices: usize,
    max_k1_edges: usize,
) -> (SimplicialComplex2, SimplicialComplex2) {
    let k2 = random_complex(rng, n_vertices, 0.5, 0.4);
    let mut e1: Vec<[usize; 2]> = k2.edges().iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
    while e1.len() > max_k1_edges {
        e1.remove(rng.gen_range(0..e1.len()));
    }
    let t1: Vec<[usize; 3]> = k2
        .triangles()
        .iter()
        .copied()
        .filter(|t| {
            let [a, b, c] = *t;
            [[a, b], [a, c], [b, c]].iter().all(|f| e1.contains(f)) && rng.gen_bool(0.5)
        })
        .collect();
    let k1 = SimplicialComplex2::new(n_vertices, e1, t1).expect("closed by construction");
    (k1, k2)
}
