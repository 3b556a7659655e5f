//! Slow, independent reference implementations used to certify the main
//! modules. Nothing here calls into `graph`, `complexes` or `homology`
//! beyond reading the domain types.

use thiserror::Error;

use crate::complexes::SimplicialComplex2;
use crate::graph::{EmbeddedMetricGraph, GEODESIC_SLACK};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("fine step {step} exceeds 1e-3 * l = {limit}")]
    StepTooCoarse { step: f64, limit: f64 },
    #[error("instance too large for the oracle: {0}")]
    TooLarge(String),
    #[error("graph has no edges")]
    NoEdges,
    #[error("first complex is not contained in the second")]
    NotNested,
}

/// Geodesic feature size by exhaustive search over all pairs of grid points
/// (spacing at most `fine_step`) on all pairs of edges.
pub fn gfs_bruteforce(g: &EmbeddedMetricGraph, fine_step: f64) -> Result<f64, OracleError> {
    let edges = g.edges();
    let verts = g.vertices();
    if edges.is_empty() {
        return Err(OracleError::NoEdges);
    }
    let len: Vec<f64> = edges
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (verts[i].coords(), verts[j].coords());
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        })
        .collect();
    let l = len.iter().copied().fold(f64::INFINITY, f64::min);
    if (fine_step.is_nan() || fine_step <= 0.0) || fine_step > 1e-3 * l {
        return Err(OracleError::StepTooCoarse { step: fine_step, limit: 1e-3 * l });
    }
    // Floyd-Warshall on the vertices.
    let n = verts.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for (k, &(i, j)) in edges.iter().enumerate() {
        d[i][j] = d[i][j].min(len[k]);
        d[j][i] = d[j][i].min(len[k]);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    // Grid points: (edge, offset, coordinates).
    let mut grid: Vec<(usize, f64, Vec<f64>)> = Vec::new();
    for (k, &(i, j)) in edges.iter().enumerate() {
        let steps = (len[k] / fine_step).ceil() as usize;
        for s in 0..=steps {
            let t = len[k] * s as f64 / steps as f64;
            let w = t / len[k];
            let p = verts[i].coords().iter().zip(verts[j].coords()).map(|(a, b)| a + w * (b - a)).collect();
            grid.push((k, t, p));
        }
    }
    let geo = |a: &(usize, f64, Vec<f64>), b: &(usize, f64, Vec<f64>)| -> f64 {
        let (ai, aj) = edges[a.0];
        let (bi, bj) = edges[b.0];
        let ends_a = [(ai, a.1), (aj, len[a.0] - a.1)];
        let ends_b = [(bi, b.1), (bj, len[b.0] - b.1)];
        let mut best = if a.0 == b.0 { (a.1 - b.1).abs() } else { f64::INFINITY };
        for (u, x) in ends_a {
            for (v, y) in ends_b {
                best = best.min(x + d[u][v] + y);
            }
        }
        best
    };
    let mut best = f64::INFINITY;
    for x in 0..grid.len() {
        for y in x + 1..grid.len() {
            if geo(&grid[x], &grid[y]) >= l - GEODESIC_SLACK {
                let e: f64 = grid[x].2.iter().zip(&grid[y].2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                best = best.min(e);
            }
        }
    }
    Ok(best / 2.0)
}

/// Rank over GF(2) of a dense matrix given as rows, by plain elimination.
fn dense_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn find_edge(k: &SimplicialComplex2, a: usize, b: usize) -> Option<usize> {
    k.edges().iter().position(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a))
}

/// Dense boundary matrices as rows: `d1` is edges x vertices, `d2` is
/// triangles x edges.
fn dense_boundaries(k: &SimplicialComplex2) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    let n = k.n_vertices();
    let m = k.edges().len();
    let d1 = k
        .edges()
        .iter()
        .map(|e| {
            let mut row = vec![false; n];
            row[e[0]] = true;
            row[e[1]] = true;
            row
        })
        .collect();
    let d2 = k
        .triangles()
        .iter()
        .map(|t| {
            let mut row = vec![false; m];
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                row[find_edge(k, a, b).expect("closed complex")] = true;
            }
            row
        })
        .collect();
    (d1, d2)
}

/// Edge limit of [`betti_bruteforce`].
pub const BETTI_MAX_EDGES: usize = 200;

/// `(b0, b1)` from a reachability closure and dense ranks.
pub fn betti_bruteforce(k: &SimplicialComplex2) -> Result<(usize, usize), OracleError> {
    betti_bruteforce_with_limit(k, BETTI_MAX_EDGES)
}

/// [`betti_bruteforce`] with a caller-chosen edge limit, for the few
/// larger complexes worth the cubic cost.
pub fn betti_bruteforce_with_limit(k: &SimplicialComplex2, max_edges: usize) -> Result<(usize, usize), OracleError> {
    let m = k.edges().len();
    if m > max_edges {
        return Err(OracleError::TooLarge(format!("{m} edges > {max_edges}")));
    }
    let n = k.n_vertices();
    let mut reach = vec![vec![false; n]; n];
    for (v, row) in reach.iter_mut().enumerate() {
        row[v] = true;
    }
    for e in k.edges() {
        reach[e[0]][e[1]] = true;
        reach[e[1]][e[0]] = true;
    }
    for w in 0..n {
        for u in 0..n {
            if reach[u][w] {
                let via = reach[w].clone();
                for (r, &x) in reach[u].iter_mut().zip(&via) {
                    *r |= x;
                }
            }
        }
    }
    // Count vertices that are the smallest in their class.
    let b0 = (0..n).filter(|&v| (0..v).all(|u| !reach[u][v])).count();
    let (d1, d2) = dense_boundaries(k);
    let kernel_d1 = m - dense_rank(d1);
    Ok((b0, kernel_d1 - dense_rank(d2)))
}

/// Image rank of `H1(K1) -> H1(K2)` by enumerating every edge subset of
/// `K1`, keeping the cycles and measuring their span modulo boundaries of `K2`.
pub fn image_rank_bruteforce(k1: &SimplicialComplex2, k2: &SimplicialComplex2) -> Result<usize, OracleError> {
    let m1 = k1.edges().len();
    if m1 > 20 {
        return Err(OracleError::TooLarge(format!("{m1} edges in K1 > 20")));
    }
    let m2 = k2.edges().len();
    let into_k2: Vec<usize> =
        k1.edges().iter().map(|e| find_edge(k2, e[0], e[1]).ok_or(OracleError::NotNested)).collect::<Result<_, _>>()?;
    if k1.triangles().iter().any(|t| !k2.triangles().contains(t)) {
        return Err(OracleError::NotNested);
    }
    let n = k1.n_vertices();
    let mut cycles: Vec<Vec<bool>> = Vec::new();
    for mask in 0u32..(1u32 << m1) {
        let mut parity = vec![false; n];
        for (e, ends) in k1.edges().iter().enumerate() {
            if mask >> e & 1 == 1 {
                parity[ends[0]] ^= true;
                parity[ends[1]] ^= true;
            }
        }
        if parity.iter().all(|p| !p) {
            let mut row = vec![false; m2];
            for (e, &f) in into_k2.iter().enumerate() {
                if mask >> e & 1 == 1 {
                    row[f] = true;
                }
            }
            cycles.push(row);
        }
    }
    let (_, boundaries) = dense_boundaries(k2);
    let base = dense_rank(boundaries.clone());
    let mut all = boundaries;
    all.extend(cycles);
    Ok(dense_rank(all) - base)
}
