//! First homology over GF(2) of 2-skeleta, and the two-scale image rank.
//!
//! Chains are sparse: a GF(2) vector is the sorted list of its nonzero
//! indices, and addition is symmetric difference. Only `b0` and `b1` are
//! meaningful since complexes are truncated at dimension two.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{self, ComplexError, SimplicialComplex2};
use crate::sampling::Sample;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomologyError {
    #[error("first complex is not a subcomplex of the second")]
    NotNested,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Sparse GF(2) vector: sorted, duplicate-free nonzero indices.
pub type Chain = Vec<usize>;

/// `a + b` over GF(2).
pub fn add_chains(a: &[usize], b: &[usize]) -> Chain {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Incrementally reduced set of GF(2) vectors, keyed by their lowest one
/// (largest index).
#[derive(Debug, Clone)]
pub struct Gf2Basis {
    by_pivot: Vec<Option<Chain>>,
    rank: usize,
}

impl Gf2Basis {
    pub fn new(dim: usize) -> Self {
        Self { by_pivot: vec![None; dim], rank: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Remainder of `v` after elimination against the basis.
    pub fn reduce(&self, v: &[usize]) -> Chain {
        let mut v = v.to_vec();
        while let Some(&p) = v.last() {
            match &self.by_pivot[p] {
                Some(col) => v = add_chains(&v, col),
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: &[usize]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns true if it was independent.
    pub fn insert(&mut self, v: &[usize]) -> bool {
        let r = self.reduce(v);
        match r.last() {
            Some(&p) => {
                self.by_pivot[p] = Some(r);
                self.rank += 1;
                true
            }
            None => false,
        }
    }
}

/// Column-sparse boundary operators of a 2-skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrices {
    /// One column per edge, rows are vertices.
    pub d1: Vec<Chain>,
    /// One column per triangle, rows are edges (in the complex's edge order).
    pub d2: Vec<Chain>,
}

impl BoundaryMatrices {
    pub fn of(k: &SimplicialComplex2) -> Self {
        let d1 = k.edges().iter().map(|&[a, b]| vec![a, b]).collect();
        let d2 = k
            .triangles()
            .iter()
            .map(|t| {
                let mut col: Chain =
                    complexes::triangle_faces(t).iter().map(|&f| k.edge_index(f).expect("closed complex")).collect();
                col.sort_unstable();
                col
            })
            .collect();
        Self { d1, d2 }
    }

    /// Image of an edge chain under the first boundary map.
    pub fn boundary1(&self, chain: &[usize]) -> Chain {
        let mut acc = Vec::new();
        for &e in chain {
            acc = add_chains(&acc, &self.d1[e]);
        }
        acc
    }

    /// Reduced basis of the boundary space `B1 = im d2`.
    pub fn boundary_basis(&self, n_edges: usize) -> Gf2Basis {
        let mut b = Gf2Basis::new(n_edges);
        for col in &self.d2 {
            b.insert(col);
        }
        b
    }
}

/// `(b0, b1)`: components of the 1-skeleton, and
/// `b1 = (E - V + b0) - rank d2`.
pub fn betti_numbers(k: &SimplicialComplex2) -> (usize, usize) {
    let b0 = count_components(k);
    let cycles = k.edges().len() + b0 - k.n_vertices();
    let rank_d2 = BoundaryMatrices::of(k).boundary_basis(k.edges().len()).rank();
    (b0, cycles - rank_d2)
}

fn count_components(k: &SimplicialComplex2) -> usize {
    let mut uf = UnionFind::new(k.n_vertices());
    let merges = k.edges().iter().filter(|&&[a, b]| uf.union(a, b)).count();
    k.n_vertices() - merges
}

/// Representatives of a basis of `H1`, as edge-index chains of the complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Basis {
    pub cycles: Vec<Chain>,
}

impl H1Basis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// Fundamental cycles of a spanning forest, filtered to an independent set
/// modulo boundaries. Exactly `b1` cycles, sorted by their smallest edge.
pub fn h1_basis(k: &SimplicialComplex2) -> H1Basis {
    let n = k.n_vertices();
    let edges = k.edges();
    // Spanning forest by BFS; parent edge per vertex.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &[a, b]) in edges.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut in_tree = vec![false; edges.len()];
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((v, e));
                    in_tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let bd = BoundaryMatrices::of(k);
    let mut span = bd.boundary_basis(edges.len());
    let mut cycles = Vec::new();
    for (e, &[a, b]) in edges.iter().enumerate() {
        if in_tree[e] {
            continue;
        }
        let mut chain = vec![e];
        let (mut x, mut y) = (a, b);
        while x != y {
            if depth[x] < depth[y] {
                std::mem::swap(&mut x, &mut y);
            }
            let (p, pe) = parent[x].expect("non-root has a parent");
            chain.push(pe);
            x = p;
        }
        chain.sort_unstable();
        if span.insert(&chain) {
            cycles.push(chain);
        }
    }
    cycles.sort_by_key(|c| c[0]);
    H1Basis { cycles }
}

/// Re-expresses an edge chain of `from` in the edge indexing of `to`.
fn push_chain(chain: &[usize], from: &SimplicialComplex2, to: &SimplicialComplex2) -> Chain {
    let mut out: Chain = chain.iter().map(|&e| to.edge_index(from.edges()[e]).expect("nested complexes")).collect();
    out.sort_unstable();
    out
}

/// Rank of the map `H1(K1) -> H1(K2)` induced by inclusion.
pub fn image_rank(k1: &SimplicialComplex2, k2: &SimplicialComplex2) -> Result<usize, HomologyError> {
    if !k1.is_subcomplex_of(k2) {
        return Err(HomologyError::NotNested);
    }
    let mut span = BoundaryMatrices::of(k2).boundary_basis(k2.edges().len());
    let before = span.rank();
    for z in &h1_basis(k1).cycles {
        span.insert(&push_chain(z, k1, k2));
    }
    Ok(span.rank() - before)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Iterate over cycles of the small nerve and drop the ones that bound
    /// in the large nerve.
    Literal,
    /// Rank of the induced map directly.
    ImageRank,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Literal => "literal",
            Method::ImageRank => "image-rank",
        })
    }
}

/// Report of the two-scale reconstruction of `b1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Algorithm1Report {
    pub b1_estimate: usize,
    #[serde(rename = "b1_K1")]
    pub b1_k1: usize,
    #[serde(rename = "b1_K2")]
    pub b1_k2: usize,
    pub collapsed: usize,
    pub method: String,
    pub eps: f64,
    pub xi: f64,
}

/// Estimates `b1` of the sampled space from the nerves at `eps` and `xi * eps`.
///
/// The literal method walks the `H1(K1)` basis, discards ("collapses") every
/// cycle that is a boundary in `K2`, then returns the rank of the survivors
/// in `H1(K2)`. Collapsing a class never touches the simplices of `K1`.
pub fn algorithm1(s: &Sample, eps: f64, xi: f64, method: Method) -> Result<Algorithm1Report, HomologyError> {
    let (k1, k2) = complexes::nerve_pair(s, eps, xi)?;
    two_scale_b1(&k1, &k2, eps, xi, method)
}

/// [`algorithm1`] on prebuilt nested complexes.
pub fn two_scale_b1(
    k1: &SimplicialComplex2,
    k2: &SimplicialComplex2,
    eps: f64,
    xi: f64,
    method: Method,
) -> Result<Algorithm1Report, HomologyError> {
    let basis = h1_basis(k1);
    let (_, b1_k2) = betti_numbers(k2);
    let (b1_estimate, collapsed) = match method {
        Method::ImageRank => {
            let r = image_rank(k1, k2)?;
            (r, basis.len() - r)
        }
        Method::Literal => {
            if !k1.is_subcomplex_of(k2) {
                return Err(HomologyError::NotNested);
            }
            let boundaries = BoundaryMatrices::of(k2).boundary_basis(k2.edges().len());
            let mut survivors = boundaries.clone();
            let mut collapsed = 0;
            for z in &basis.cycles {
                let pushed = push_chain(z, k1, k2);
                if boundaries.contains(&pushed) {
                    collapsed += 1;
                } else {
                    survivors.insert(&pushed);
                }
            }
            (survivors.rank() - boundaries.rank(), collapsed)
        }
    };
    Ok(Algorithm1Report { b1_estimate, b1_k1: basis.len(), b1_k2, collapsed, method: method.to_string(), eps, xi })
}
