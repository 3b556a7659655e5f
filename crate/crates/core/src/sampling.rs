//! Samples on a ground-truth graph and exact cover verification.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, Ball, Point, Segment, TOL};
use crate::graph::{EmbeddedMetricGraph, GraphPoint};

/// Spacing factor for cover samples: consecutive points on an edge are at
/// most `SPACING_FACTOR * eps` apart.
pub const SPACING_FACTOR: f64 = 1.98;
/// Maximum jitter as a fraction of the nominal spacing.
pub const JITTER_FRACTION: f64 = 0.4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("eps must be positive, got {0}")]
    BadEps(f64),
    #[error("sample size must be at least 1")]
    EmptyRequest,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("sample dimension {found} does not match graph dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Where a sample point came from on the ground-truth graph.
pub type Provenance = GraphPoint;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub points: Vec<Point>,
    /// Either empty or one entry per point.
    pub provenance: Vec<Option<Provenance>>,
    pub seed: Option<u64>,
}

impl Sample {
    pub fn from_points(points: Vec<Point>) -> Self {
        Self { points, provenance: Vec::new(), seed: None }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Point::dim)
    }

    pub fn provenance_of(&self, i: usize) -> Option<Provenance> {
        self.provenance.get(i).copied().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMode {
    Uniform,
    Jittered,
}

/// Per-edge sample whose balls cover every edge using only points on that
/// same edge.
///
/// Uniform mode puts `ceil(L / (1.98 eps)) + 1` equally spaced points on an
/// edge of length `L`, endpoints included. Jittered mode keeps the endpoints,
/// shrinks the nominal spacing to `1.98 eps / 1.8` and moves each interior
/// point by up to 40% of that spacing, so neighbours stay within
/// `1.98 eps`. Points at shared graph vertices appear once.
pub fn sample_cover(g: &EmbeddedMetricGraph, eps: f64, mode: CoverMode, seed: u64) -> Result<Sample, SamplingError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(SamplingError::BadEps(eps));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_gap = SPACING_FACTOR * eps;
    let nominal = match mode {
        CoverMode::Uniform => max_gap,
        CoverMode::Jittered => max_gap / (1.0 + 2.0 * JITTER_FRACTION),
    };
    let mut points = Vec::new();
    let mut provenance = Vec::new();
    let mut vertex_taken = vec![false; g.vertices().len()];
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let len = g.edge_length(e);
        let intervals = (len / nominal).ceil().max(1.0) as usize;
        let h = len / intervals as f64;
        for k in 0..=intervals {
            let vertex = match k {
                0 => Some(i),
                _ if k == intervals => Some(j),
                _ => None,
            };
            if let Some(v) = vertex {
                if vertex_taken[v] {
                    continue;
                }
                vertex_taken[v] = true;
            }
            let mut t = k as f64 * h;
            if vertex.is_none() && mode == CoverMode::Jittered {
                t += rng.gen_range(-JITTER_FRACTION..=JITTER_FRACTION) * h;
            }
            let t = match vertex {
                Some(v) if v == i => 0.0,
                Some(_) => len,
                None => t,
            };
            let gp = GraphPoint { edge: e, t };
            points.push(g.point_at(gp).expect("t within edge"));
            provenance.push(Some(gp));
        }
    }
    Ok(Sample { points, provenance, seed: (mode == CoverMode::Jittered).then_some(seed) })
}

/// Outcome of [`verify_cover`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverReport {
    pub covered: bool,
    /// Open arclength intervals left uncovered, per edge.
    pub uncovered_intervals: Vec<Vec<(f64, f64)>>,
    pub max_gap: f64,
}

/// Exact check that the closed `eps`-balls around the sample cover every
/// edge of `g`.
pub fn verify_cover(s: &Sample, eps: f64, g: &EmbeddedMetricGraph) -> Result<CoverReport, SamplingError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(SamplingError::BadEps(eps));
    }
    if let Some(d) = s.dim() {
        if d != g.dim() {
            return Err(SamplingError::DimensionMismatch { expected: g.dim(), found: d });
        }
    }
    let mut uncovered = Vec::with_capacity(g.edges().len());
    let mut max_gap: f64 = 0.0;
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let len = g.edge_length(e);
        let seg = Segment::new(g.vertices()[i].clone(), g.vertices()[j].clone()).expect("validated edge");
        let mut pieces: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter_map(|p| {
                let ball = Ball { center: p.clone(), radius: eps };
                geometry::segment_ball_intersection(&seg, &ball)
                    .expect("dimensions checked")
                    .map(|(a, b)| (a * len, b * len))
            })
            .collect();
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut gaps = Vec::new();
        let mut reach = 0.0;
        let mut first = true;
        for (a, b) in pieces {
            if (first && a > 0.0) || (!first && a > reach) {
                gaps.push((reach, a));
            }
            first = false;
            reach = f64::max(reach, b);
        }
        if first {
            gaps.push((0.0, len));
        } else if reach < len {
            gaps.push((reach, len));
        }
        for &(a, b) in &gaps {
            max_gap = max_gap.max(b - a);
        }
        uncovered.push(gaps);
    }
    let covered = uncovered.iter().all(Vec::is_empty);
    Ok(CoverReport { covered, uncovered_intervals: uncovered, max_gap })
}

/// `n` i.i.d. points, uniform with respect to arclength on `g`.
pub fn sample_uniform_random(g: &EmbeddedMetricGraph, n: usize, seed: u64) -> Result<Sample, SamplingError> {
    if n == 0 {
        return Err(SamplingError::EmptyRequest);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = WeightedIndex::new(g.lengths()).expect("positive edge lengths");
    let mut points = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for _ in 0..n {
        let e = pick.sample(&mut rng);
        let gp = GraphPoint { edge: e, t: rng.gen_range(0.0..=g.edge_length(e)) };
        points.push(g.point_at(gp).expect("t within edge"));
        provenance.push(Some(gp));
    }
    Ok(Sample { points, provenance, seed: Some(seed) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEstimate {
    pub probability: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
    pub trials: usize,
}

/// Per-trial seed derived from a base seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial)
}

/// Monte Carlo estimate of `P(S^eps covers G)` for `n` uniform random points.
pub fn estimate_coverage_probability(
    g: &EmbeddedMetricGraph,
    eps: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<CoverageEstimate, SamplingError> {
    if trials == 0 {
        return Err(SamplingError::NoTrials);
    }
    let hits: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let s = sample_uniform_random(g, n, trial_seed(seed, k))?;
            Ok(verify_cover(&s, eps, g)?.covered)
        })
        .collect::<Result<_, SamplingError>>()?;
    let p = hits.iter().filter(|&&h| h).count() as f64 / trials as f64;
    let half_width = 1.96 * (p * (1.0 - p) / trials as f64).sqrt();
    Ok(CoverageEstimate { probability: p, half_width, trials })
}

/// True if the point lies within `eps` of some sample point.
pub fn covered_by(s: &Sample, eps: f64, p: &Point) -> bool {
    s.points.iter().any(|q| geometry::dist(p, q) <= eps + TOL)
}
