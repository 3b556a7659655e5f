//! End-to-end runs on ground-truth graphs: features, a single
//! reconstruction, and parameter sweeps.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fixtures;
use crate::graph::{EmbeddedMetricGraph, GraphError};
use crate::homology::{self, Algorithm1Report, HomologyError, Method};
use crate::oracles;
use crate::sampling::{self, CoverMode, SamplingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("sample does not cover the graph at eps = {eps} (largest gap {max_gap})")]
    CoverFailed { eps: f64, max_gap: f64 },
    #[error("eps grid is empty")]
    EmptyGrid,
    #[error("trials must be at least 1")]
    NoTrials,
}

/// Feature quantities that set the admissible sampling radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Features {
    pub l: f64,
    pub xi: f64,
    pub gfs_estimate: f64,
    pub gfs_error_bound: f64,
    pub step: f64,
    pub eps_threshold: f64,
}

/// Features at arclength step `step`, default `1e-3 * l`.
pub fn features(g: &EmbeddedMetricGraph, step: Option<f64>) -> Result<Features, GraphError> {
    let l = g.shortest_edge_length()?;
    let step = step.unwrap_or(1e-3 * l);
    let gfs = g.gfs(step)?;
    let xi = g.xi();
    Ok(Features {
        l,
        xi,
        gfs_estimate: gfs.estimate,
        gfs_error_bound: gfs.error_bound,
        step,
        eps_threshold: gfs.estimate / xi,
    })
}

/// One reconstruction against a known graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphRun {
    #[serde(flatten)]
    pub report: Algorithm1Report,
    pub true_b1: usize,
    #[serde(rename = "match")]
    pub matched: bool,
    pub n_points: usize,
    pub seed: u64,
}

/// Samples `g` with a cover sample, checks the cover, then runs the
/// two-scale estimate. `xi` defaults to the graph's own value.
pub fn reconstruct_graph(
    g: &EmbeddedMetricGraph,
    eps: f64,
    xi: Option<f64>,
    method: Method,
    mode: CoverMode,
    seed: u64,
) -> Result<GraphRun, PipelineError> {
    let xi = xi.unwrap_or_else(|| g.xi());
    let s = sampling::sample_cover(g, eps, mode, seed)?;
    let cover = sampling::verify_cover(&s, eps, g)?;
    if !cover.covered {
        return Err(PipelineError::CoverFailed { eps, max_gap: cover.max_gap });
    }
    log::debug!("{} sample points at eps = {eps}", s.len());
    let report = homology::algorithm1(&s, eps, xi, method)?;
    let true_b1 = g.betti().1;
    Ok(GraphRun { matched: report.b1_estimate == true_b1, report, true_b1, n_points: s.len(), seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub eps_over_threshold: f64,
    pub success_rate: f64,
    #[serde(rename = "mean_b1_K1")]
    pub mean_b1_k1: f64,
}

/// For each `eps`, the fraction of `trials` jittered cover samples on which
/// the estimate equals the true `b1`. Trials run in parallel and are merged
/// in `(eps, trial)` order.
pub fn sweep(
    g: &EmbeddedMetricGraph,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
    method: Method,
    step: Option<f64>,
) -> Result<Vec<SweepRow>, PipelineError> {
    if eps_grid.is_empty() {
        return Err(PipelineError::EmptyGrid);
    }
    if trials == 0 {
        return Err(PipelineError::NoTrials);
    }
    let f = features(g, step)?;
    let true_b1 = g.betti().1;
    let jobs: Vec<(usize, u64)> = (0..eps_grid.len()).flat_map(|i| (0..trials as u64).map(move |t| (i, t))).collect();
    let results: Vec<(bool, usize)> = jobs
        .par_iter()
        .map(|&(i, t)| {
            let eps = eps_grid[i];
            let s = sampling::sample_cover(g, eps, CoverMode::Jittered, sampling::trial_seed(seed, t))?;
            let r = homology::algorithm1(&s, eps, f.xi, method)?;
            Ok((r.b1_estimate == true_b1, r.b1_k1))
        })
        .collect::<Result<_, PipelineError>>()?;
    Ok(eps_grid
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let rows = &results[i * trials..(i + 1) * trials];
            SweepRow {
                eps,
                eps_over_threshold: eps / f.eps_threshold,
                success_rate: rows.iter().filter(|r| r.0).count() as f64 / trials as f64,
                mean_b1_k1: rows.iter().map(|r| r.1 as f64).sum::<f64>() / trials as f64,
            }
        })
        .collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("eps,eps_over_threshold,success_rate,mean_b1_K1\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.eps, r.eps_over_threshold, r.success_rate, r.mean_b1_k1);
    }
    out
}

/// Agreement between the main modules and the brute-force oracles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub betti_checked: usize,
    pub betti_mismatches: usize,
    pub image_rank_checked: usize,
    pub image_rank_mismatches: usize,
    /// `(fixture, step, main estimate, oracle value)` at step `1e-3 * l`.
    pub gfs: Vec<(String, f64, f64, f64)>,
    pub gfs_mismatches: usize,
    pub ok: bool,
}

/// Runs `n_complexes` Betti and `n_pairs` image-rank comparisons on random
/// complexes, plus the feature size of every suite fixture.
pub fn verify_oracles(seed: u64, n_complexes: usize, n_pairs: usize) -> OracleCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut betti_mismatches = 0;
    for _ in 0..n_complexes {
        let n = rng.gen_range(1..=20);
        let (p_edge, p_tri) = (rng.gen_range(0.05..0.6), rng.gen_range(0.0..0.8));
        let k = fixtures::random_complex(&mut rng, n, p_edge, p_tri);
        if oracles::betti_bruteforce(&k).ok() != Some(homology::betti_numbers(&k)) {
            betti_mismatches += 1;
        }
    }
    let mut image_rank_mismatches = 0;
    for _ in 0..n_pairs {
        let n = rng.gen_range(3..=9);
        let (k1, k2) = fixtures::random_nested_pair(&mut rng, n, 20);
        if oracles::image_rank_bruteforce(&k1, &k2).ok() != homology::image_rank(&k1, &k2).ok() {
            image_rank_mismatches += 1;
        }
    }
    let gfs: Vec<(String, f64, f64, f64)> = fixtures::suite()
        .into_par_iter()
        .map(|f| {
            let step = 1e-3 * f.graph.shortest_edge_length().expect("fixtures have edges");
            let main = f.graph.gfs(step).expect("positive step").estimate;
            let oracle = oracles::gfs_bruteforce(&f.graph, step).expect("step within limit");
            (f.name.to_string(), step, main, oracle)
        })
        .collect();
    // Each value is within 2 step of the truth.
    let gfs_mismatches = gfs.iter().filter(|(_, step, main, oracle)| (main - oracle).abs() > 4.0 * step).count();
    OracleCheck {
        betti_checked: n_complexes,
        betti_mismatches,
        image_rank_checked: n_pairs,
        image_rank_mismatches,
        ok: betti_mismatches == 0 && image_rank_mismatches == 0 && gfs_mismatches == 0,
        gfs,
        gfs_mismatches,
    }
}
