//! Metric graph reconstruction from point samples via two-scale Čech nerves,
//! plus curve reconstruction and the brute-force oracles used to check it.

pub mod complexes;
pub mod curve;
pub mod fixtures;
pub mod geometry;
pub mod graph;
pub mod homology;
pub mod io;
pub mod oracles;
pub mod pipeline;
pub mod sampling;
pub mod svg;

pub use complexes::{cech_nerve, nerve_pair, SimplicialComplex2};
pub use geometry::{Point, TOL};
pub use graph::{EmbeddedMetricGraph, GraphSpec};
pub use homology::{algorithm1, betti_numbers, image_rank, Algorithm1Report, Method};
pub use sampling::{sample_cover, verify_cover, CoverMode, Sample};
