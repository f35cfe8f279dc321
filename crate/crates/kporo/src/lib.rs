//! kporo — numerical k-porosity and upper Minkowski (box-counting) dimension
//! estimation for compact subsets of the unit cube, together with an
//! executable form of the convex-decomposition covering machinery that links
//! the two: sets with k orthogonal holes of relative size ϱ near every point
//! satisfy dim ≤ n − k + c/log(1/(1−2ϱ)), and λ-Cantor products show the
//! bound is asymptotically sharp.
//!
//! The crate is organized around six modules:
//!
//! - [`geometry`]: points, half-spaces, cones, subspaces, frames, sphere
//!   covers and planarity predicates.
//! - [`setgen`]: the sparse occupancy grid representation, canonical
//!   generators (λ-Cantor sets, products, k-planes, similarity IFS),
//!   neighborhoods, an exact Euclidean distance transform, and the
//!   `.kpgrid` file format.
//! - [`porosity`]: estimation of por_k(A,x,r), por_k(A,x) and por_k(A) on
//!   grids, with a brute-force oracle for small instances.
//! - [`dimension`]: box counting, dimension fits, and the closed-form
//!   constants t(ϱ), δ(ϱ), c′(α,c), α_m, c₂ and the dimension bound.
//! - [`covering`]: empty-half-space search, convex boundary decomposition,
//!   the half-space translation lemma check, and the inductive covering
//!   construction with a machine-checkable certificate.
//! - [`cli`]: the `kporo` command-line front end (generate | porosity |
//!   dimension | sharpness | decompose | cover | verify).
//!
//! Start with the runnable examples in `examples/` — there is one per major
//! capability.

pub mod cli;
pub mod covering;
pub mod dimension;
pub mod error;
pub mod geometry;
pub mod porosity;
pub mod setgen;

pub use error::{Error, Result};

/// Toolkit version embedded in every output document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
