//! Exact spectral-gap and mixing-time comparison of random-scan (Glauber)
//! and systematic-scan Gibbs samplers on finite product spaces.
//!
//! The crate builds Gibbs site kernels for small product-space models,
//! evaluates π-operator norms, Laplacian singular values and exact
//! total-variation mixing times, and checks the scan/Glauber comparison
//! inequalities numerically. A separate Euclidean lab ([`projections`])
//! covers products of planar rank-one matrices, and [`hardcore_sim`]
//! scales the hardcore model on the complete graph to hundreds of sites.

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hardcore_sim;
pub mod mixing;
pub mod models;
pub mod operators;
pub mod projections;
pub mod report;
pub mod rng;
pub mod schedules;
pub mod spectral;
pub mod statespace;
pub mod suites;

pub mod cli;

pub use error::{Error, Result};
