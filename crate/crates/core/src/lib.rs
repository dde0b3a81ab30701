//! Vertex nomination for stochastic block models.
//!
//! Given a graph, a handful of seed vertices with known blocks and a block of
//! interest, each scheme orders the remaining vertices so that members of the
//! block of interest come first:
//!
//! - [`nominate::nominate_lc`]: exact posterior by enumerating block assignments.
//! - [`nominate::nominate_lcs`]: Metropolis-Hastings estimate of the same posterior.
//! - [`nominate::nominate_lp`]: adjacency spectral embedding plus k-means.
//! - [`nominate::nominate_lep`]: embedding plus semi-supervised Gaussian mixtures.
//!
//! [`eval`] scores lists by average precision and runs Monte Carlo experiments.

pub mod canonical;
pub mod cli;
pub mod embed;
pub mod eval;
pub mod error;
pub mod gmm;
pub mod graph;
pub mod io;
pub mod kmeans;
mod likelihood;
pub mod mcmc;
pub mod nominate;
pub mod nomination;
pub mod points;
pub mod presets;
pub mod rng;
pub mod sbm;

pub use error::{Error, ErrorClass, Result};
pub use graph::Graph;
pub use likelihood::log_sum_exp;
pub use nomination::{NominationList, SchemeTag};
pub use sbm::{GroundTruth, SbmParams, SeededGraph};
