//! Delocalization diagnostics for eigenvectors and approximate eigenvectors
//! of graph adjacency matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: half-edge multigraphs, Cayley graphs, the 256 graph products
//!   and random labeled lifts.
//! * [`spectral`]: dense eigendecompositions, spectral windows, projector
//!   diagonals and the delocalization measure `sum_x Pi_I(x,x)^{q/2}`.
//! * [`sampling`]: uniform vectors on spheres and window subspaces, Haar
//!   eigenbases, exact marginal and moment formulas, Monte Carlo exceedance
//!   and concentration estimates.
//! * [`ergodic`]: Gaussian statistics of eigenvector entries and
//!   quantum-ergodic deviations.
//! * [`local_weak`]: rooted balls, canonical codes, empirical neighbourhood
//!   distributions and the limiting distribution of random lifts.
//! * [`green`]: resolvents of finite graphs and of universal covers, limit
//!   spectral densities and the resolvent-based checks used for lifts.
//! * [`experiments`]: end-to-end experiments that emit JSON reports, shared by
//!   the `deloc` binary and the examples.

pub mod ergodic;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod green;
pub mod local_weak;
pub mod rng;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::Graph;
pub use spectral::{EigenDecomposition, SpectralWindow, WindowSelector};
