//! A first-passage-time (FPT) laboratory for stationary Gaussian processes.
//!
//! The crate computes the density of the first time a Gaussian process crosses
//! a deterministic threshold — the firing density of a stochastic
//! integrate-and-fire neuron — by three independent routes and cross-validates
//! them:
//!
//! * **Monte Carlo**: exact sampling of stationary Gaussian paths by circulant
//!   embedding (any covariance in the supported families) or by a state-space
//!   recursion (rational spectra), followed by crossing detection and
//!   histogram density estimation ([`simulate`], [`fpt`]).
//! * **Volterra integral equation**: for Gauss–Markov processes the FPT
//!   density solves a non-singular second-kind Volterra equation, marched
//!   with composite trapezoid quadrature ([`volterra`]).
//! * **Closed form / asymptotics**: an image-method closed form for a
//!   Daniels-type moving threshold under the Ornstein–Uhlenbeck time change
//!   ([`daniels`]), and the large-threshold non-homogeneous exponential
//!   approximation built from the level-crossing hazard ([`asymptotics`]).
//!
//! The [`runner`] module orchestrates experiments from flat config files and
//! emits CSV/JSON results plus gnuplot scripts; the `fptlab` binary is a thin
//! CLI over it. Each major capability also has a runnable example under
//! `examples/`.

pub mod asymptotics;
pub mod boundary;
pub mod covariance;
pub mod csvio;
pub mod daniels;
pub mod error;
pub mod fpt;
pub mod gauss_markov;
pub mod num;
pub mod rng;
pub mod runner;
pub mod simulate;
pub mod upcrossing;
pub mod volterra;

pub use boundary::Boundary;
pub use covariance::Covariance;
pub use error::{Error, Result};
pub use fpt::FptDensityEstimate;
pub use gauss_markov::GaussMarkov;
pub use simulate::{Conditioning, EmbeddingPlan, PathGrid, SamplePathBatch};
pub use upcrossing::UpcrossingSpec;
