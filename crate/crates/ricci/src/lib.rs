//! Multi-step coarse Ricci curvature for finite-state Markov chains.
//!
//! The curvature of the k-step kernel, `kappa_k(x,y) = 1 - W1(P_x^k, P_y^k)
//! / d(x,y)`, is computed exactly through an integer-scaled min-cost-flow
//! transport solver. From the resulting profiles the crate evaluates:
//!
//! - mixing-time, spectral-gap and pseudo-spectral-gap bounds,
//! - Bonnet-Myers diameter and eccentricity bounds,
//! - variance, moment, Gaussian/Bernstein and non-reversible tail
//!   certificates for Lipschitz observables under the stationary law,
//! - bias, variance and tail certificates for MCMC empirical averages,
//!   validated by a reproducible Monte Carlo harness.
//!
//! Dobrushin interdependence matrices supply certified curvature lower
//! bounds for Glauber dynamics (random and systemic scan), with Curie-Weiss
//! and 1D Ising closed forms; a per-level recursion covers the binary cube
//! with a forbidden region. Everything is checked against independent exact
//! oracles (dense symmetric eigensolver, brute-force LP transport, exact TV
//! mixing) in [`oracle`].
//!
//! See the `examples/` directory for one runnable example per capability and
//! the thin `ricci` binary for the command-line interface.

pub mod cli;
pub mod concentration;
pub mod curvature;
pub mod dobrushin;
pub mod error;
pub mod geometry;
mod linalg;
pub mod markov;
pub mod mcmc;
pub mod oracle;
pub mod space;
pub mod transport;
pub mod zoo;

pub use error::{Result, RicciError};
pub use markov::{ChainSpec, Distribution, MarkovKernel};
pub use space::FiniteMetricSpace;
