//! Planted-clique recovery with a relaxed clique Hamiltonian.
//!
//! The state space is every subset `U` of the vertex set. The energy
//!
//! ```text
//! H(U) = -|E(U)| + gamma * (C(|U|, 2) - |E(U)|)
//! ```
//!
//! penalizes missing internal edges with a Lagrange multiplier `gamma > 1`.
//! This crate provides:
//!
//! - [`graph_gen`]: seeded Erdős–Rényi, planted, coupled and contaminated graphs;
//! - [`energy`]: exact integer-scaled energies with O(1) single-flip deltas;
//! - [`chains`]: gradient descent, the neighborhood Gibbs sampler, min-degree
//!   peeling and coupled planted/null runs;
//! - [`landscape`]: local-minimum tests, brute-force global minima and
//!   enumeration of small local minima;
//! - [`harness`]: experiment configuration, seed sweeps and output files.

pub mod chains;
pub mod energy;
pub mod error;
pub mod graph_gen;
pub mod harness;
pub mod landscape;
pub mod rng;

pub use energy::{GammaParam, SubsetState};
pub use error::{Error, Result};
pub use graph_gen::{Contamination, Graph, PlantedInstance, VPolicy};
pub use rng::{Seed, Stream};
