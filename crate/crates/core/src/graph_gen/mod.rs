//! Seeded random graph models: Erdős–Rényi `G(n, 1/2)`, the planted clique
//! `G(n, 1/2, k)`, the coupled pair `(G0, G)` and the contaminated model.

pub(crate) mod bits;
mod generate;
mod graph;
pub mod io;

pub use generate::{gen_contaminated, gen_coupled, gen_er, gen_planted, VPolicy};
pub use graph::{Contamination, Graph, ModelTag, PlantedInstance};
