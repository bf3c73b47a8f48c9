//! Dynamics on the subset hypercube: gradient descent, the neighborhood Gibbs
//! sampler, min-degree peeling and the coupled planted/null descent.

mod coupled;
mod gd;
mod gibbs;
pub mod instrument;
mod peel;
mod run;
mod trajectory;

pub use coupled::{run_coupled_gd, CoupledRun};
pub use gd::{GdOutcome, GradientDescent, TiePolicy};
pub use gibbs::{gibbs_kernel, log_partition, GibbsSampler};
pub use peel::{outside_at_most, run_peel, PeelCounts, PeelDiagnostics};
pub use run::{run_chain, run_on_graph, ChainConfig, ChainKind, Init};
pub use trajectory::{Move, MoveKind, StepRecord, Terminal, Trajectory, TRAJECTORY_CSV_HEADER};
