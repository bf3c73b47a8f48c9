use serde::Serialize;

use super::run::{run_chain, run_on_graph, ChainConfig, ChainKind, Init};
use super::{TiePolicy, Trajectory};
use crate::energy::GammaParam;
use crate::error::Result;
use crate::graph_gen::{gen_coupled, PlantedInstance};
use crate::rng::Seed;

#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub instance: PlantedInstance,
    /// Descent on the planted graph `G`.
    pub planted: Trajectory,
    /// Descent on the unplanted graph `G0`, overlaps measured against the
    /// same planted set.
    pub null: Trajectory,
    /// First step at which the planted chain meets the planted clique.
    pub tau: Option<usize>,
    /// First step at which the two chains are in different states.
    pub first_divergence: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CouplingVerdict {
    pub identical_before_tau: bool,
    pub identical_through_absorption: bool,
}

impl CoupledRun {
    /// The two chains agree at every step strictly before `tau`.
    pub fn identical_before_tau(&self) -> bool {
        match (self.first_divergence, self.tau) {
            (None, _) => true,
            (Some(d), Some(tau)) => d >= tau,
            (Some(_), None) => false,
        }
    }

    /// Never diverged and both chains were absorbed.
    pub fn identical_through_absorption(&self) -> bool {
        self.first_divergence.is_none() && self.planted.terminal.absorbed && self.null.terminal.absorbed
    }

    pub fn verdict(&self) -> CouplingVerdict {
        CouplingVerdict {
            identical_before_tau: self.identical_before_tau(),
            identical_through_absorption: self.identical_through_absorption(),
        }
    }
}

fn first_divergence(a: &Trajectory, b: &Trajectory) -> Option<usize> {
    let len = a.records.len().max(b.records.len());
    (0..len).find(|&i| a.records.get(i).map(|r| r.mv) != b.records.get(i).map(|r| r.mv))
}

/// Generates `(G0, G)` and runs gradient descent on both with the same random
/// stream. While the planted chain avoids the planted clique every energy it
/// sees depends only on edges present in both graphs, so the chains agree.
pub fn run_coupled_gd(
    n: usize,
    k: usize,
    gamma: GammaParam,
    tie: TiePolicy,
    init: Init,
    max_steps: usize,
    seed: Seed,
) -> Result<CoupledRun> {
    let (g0, instance) = gen_coupled(n, k, seed)?;
    let cfg = ChainConfig::new(init, ChainKind::Gd(tie), gamma, max_steps);
    let planted = run_chain(&instance, &cfg, seed)?;
    let null = run_on_graph(&g0, instance.pc(), &cfg, seed)?;
    let tau = planted.first_intersection();
    let first_divergence = first_divergence(&planted, &null);
    Ok(CoupledRun {
        instance,
        planted,
        null,
        tau,
        first_divergence,
    })
}
