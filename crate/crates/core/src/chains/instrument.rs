//! Replay checks on recorded trajectories.
//!
//! Each check rebuilds the visited states from the start set and the recorded
//! moves, so trajectories must be recorded with `record_every = 1`.

use serde::Serialize;

use super::{MoveKind, StepRecord, Trajectory};
use crate::energy::{GammaParam, SubsetState};
use crate::error::{Error, Result};
use crate::graph_gen::Graph;

/// Calls `f(state_before, record)` for every transition of `traj`.
pub fn replay<'g>(
    graph: &'g Graph,
    gamma: GammaParam,
    start: &[usize],
    traj: &Trajectory,
    mut f: impl FnMut(&SubsetState<'g>, &StepRecord),
) -> Result<SubsetState<'g>> {
    let mut state = SubsetState::new(graph, start, gamma)?;
    for w in traj.records.windows(2) {
        if w[1].t != w[0].t + 1 {
            return Err(Error::param("trajectory", "replay needs every step recorded"));
        }
        f(&state, &w[1]);
        if let Some(x) = w[1].mv.vertex() {
            state.apply_flip(x);
        }
        if state.scaled_energy() != w[1].scaled_energy {
            return Err(Error::param("trajectory", format!("energy mismatch at t = {}", w[1].t)));
        }
    }
    Ok(state)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCheck {
    pub steps_checked: usize,
    /// Steps whose move was not a removal of a minimum-degree member.
    pub violations: Vec<usize>,
}

impl PhaseCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// While more than `threshold` non-planted vertices remain, every move must
/// remove a vertex of minimum degree inside the current set.
pub fn removal_phase_check(
    graph: &Graph,
    in_pc: impl Fn(usize) -> bool,
    gamma: GammaParam,
    start: &[usize],
    traj: &Trajectory,
    threshold: f64,
) -> Result<PhaseCheck> {
    let mut check = PhaseCheck::default();
    replay(graph, gamma, start, traj, |before, rec| {
        let outside = before.members().filter(|&x| !in_pc(x)).count();
        if outside as f64 <= threshold {
            return;
        }
        check.steps_checked += 1;
        let low = before.members().map(|x| before.deg_into(x)).min();
        let ok = match rec.mv.kind {
            MoveKind::Remove(z) => Some(before.deg_into(z)) == low,
            _ => false,
        };
        if !ok {
            check.violations.push(rec.t);
        }
    })?;
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HammingCheck {
    /// First step at which the overlap condition held.
    pub entered_at: Option<usize>,
    pub steps_checked: usize,
    /// Steps after entry at which the Hamming distance to the planted clique
    /// did not strictly decrease (before reaching zero).
    pub violations: Vec<usize>,
    pub final_distance: usize,
}

impl HammingCheck {
    pub fn passed(&self) -> bool {
        self.entered_at.is_some() && self.violations.is_empty() && self.final_distance == 0
    }
}

/// Once `n1 >= max(gamma * n2 + 2, (1 - xi) k)`, the Hamming distance
/// `(k - n1) + n2` must drop by one at every step until it reaches zero.
pub fn hamming_descent_check(traj: &Trajectory, k: usize, gamma: GammaParam, xi: f64) -> HammingCheck {
    let (p, q) = (gamma.numer() as u128, gamma.denom() as u128);
    let cond = |r: &StepRecord| q * r.n1 as u128 >= p * r.n2 as u128 + 2 * q && r.n1 as f64 >= (1.0 - xi) * k as f64;
    let dist = |r: &StepRecord| (k - r.n1) + r.n2;
    let entry = traj.records.iter().position(cond);
    let mut check = HammingCheck {
        entered_at: entry.map(|i| traj.records[i].t),
        steps_checked: 0,
        violations: Vec::new(),
        final_distance: traj.records.last().map_or(k, dist),
    };
    if let Some(i) = entry {
        for w in traj.records[i..].windows(2) {
            if dist(&w[0]) == 0 {
                if dist(&w[1]) != 0 {
                    check.violations.push(w[1].t);
                }
                continue;
            }
            check.steps_checked += 1;
            if dist(&w[1]) + 1 != dist(&w[0]) {
                check.violations.push(w[1].t);
            }
        }
    }
    check
}

/// No single flip strictly lowers the energy.
pub fn is_absorbing(state: &SubsetState<'_>) -> bool {
    (0..state.n()).all(|x| state.flip_delta(x) >= 0)
}
