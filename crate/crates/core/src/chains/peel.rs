use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trajectory::{Move, StepRecord, Terminal, Trajectory};
use crate::energy::{GammaParam, SubsetState};
use crate::graph_gen::{bits, PlantedInstance};
use crate::rng::{Seed, Stream};

/// Composition of the peeling set `Y_t`.
///
/// Without contamination `n2` counts every non-planted vertex and `n3` is
/// `None`. With contamination `n2 = |Y_t ∩ V|` and `n3` counts the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelCounts {
    pub n1: usize,
    pub n2: usize,
    pub n3: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeelDiagnostics {
    pub counts: Vec<PeelCounts>,
    /// `T_x`: removal step of each vertex, capped at `tau0`.
    pub removal_time: Vec<usize>,
    /// Stopping time of the peel.
    pub tau0: usize,
    pub c1: Option<f64>,
    /// Planted vertices whose degree in `Y_t` stayed within `c1 * sqrt(n)` of
    /// its expectation for every `t < T_x`.
    pub retained: Option<Vec<usize>>,
}

impl PeelDiagnostics {
    pub fn retained_fraction(&self, k: usize) -> Option<f64> {
        self.retained.as_ref().map(|a| a.len() as f64 / k as f64)
    }
}

/// Stop once at most `threshold` non-planted vertices remain.
pub fn outside_at_most(
    instance: &PlantedInstance,
    threshold: usize,
) -> impl FnMut(&SubsetState<'_>, usize) -> bool + '_ {
    move |state, _| state.size() - bits::and_count(state.mask(), instance.pc_mask()) as usize <= threshold
}

/// Min-degree peeling from the full vertex set: each step removes a uniformly
/// random vertex among those of smallest degree inside the current set.
///
/// `gamma` only affects the energies recorded in the trajectory. Ties are
/// broken with the `Chain(0)` stream in the same way as gradient descent, so
/// under a shared seed the two processes coincide while descent only removes.
pub fn run_peel(
    instance: &PlantedInstance,
    gamma: GammaParam,
    mut stop: impl FnMut(&SubsetState<'_>, usize) -> bool,
    c1: Option<f64>,
    seed: Seed,
) -> (Trajectory, PeelDiagnostics) {
    let n = instance.n();
    let k = instance.k();
    let mut state = SubsetState::full(instance.graph(), gamma);
    let mut rng = seed.rng(Stream::Chain(0));
    let contaminated = instance.contamination();
    let sqrt_n = (n as f64).sqrt();

    let mut counts = Vec::new();
    let mut records = Vec::new();
    let mut removal_time = vec![usize::MAX; n];
    let mut retained = vec![c1.is_some(); n];
    let mut ties = Vec::new();
    let (mut n1, mut nv) = (k, contaminated.map_or(0, |c| c.v_set.len()));
    let mut t = 0;
    let mut mv = Move::STAY;

    loop {
        let n_out = state.size() - n1;
        let c = PeelCounts {
            n1,
            n2: if contaminated.is_some() { nv } else { n_out },
            n3: contaminated.map(|_| n_out - nv),
        };
        counts.push(c);
        records.push(StepRecord {
            t,
            n1,
            n2: n_out,
            scaled_energy: state.scaled_energy(),
            mv,
        });
        if state.size() == 0 || stop(&state, t) {
            break;
        }
        if let Some(c1) = c1 {
            let expected = match contaminated {
                Some(ct) => (n1 as f64 - 1.0) + ct.q * c.n2 as f64 + 0.5 * c.n3.unwrap_or(0) as f64,
                None => (n1 as f64 - 1.0) + 0.5 * n_out as f64,
            } - c1 * sqrt_n;
            for &x in instance.pc() {
                if state.contains(x) && (state.deg_into(x) as f64) < expected {
                    retained[x] = false;
                }
            }
        }

        let mut low = u32::MAX;
        ties.clear();
        for x in state.members() {
            let d = state.deg_into(x);
            if d < low {
                low = d;
                ties.clear();
                ties.push(x);
            } else if d == low {
                ties.push(x);
            }
        }
        let z = ties[rng.gen_range(0..ties.len())];
        let d = state.flip_delta(z);
        state.apply_flip(z);
        t += 1;
        removal_time[z] = t;
        if instance.in_pc(z) {
            n1 -= 1;
        } else if instance.in_v(z) {
            nv -= 1;
        }
        mv = Move::flip(z, true, d);
    }

    let tau0 = t;
    for r in removal_time.iter_mut() {
        *r = (*r).min(tau0);
    }
    let n2 = state.size() - n1;
    let terminal = Terminal {
        absorbed: false,
        reached_pc: n1 == k && n2 == 0,
        steps: tau0,
        pc_entry: (n1 == k && n2 == 0).then_some(tau0),
        final_size: state.size(),
        final_n1: n1,
        final_n2: n2,
    };
    let diag = PeelDiagnostics {
        counts,
        removal_time,
        tau0,
        c1,
        retained: c1.map(|_| instance.pc().iter().copied().filter(|&x| retained[x]).collect()),
    };
    let traj = Trajectory {
        records,
        terminal,
        final_set: state.to_vec(),
    };
    (traj, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_gen::{gen_contaminated, gen_planted, Graph, VPolicy};

    #[test]
    fn path_endpoints_go_first() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let inst = PlantedInstance::new(g, vec![1], None).unwrap();
        let gamma = GammaParam::integer(2).unwrap();
        let mut first = [0usize; 3];
        for s in 0..2000 {
            let (tr, diag) = run_peel(&inst, gamma, |st: &SubsetState<'_>, _| st.size() == 2, None, Seed(s));
            first[tr.records[1].mv.vertex().unwrap()] += 1;
            assert_eq!(diag.tau0, 1);
        }
        assert_eq!(first[1], 0);
        assert!((first[0] as f64 - 1000.0).abs() < 5.0 * 22.4, "{first:?}");
    }

    #[test]
    fn removal_times_are_capped_and_counts_track() {
        let inst = gen_planted(500, 40, Seed(3)).unwrap();
        let gamma = GammaParam::integer(4).unwrap();
        let (tr, diag) = run_peel(&inst, gamma, outside_at_most(&inst, 20), Some(1.0), Seed(3));
        assert!(diag.removal_time.iter().all(|&t| t <= diag.tau0));
        assert!(tr.terminal.final_n2 <= 20);
        assert_eq!(diag.counts.len(), diag.tau0 + 1);
        for (c, r) in diag.counts.iter().zip(&tr.records) {
            assert_eq!((c.n1, c.n2, c.n3), (r.n1, r.n2, None));
        }
        let a = diag.retained.as_ref().unwrap();
        assert!(a.iter().all(|&x| inst.in_pc(x)));
    }

    #[test]
    fn contaminated_counts_split_v() {
        let inst = gen_contaminated(400, 30, 40, 0.6, &VPolicy::Random, Seed(1)).unwrap();
        let gamma = GammaParam::integer(5).unwrap();
        let (tr, diag) = run_peel(&inst, gamma, outside_at_most(&inst, 15), Some(1.0), Seed(1));
        assert_eq!(
            diag.counts[0],
            PeelCounts {
                n1: 30,
                n2: 40,
                n3: Some(330)
            }
        );
        for (c, r) in diag.counts.iter().zip(&tr.records) {
            assert_eq!(c.n2 + c.n3.unwrap(), r.n2);
        }
    }
}
