use serde::{Deserialize, Serialize};

use super::gd::{GdOutcome, GradientDescent, TiePolicy};
use super::gibbs::GibbsSampler;
use super::trajectory::{Move, MoveKind, StepRecord, Terminal, Trajectory};
use crate::energy::{GammaParam, SubsetState};
use crate::error::{Error, Result};
use crate::graph_gen::{bits, Graph, PlantedInstance};
use crate::rng::{Seed, Stream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    Full,
    Empty,
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Gd(TiePolicy),
    Gibbs { beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub init: Init,
    pub kind: ChainKind,
    pub gamma: GammaParam,
    pub max_steps: usize,
    /// Gibbs only: consecutive steps at the planted clique that count as
    /// success. `None` means `10 * n`.
    pub hold_window: Option<usize>,
    /// Keep every `record_every`-th step; the first and last are always kept.
    pub record_every: usize,
    /// Which `Chain(i)` random stream to use.
    pub stream: u32,
}

impl ChainConfig {
    pub fn new(init: Init, kind: ChainKind, gamma: GammaParam, max_steps: usize) -> Self {
        ChainConfig {
            init,
            kind,
            gamma,
            max_steps,
            hold_window: None,
            record_every: 1,
            stream: 0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::param("max_steps", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", "must be at least 1"));
        }
        match self.kind {
            ChainKind::Gd(TiePolicy::Drift { max_plateau_steps: 0 }) => {
                return Err(Error::param("tie", "drift needs max_plateau_steps >= 1"))
            }
            ChainKind::Gibbs { beta } => {
                GibbsSampler::new(beta)?;
            }
            _ => {}
        }
        if let Init::Explicit(set) = &self.init {
            if let Some(&x) = set.iter().find(|&&x| x >= n) {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        Ok(())
    }
}

/// Runs the configured chain on a planted instance, tracking overlap with
/// the planted clique.
pub fn run_chain(instance: &PlantedInstance, cfg: &ChainConfig, seed: Seed) -> Result<Trajectory> {
    run_on_graph(instance.graph(), instance.pc(), cfg, seed)
}

/// Like [`run_chain`] but on any graph, with `reference` playing the role of
/// the planted clique. Used for the unplanted half of coupled runs.
pub fn run_on_graph(graph: &Graph, reference: &[usize], cfg: &ChainConfig, seed: Seed) -> Result<Trajectory> {
    let n = graph.n();
    cfg.validate(n)?;
    let ref_mask = bits::from_indices(n, reference.iter().copied());
    let k = reference.len();
    let mut state = match &cfg.init {
        Init::Full => SubsetState::full(graph, cfg.gamma),
        Init::Empty => SubsetState::empty(graph, cfg.gamma),
        Init::Explicit(set) => SubsetState::new(graph, set, cfg.gamma)?,
    };
    let mut rng = seed.rng(Stream::Chain(cfg.stream));
    let mut n1 = bits::and_count(state.mask(), &ref_mask) as usize;
    let mut n2 = state.size() - n1;
    let at_pc = |n1: usize, n2: usize| n1 == k && n2 == 0;

    let mut records = vec![StepRecord {
        t: 0,
        n1,
        n2,
        scaled_energy: state.scaled_energy(),
        mv: Move::STAY,
    }];
    let mut pending: Option<StepRecord> = None;
    let mut pc_since = at_pc(n1, n2).then_some(0);
    let mut absorbed = false;
    let mut held = false;
    let mut steps = 0;

    let hold = cfg.hold_window.unwrap_or(10 * n);
    let mut gd = match cfg.kind {
        ChainKind::Gd(policy) => Some(GradientDescent::new(policy)),
        ChainKind::Gibbs { .. } => None,
    };
    let mut gibbs = match cfg.kind {
        ChainKind::Gibbs { beta } => Some(GibbsSampler::new(beta)?),
        ChainKind::Gd(_) => None,
    };
    if gibbs.is_some() && pc_since.is_some() && hold == 0 {
        held = true;
    }

    while !held && steps < cfg.max_steps {
        let mv = if let Some(gd) = gd.as_mut() {
            match gd.step(&mut state, &mut rng) {
                GdOutcome::Moved(m) => m,
                GdOutcome::Absorbed => {
                    absorbed = true;
                    break;
                }
            }
        } else {
            gibbs.as_mut().expect("gibbs sampler").step(&mut state, &mut rng)
        };
        steps += 1;
        match mv.kind {
            MoveKind::Add(x) if bits::test(&ref_mask, x) => n1 += 1,
            MoveKind::Add(_) => n2 += 1,
            MoveKind::Remove(x) if bits::test(&ref_mask, x) => n1 -= 1,
            MoveKind::Remove(_) => n2 -= 1,
            MoveKind::Stay => {}
        }
        let rec = StepRecord {
            t: steps,
            n1,
            n2,
            scaled_energy: state.scaled_energy(),
            mv,
        };
        if steps % cfg.record_every == 0 {
            records.push(rec);
            pending = None;
        } else {
            pending = Some(rec);
        }
        if at_pc(n1, n2) {
            let since = *pc_since.get_or_insert(steps);
            if gibbs.is_some() && steps - since >= hold {
                held = true;
            }
        } else {
            pc_since = None;
        }
    }
    records.extend(pending);

    let final_pc = at_pc(n1, n2);
    let terminal = Terminal {
        absorbed,
        reached_pc: if gibbs.is_some() { held } else { final_pc },
        steps,
        pc_entry: if final_pc { pc_since } else { None },
        final_size: state.size(),
        final_n1: n1,
        final_n2: n2,
    };
    Ok(Trajectory {
        records,
        terminal,
        final_set: state.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_gen::{gen_planted, Graph};

    fn gd(tie: TiePolicy) -> ChainKind {
        ChainKind::Gd(tie)
    }

    #[test]
    fn complete_graph_is_absorbed_immediately() {
        let inst = gen_planted(12, 12, Seed(0)).unwrap();
        let cfg = ChainConfig::new(Init::Full, gd(TiePolicy::Halt), GammaParam::integer(3).unwrap(), 100);
        let tr = run_chain(&inst, &cfg, Seed(0)).unwrap();
        assert!(tr.terminal.absorbed && tr.terminal.reached_pc);
        assert_eq!(tr.terminal.steps, 0);
        assert_eq!(tr.terminal.pc_entry, Some(0));
    }

    #[test]
    fn records_are_consistent() {
        let inst = gen_planted(400, 40, Seed(2)).unwrap();
        let cfg = ChainConfig::new(Init::Full, gd(TiePolicy::Halt), GammaParam::integer(4).unwrap(), 2000);
        let tr = run_chain(&inst, &cfg, Seed(2)).unwrap();
        for w in tr.records.windows(2) {
            assert_eq!(w[1].t, w[0].t + 1);
            assert_eq!(w[1].scaled_energy, w[0].scaled_energy + w[1].mv.scaled_delta);
            assert!(
                w[1].mv.scaled_delta < 0,
                "halting descent only takes strict improvements"
            );
            assert_eq!((w[1].n1 + w[1].n2).abs_diff(w[0].n1 + w[0].n2), 1);
        }
        let last = tr.records.last().unwrap();
        assert_eq!((last.n1, last.n2), (tr.terminal.final_n1, tr.terminal.final_n2));
        assert_eq!(tr.final_set.len(), tr.terminal.final_size);
        let direct = SubsetState::new(inst.graph(), &tr.final_set, cfg.gamma).unwrap();
        assert_eq!(direct.scaled_energy(), last.scaled_energy);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let inst = gen_planted(300, 20, Seed(5)).unwrap();
        let mut cfg = ChainConfig::new(
            Init::Empty,
            gd(TiePolicy::drift(1).unwrap()),
            GammaParam::integer(4).unwrap(),
            500,
        );
        let a = run_chain(&inst, &cfg, Seed(8)).unwrap();
        let b = run_chain(&inst, &cfg, Seed(8)).unwrap();
        assert_eq!(a, b);
        cfg.kind = ChainKind::Gibbs { beta: 3.0 };
        cfg.hold_window = Some(5);
        let a = run_chain(&inst, &cfg, Seed(8)).unwrap();
        let b = run_chain(&inst, &cfg, Seed(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn downsampling_keeps_first_and_last() {
        let inst = gen_planted(300, 30, Seed(1)).unwrap();
        let mut cfg = ChainConfig::new(Init::Full, gd(TiePolicy::Halt), GammaParam::integer(4).unwrap(), 1000);
        let full = run_chain(&inst, &cfg, Seed(1)).unwrap();
        cfg.record_every = 7;
        let thin = run_chain(&inst, &cfg, Seed(1)).unwrap();
        assert_eq!(thin.terminal, full.terminal);
        assert_eq!(thin.records.first(), full.records.first());
        assert_eq!(thin.records.last(), full.records.last());
        assert!(thin.records.iter().all(|r| r.t % 7 == 0 || r.t == full.terminal.steps));
    }

    #[test]
    fn gibbs_holds_at_planted_clique() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let inst = PlantedInstance::new(g, vec![0, 1, 2], None).unwrap();
        let mut cfg = ChainConfig::new(
            Init::Explicit(vec![0, 1, 2]),
            ChainKind::Gibbs { beta: 60.0 },
            GammaParam::integer(3).unwrap(),
            1000,
        );
        cfg.hold_window = Some(40);
        let tr = run_chain(&inst, &cfg, Seed(0)).unwrap();
        assert!(tr.terminal.reached_pc);
        assert_eq!(tr.terminal.steps, 40);
        assert_eq!(tr.terminal.pc_entry, Some(0));
        assert!(!tr.terminal.absorbed);
    }

    #[test]
    fn rejects_invalid_configs() {
        let inst = gen_planted(10, 3, Seed(0)).unwrap();
        let gamma = GammaParam::integer(2).unwrap();
        let bad = [
            ChainConfig::new(Init::Full, gd(TiePolicy::Halt), gamma, 0),
            ChainConfig::new(Init::Explicit(vec![10]), gd(TiePolicy::Halt), gamma, 5),
            ChainConfig::new(Init::Full, ChainKind::Gibbs { beta: -1.0 }, gamma, 5),
            ChainConfig::new(Init::Full, gd(TiePolicy::Drift { max_plateau_steps: 0 }), gamma, 5),
        ];
        for cfg in bad {
            assert!(run_chain(&inst, &cfg, Seed(0)).is_err(), "{cfg:?}");
        }
    }
}
