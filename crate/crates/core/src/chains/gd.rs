use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trajectory::Move;
use crate::energy::SubsetState;
use crate::error::{Error, Result};

/// What gradient descent does when no neighbor is strictly lower.
///
/// `Halt` is the literal rule. `Drift` additionally allows up to
/// `max_plateau_steps` moves (over the whole run) to a uniformly random
/// zero-delta neighbor; from the empty set this is the only way out, since
/// every add-delta there is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    Halt,
    Drift { max_plateau_steps: usize },
}

impl TiePolicy {
    pub fn drift(max_plateau_steps: usize) -> Result<Self> {
        if max_plateau_steps == 0 {
            return Err(Error::param("tie", "drift needs max_plateau_steps >= 1"));
        }
        Ok(TiePolicy::Drift { max_plateau_steps })
    }
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;

    /// `halt` or `drift:<steps>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "halt" => Ok(TiePolicy::Halt),
            other => {
                let steps = other
                    .strip_prefix("drift:")
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| Error::param("tie", format!("expected `halt` or `drift:<n>`, got `{other}`")))?;
                TiePolicy::drift(steps)
            }
        }
    }
}

impl std::fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TiePolicy::Halt => f.write_str("halt"),
            TiePolicy::Drift { max_plateau_steps } => write!(f, "drift:{max_plateau_steps}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdOutcome {
    Moved(Move),
    Absorbed,
}

/// Gradient descent: move to a uniformly random member of the argmin of `H`
/// over single flips whenever that minimum is below `H(U)`.
#[derive(Debug, Clone)]
pub struct GradientDescent {
    policy: TiePolicy,
    plateau_used: usize,
    ties: Vec<usize>,
}

impl GradientDescent {
    pub fn new(policy: TiePolicy) -> Self {
        GradientDescent {
            policy,
            plateau_used: 0,
            ties: Vec::new(),
        }
    }

    pub fn plateau_moves(&self) -> usize {
        self.plateau_used
    }

    /// The argmin flips found by the last call to [`step`](Self::step), ascending.
    pub fn last_argmin(&self) -> &[usize] {
        &self.ties
    }

    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut SubsetState<'_>, rng: &mut R) -> GdOutcome {
        let mut best = i64::MAX;
        self.ties.clear();
        for x in 0..state.n() {
            let d = state.flip_delta(x);
            if d < best {
                best = d;
                self.ties.clear();
                self.ties.push(x);
            } else if d == best {
                self.ties.push(x);
            }
        }
        let allowed = best < 0
            || match self.policy {
                TiePolicy::Drift { max_plateau_steps } if best == 0 && self.plateau_used < max_plateau_steps => {
                    self.plateau_used += 1;
                    true
                }
                _ => false,
            };
        if !allowed || self.ties.is_empty() {
            return GdOutcome::Absorbed;
        }
        let x = self.ties[rng.gen_range(0..self.ties.len())];
        let was_member = state.contains(x);
        state.apply_flip(x);
        GdOutcome::Moved(Move::flip(x, was_member, best))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::MoveKind;
    use crate::energy::GammaParam;
    use crate::graph_gen::{gen_er, Graph};
    use crate::rng::{Seed, Stream};

    #[test]
    fn parses_policies() {
        assert_eq!("halt".parse::<TiePolicy>().unwrap(), TiePolicy::Halt);
        assert_eq!(
            "drift:3".parse::<TiePolicy>().unwrap(),
            TiePolicy::Drift { max_plateau_steps: 3 }
        );
        assert!("drift:0".parse::<TiePolicy>().is_err());
        assert!("wander".parse::<TiePolicy>().is_err());
        assert_eq!(TiePolicy::drift(2).unwrap().to_string(), "drift:2");
    }

    #[test]
    fn removes_the_isolated_vertex() {
        // Edge (0, 1) only, gamma = 2, U = {0, 1, 2}. By direct enumeration:
        // H(U) = 3, H({0, 1}) = -1, H({0, 2}) = H({1, 2}) = 2.
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let gamma = GammaParam::integer(2).unwrap();
        let mut s = SubsetState::full(&g, gamma);
        assert_eq!(s.scaled_energy(), 3);
        let deltas: Vec<i64> = (0..3).map(|x| s.flip_delta(x)).collect();
        assert_eq!(deltas, vec![-1, -1, -4]);
        for (x, set) in [(0, vec![1, 2]), (1, vec![0, 2]), (2, vec![0, 1])] {
            let direct = SubsetState::new(&g, &set, gamma).unwrap().scaled_energy();
            assert_eq!(direct - 3, deltas[x]);
        }
        let mut gd = GradientDescent::new(TiePolicy::Halt);
        let out = gd.step(&mut s, &mut Seed(0).rng(Stream::Chain(0)));
        assert_eq!(
            out,
            GdOutcome::Moved(Move {
                kind: MoveKind::Remove(2),
                scaled_delta: -4
            })
        );
    }

    #[test]
    fn empty_set_halts_or_drifts() {
        let g = gen_er(30, Seed(1)).unwrap();
        let gamma = GammaParam::integer(4).unwrap();
        let mut rng = Seed(2).rng(Stream::Chain(0));
        let mut s = SubsetState::empty(&g, gamma);
        assert_eq!(
            GradientDescent::new(TiePolicy::Halt).step(&mut s, &mut rng),
            GdOutcome::Absorbed
        );
        assert_eq!(s.size(), 0);

        let mut gd = GradientDescent::new(TiePolicy::drift(1).unwrap());
        match gd.step(&mut s, &mut rng) {
            GdOutcome::Moved(m) => {
                assert!(matches!(m.kind, MoveKind::Add(_)));
                assert_eq!(m.scaled_delta, 0);
            }
            GdOutcome::Absorbed => panic!("drift should leave the empty set"),
        }
        assert_eq!(gd.last_argmin().len(), 30);
        assert_eq!(gd.plateau_moves(), 1);
    }

    #[test]
    fn drift_leaves_empty_set_uniformly() {
        let g = gen_er(5, Seed(1)).unwrap();
        let gamma = GammaParam::integer(4).unwrap();
        let mut counts = [0usize; 5];
        for seed in 0..5000 {
            let mut s = SubsetState::empty(&g, gamma);
            let mut gd = GradientDescent::new(TiePolicy::drift(1).unwrap());
            if let GdOutcome::Moved(m) = gd.step(&mut s, &mut Seed(seed).rng(Stream::Chain(0))) {
                counts[m.vertex().unwrap()] += 1;
            }
        }
        // Each vertex has probability 1/5; 5 sigma is about 141.
        for c in counts {
            assert!((c as f64 - 1000.0).abs() < 141.0, "{counts:?}");
        }
    }

    #[test]
    fn strict_local_minimum_absorbs() {
        // A triangle with no outside vertex: removing any vertex costs
        // 3 * 2 - 2 * 2 = 2 > 0 at gamma = 2.
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut s = SubsetState::full(&g, GammaParam::integer(2).unwrap());
        let mut gd = GradientDescent::new(TiePolicy::drift(5).unwrap());
        assert_eq!(gd.step(&mut s, &mut Seed(0).rng(Stream::Chain(0))), GdOutcome::Absorbed);
        assert_eq!(gd.plateau_moves(), 0);
    }
}
