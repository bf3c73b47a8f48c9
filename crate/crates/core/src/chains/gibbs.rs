use rand::Rng;

use super::trajectory::Move;
use crate::energy::SubsetState;
use crate::error::{Error, Result};

/// Exponents below this give `exp(x) == 0.0` in `f64`, so the weight is
/// skipped without changing any result.
const UNDERFLOW: f64 = -746.0;

/// Neighborhood Gibbs sampler: from `W`, move to `U ~ W` (Hamming distance at
/// most one, `W` itself included) with probability `exp(-beta H(U)) / Z(W)`.
///
/// Candidate `x < n` is the flip of vertex `x`; candidate `n` is staying put.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    beta: f64,
    weights: Vec<f64>,
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::param("beta", format!("need a finite beta >= 0, got {beta}")));
    }
    Ok(())
}

impl GibbsSampler {
    pub fn new(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(GibbsSampler {
            beta,
            weights: Vec::new(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Fills `weights` with `exp(-beta (H_c - H_min))` and returns
    /// `(sum, H_min - H(W))` with the shift in scaled units.
    fn fill(&mut self, state: &SubsetState<'_>) -> (f64, i64) {
        let n = state.n();
        self.weights.resize(n + 1, 0.0);
        let low = (0..n).map(|x| state.flip_delta(x)).min().unwrap_or(0).min(0);
        let scale = self.beta / state.gamma().denom() as f64;
        let mut total = 0.0;
        let mut weigh = |d: i64| {
            let e = -scale * (d - low) as f64;
            let w = if e < UNDERFLOW { 0.0 } else { e.exp() };
            total += w;
            w
        };
        for x in 0..n {
            self.weights[x] = weigh(state.flip_delta(x));
        }
        self.weights[n] = weigh(0);
        (total, low)
    }

    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut SubsetState<'_>, rng: &mut R) -> Move {
        let (total, _) = self.fill(state);
        let n = state.n();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = n;
        for (c, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            acc += w;
            pick = c;
            if acc > target {
                break;
            }
        }
        if pick == n {
            return Move::STAY;
        }
        let was_member = state.contains(pick);
        let d = state.flip_delta(pick);
        state.apply_flip(pick);
        Move::flip(pick, was_member, d)
    }
}

/// Transition probabilities from `state`: entries `0..n` are the flips, entry
/// `n` is the self-loop.
pub fn gibbs_kernel(state: &SubsetState<'_>, beta: f64) -> Result<Vec<f64>> {
    let mut g = GibbsSampler::new(beta)?;
    let (total, _) = g.fill(state);
    Ok(g.weights.iter().map(|w| w / total).collect())
}

/// `log Z(W)` with `Z(W) = sum over U ~ W of exp(-beta H(U))`.
pub fn log_partition(state: &SubsetState<'_>, beta: f64) -> Result<f64> {
    let mut g = GibbsSampler::new(beta)?;
    let (total, low) = g.fill(state);
    let q = state.gamma().denom() as f64;
    let h_min = (state.scaled_energy() + low) as f64 / q;
    Ok(-beta * h_min + total.ln())
}
