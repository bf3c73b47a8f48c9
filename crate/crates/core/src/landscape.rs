//! Structure of the energy landscape: local-minimum tests, exhaustive global
//! minima for small graphs and enumeration of small local minima.

use std::io::Write;

use num_rational::Ratio;
use rand::seq::index;
use serde::Serialize;

use crate::energy::{GammaParam, SubsetState};
use crate::error::{Error, Result};
use crate::graph_gen::{bits, Graph};
use crate::rng::{Seed, Stream};

/// Largest `n` accepted by [`brute_force_min`].
pub const BRUTE_FORCE_MAX_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalMinReport {
    /// Every other neighbor has strictly higher energy: all outside vertices
    /// have `|E(x, U)| < kappa |U|` and all members `|E(z, U)| > kappa (|U| - 1)`.
    pub is_strict_local_min: bool,
    /// No neighbor has strictly lower energy.
    pub is_absorbing: bool,
    /// First vertex (ascending) breaking strictness, if any.
    pub violating_vertex: Option<usize>,
    #[serde(serialize_with = "ser_ratio")]
    pub kappa: Ratio<u64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// Checks both local-minimum conditions with cross-multiplied integers.
pub fn local_min_check(graph: &Graph, u: &[usize], gamma: GammaParam) -> Result<LocalMinReport> {
    let state = SubsetState::new(graph, u, gamma)?;
    Ok(local_min_report(&state))
}

pub fn local_min_report(state: &SubsetState<'_>) -> LocalMinReport {
    let gamma = state.gamma();
    let (p, pq) = (gamma.numer() as u128, (gamma.numer() + gamma.denom()) as u128);
    let s = state.size() as u128;
    let mut strict = true;
    let mut absorbing = true;
    let mut witness = None;
    for x in 0..state.n() {
        let lhs = pq * state.deg_into(x) as u128;
        let (ok_strict, ok_abs) = if state.contains(x) {
            let rhs = p * (s - 1);
            (lhs > rhs, lhs >= rhs)
        } else {
            let rhs = p * s;
            (lhs < rhs, lhs <= rhs)
        };
        if !ok_strict && witness.is_none() {
            witness = Some(x);
        }
        strict &= ok_strict;
        absorbing &= ok_abs;
    }
    LocalMinReport {
        is_strict_local_min: strict,
        is_absorbing: absorbing,
        violating_vertex: witness,
        kappa: gamma.kappa(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalMin {
    pub min_scaled_energy: i64,
    /// Every minimizer, each ascending; listed in increasing bitmask order.
    pub argmin: Vec<Vec<usize>>,
}

impl GlobalMin {
    pub fn is_unique(&self, set: &[usize]) -> bool {
        self.argmin.len() == 1 && self.argmin[0] == set
    }
}

/// Exact global minimum of `H` over all `2^n` subsets, for `n <= 24`.
///
/// Walks the subsets in Gray-code order so each step flips one vertex and
/// costs one popcount.
pub fn brute_force_min(graph: &Graph, gamma: GammaParam) -> Result<GlobalMin> {
    let n = graph.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let rows: Vec<u32> = (0..n).map(|u| graph.row(u)[0] as u32).collect();
    let (mut mask, mut size, mut edges) = (0u32, 0usize, 0usize);
    let mut best = 0i64;
    let mut argmin = vec![0u32];
    for i in 1u64..(1u64 << n) {
        let x = i.trailing_zeros() as usize;
        let d = (rows[x] & mask).count_ones() as usize;
        mask ^= 1 << x;
        if mask >> x & 1 == 1 {
            size += 1;
            edges += d;
        } else {
            size -= 1;
            edges -= d;
        }
        let e = gamma.scaled_energy(size, edges);
        if e < best {
            best = e;
            argmin.clear();
            argmin.push(mask);
        } else if e == best {
            argmin.push(mask);
        }
    }
    argmin.sort_unstable();
    Ok(GlobalMin {
        min_scaled_energy: best,
        argmin: argmin.into_iter().map(|m| bits::ones(&[m as u64]).collect()).collect(),
    })
}

/// `h(p) = -p log2 p - (1 - p) log2 (1 - p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("need 0 <= p <= 1, got {p}")));
    }
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(p) + term(1.0 - p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityEstimate {
    pub m: usize,
    pub n: usize,
    /// Exact count when `exhaustive`, otherwise the sampling estimate.
    pub observed_count: f64,
    pub stderr: f64,
    pub exhaustive: bool,
    pub kappa: f64,
    pub h_kappa: f64,
    /// `m / log2 n`.
    pub c: f64,
    /// `1 - c (1 - h(kappa)) / 2`, reported only inside the regime
    /// `gamma > 9`, `1 / (1 - h(kappa)) < c < 2` where the growth law applies.
    pub predicted_exponent: Option<f64>,
    pub gamma: String,
}

pub fn complexity_reference(n: usize, m: usize, gamma: GammaParam) -> (f64, f64, f64, Option<f64>) {
    let kappa = gamma.numer() as f64 / (gamma.numer() + gamma.denom()) as f64;
    let h = binary_entropy(kappa).expect("kappa lies in (1/2, 1)");
    let c = m as f64 / (n as f64).log2();
    let in_regime = gamma.numer() > 9 * gamma.denom() && c > 1.0 / (1.0 - h) && c < 2.0;
    let predicted = in_regime.then(|| 1.0 - c * (1.0 - h) / 2.0);
    (kappa, h, c, predicted)
}

/// Fallback when exhaustive enumeration is over budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPlan {
    pub samples: usize,
    pub seed: Seed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalMinima {
    /// All strict local minima found (every one when exhaustive; the sampled
    /// hits otherwise).
    pub sets: Vec<Vec<usize>>,
    pub estimate: ComplexityEstimate,
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Strict local minima of size `m` avoiding `forbidden`.
///
/// When `C(n - |forbidden|, m) <= budget` the count is exact. The search only
/// extends partial sets in which every member still has few enough
/// non-neighbors to reach internal degree `> kappa (m - 1)`, which is
/// necessary for a strict minimum, so no minimum is skipped. Otherwise a
/// uniform sample of `m`-subsets gives a Horvitz–Thompson estimate, or
/// [`Error::BudgetExceeded`] when `sampling` is `None`.
pub fn enumerate_local_minima(
    graph: &Graph,
    m: usize,
    forbidden: &[usize],
    gamma: GammaParam,
    budget: u128,
    sampling: Option<SamplingPlan>,
) -> Result<LocalMinima> {
    let n = graph.n();
    if let Some(&x) = forbidden.iter().find(|&&x| x >= n) {
        return Err(Error::VertexOutOfRange { vertex: x, n });
    }
    let banned = bits::from_indices(n, forbidden.iter().copied());
    let allowed: Vec<usize> = (0..n).filter(|&x| !bits::test(&banned, x)).collect();
    let total = binomial(allowed.len(), m);
    let (kappa, h_kappa, c, predicted_exponent) = complexity_reference(n, m, gamma);
    let mut estimate = ComplexityEstimate {
        m,
        n,
        observed_count: 0.0,
        stderr: 0.0,
        exhaustive: true,
        kappa,
        h_kappa,
        c,
        predicted_exponent,
        gamma: gamma.to_string(),
    };

    if total <= budget {
        let sets = if m == 0 {
            Vec::new()
        } else {
            Search::run(graph, &allowed, m, gamma)
        };
        estimate.observed_count = sets.len() as f64;
        return Ok(LocalMinima { sets, estimate });
    }
    let Some(plan) = sampling else {
        return Err(Error::BudgetExceeded { needed: total, budget });
    };
    if plan.samples == 0 {
        return Err(Error::param("samples", "need at least one sample"));
    }
    let mut rng = plan.seed.rng(Stream::Chain(0));
    let mut sets = Vec::new();
    let mut hits = 0usize;
    for _ in 0..plan.samples {
        let mut u: Vec<usize> = index::sample(&mut rng, allowed.len(), m)
            .into_iter()
            .map(|i| allowed[i])
            .collect();
        u.sort_unstable();
        if local_min_check(graph, &u, gamma)?.is_strict_local_min {
            hits += 1;
            sets.push(u);
        }
    }
    let s = plan.samples as f64;
    let frac = hits as f64 / s;
    let scale = total as f64;
    estimate.exhaustive = false;
    estimate.observed_count = scale * frac;
    estimate.stderr = scale * (frac * (1.0 - frac) / s).sqrt();
    sets.sort();
    sets.dedup();
    Ok(LocalMinima { sets, estimate })
}

struct Search<'a> {
    graph: &'a Graph,
    allowed: &'a [usize],
    m: usize,
    gamma: GammaParam,
    /// Largest number of non-neighbors a member may have inside the final set.
    max_miss: usize,
    chosen: Vec<usize>,
    miss: Vec<usize>,
    mask: Vec<u64>,
    found: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn run(graph: &'a Graph, allowed: &'a [usize], m: usize, gamma: GammaParam) -> Vec<Vec<usize>> {
        // Members need (p + q) deg > p (m - 1), i.e. deg >= floor(p (m - 1) / (p + q)) + 1.
        let (p, pq) = (gamma.numer() as u128, (gamma.numer() + gamma.denom()) as u128);
        let min_deg = (p * (m as u128 - 1) / pq + 1) as usize;
        if min_deg > m - 1 {
            return Vec::new();
        }
        let mut s = Search {
            graph,
            allowed,
            m,
            gamma,
            max_miss: m - 1 - min_deg,
            chosen: Vec::with_capacity(m),
            miss: Vec::with_capacity(m),
            mask: vec![0; graph.words_per_row()],
            found: Vec::new(),
        };
        s.extend(0);
        s.found
    }

    fn extend(&mut self, from: usize) {
        if self.chosen.len() == self.m {
            if local_min_report(&SubsetState::new(self.graph, &self.chosen, self.gamma).expect("in range"))
                .is_strict_local_min
            {
                self.found.push(self.chosen.clone());
            }
            return;
        }
        let need = self.m - self.chosen.len();
        for i in from..=self.allowed.len() - need {
            let v = self.allowed[i];
            let row = self.graph.row(v);
            let adj = bits::and_count(row, &self.mask) as usize;
            let v_miss = self.chosen.len() - adj;
            if v_miss > self.max_miss {
                continue;
            }
            let blocked = self
                .chosen
                .iter()
                .zip(&self.miss)
                .any(|(&u, &mu)| !bits::test(row, u) && mu + 1 > self.max_miss);
            if blocked {
                continue;
            }
            for (j, &u) in self.chosen.iter().enumerate() {
                if !bits::test(row, u) {
                    self.miss[j] += 1;
                }
            }
            self.chosen.push(v);
            self.miss.push(v_miss);
            bits::set(&mut self.mask, v);
            self.extend(i + 1);
            bits::toggle(&mut self.mask, v);
            self.chosen.pop();
            self.miss.pop();
            for (j, &u) in self.chosen.iter().enumerate() {
                if !bits::test(row, u) {
                    self.miss[j] -= 1;
                }
            }
        }
    }
}

pub const LANDSCAPE_CSV_HEADER: &str = "m,count_or_estimate,stderr,predicted_exponent,kappa,h_kappa,n,gamma";

pub fn write_scan_csv<W: Write>(mut w: W, rows: &[ComplexityEstimate]) -> std::io::Result<()> {
    writeln!(w, "{LANDSCAPE_CSV_HEADER}")?;
    for r in rows {
        let pred = r.predicted_exponent.map(|x| format!("{x:.6}")).unwrap_or_default();
        writeln!(
            w,
            "{},{},{:.6},{},{:.6},{:.6},{},{}",
            r.m, r.observed_count, r.stderr, pred, r.kappa, r.h_kappa, r.n, r.gamma
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_gen::{gen_er, gen_planted};

    /// Every subset, scored from scratch.
    fn naive_min(g: &Graph, gamma: GammaParam) -> (i64, Vec<Vec<usize>>) {
        let n = g.n();
        let mut best = (i64::MAX, Vec::new());
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let mut e = 0;
            for (a, &u) in set.iter().enumerate() {
                for &v in &set[a + 1..] {
                    e += g.has_edge(u, v) as usize;
                }
            }
            let s = set.len() as i64;
            let h = gamma.numer() as i64 * s * (s - 1) / 2 - (gamma.numer() + gamma.denom()) as i64 * e as i64;
            if h < best.0 {
                best = (h, vec![set]);
            } else if h == best.0 {
                best.1.push(set);
            }
        }
        best
    }

    #[test]
    fn brute_force_matches_naive() {
        for s in 0..6 {
            let g = gen_er(9, Seed(s)).unwrap();
            for gamma in [GammaParam::integer(2).unwrap(), GammaParam::new(7, 3).unwrap()] {
                let fast = brute_force_min(&g, gamma).unwrap();
                let (e, mut sets) = naive_min(&g, gamma);
                sets.sort_by_key(|v| v.iter().map(|&i| 1u32 << i).sum::<u32>());
                assert_eq!(fast.min_scaled_energy, e);
                assert_eq!(fast.argmin, sets);
            }
        }
    }

    #[test]
    fn brute_force_trivial_graphs() {
        let gamma = GammaParam::integer(2).unwrap();
        let empty = Graph::from_edges(4, []).unwrap();
        let r = brute_force_min(&empty, gamma).unwrap();
        assert_eq!(r.min_scaled_energy, 0);
        assert_eq!(r.argmin, vec![vec![], vec![0], vec![1], vec![2], vec![3]]);
        let k5 = gen_planted(5, 5, Seed(0)).unwrap();
        let r = brute_force_min(k5.graph(), gamma).unwrap();
        assert_eq!(r.min_scaled_energy, -10);
        assert!(r.is_unique(&[0, 1, 2, 3, 4]));
        assert!(brute_force_min(&gen_er(25, Seed(0)).unwrap(), gamma).is_err());
    }

    #[test]
    fn minimizers_are_absorbing() {
        for s in 0..20 {
            let inst = gen_planted(12, 8, Seed(s)).unwrap();
            let gamma = GammaParam::integer(2).unwrap();
            let r = brute_force_min(inst.graph(), gamma).unwrap();
            for set in &r.argmin {
                let rep = local_min_check(inst.graph(), set, gamma).unwrap();
                assert!(rep.is_absorbing);
                if r.argmin.len() == 1 {
                    assert!(rep.is_strict_local_min);
                }
            }
        }
    }

    #[test]
    fn singleton_and_triangle() {
        let gamma = GammaParam::integer(3).unwrap();
        // Triangle 0-1-2; vertices 3 and 4 each see two of its corners.
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 0), (3, 1), (4, 1), (4, 2)]).unwrap();
        let r = local_min_check(&g, &[0, 1, 2], gamma).unwrap();
        assert!(r.is_strict_local_min && r.is_absorbing);
        assert_eq!(r.kappa, Ratio::new(3, 4));
        let r = local_min_check(&g, &[3], gamma).unwrap();
        assert!(!r.is_strict_local_min);
        assert_eq!(r.violating_vertex, Some(0));
        // Vertex 0 is adjacent to 3 and 4 * 1 > 3 * 1, so adding it lowers H.
        assert!(!r.is_absorbing);
        let lonely = Graph::from_edges(3, [(0, 1)]).unwrap();
        let r = local_min_check(&lonely, &[2], gamma).unwrap();
        assert!(r.is_absorbing && !r.is_strict_local_min);
    }

    #[test]
    fn report_agrees_with_neighbor_scan() {
        for s in 0..50u64 {
            let g = gen_er(20 + (s as usize % 40), Seed(s)).unwrap();
            let gamma = GammaParam::new(3 + s % 9, 1 + s % 2).unwrap();
            let n = g.n();
            let u: Vec<usize> = (0..n).filter(|&x| (x as u64 * 7 + s).is_multiple_of(3)).collect();
            let st = SubsetState::new(&g, &u, gamma).unwrap();
            let rep = local_min_report(&st);
            let deltas: Vec<i64> = (0..n).map(|x| st.flip_delta(x)).collect();
            assert_eq!(rep.is_strict_local_min, deltas.iter().all(|&d| d > 0));
            assert_eq!(rep.is_absorbing, deltas.iter().all(|&d| d >= 0));
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // Series oracle: h(p) = -(p ln p + (1-p) ln(1-p)) / ln 2, with
        // ln(1 - x) summed as -sum x^j / j.
        let p: f64 = 0.9;
        let ln_p = -(1..200).map(|j| 0.1f64.powi(j) / j as f64).sum::<f64>();
        let ln_q = -(1..2000).map(|j| 0.9f64.powi(j) / j as f64).sum::<f64>();
        let series = -(p * ln_p + (1.0 - p) * ln_q) / std::f64::consts::LN_2;
        let h = binary_entropy(0.9).unwrap();
        assert!((h - series).abs() < 1e-12);
        assert!((h - 0.4690).abs() < 1e-4);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn pruned_search_matches_plain_enumeration() {
        for s in 0..8 {
            let g = gen_er(18, Seed(s)).unwrap();
            for (gamma, m) in [
                (GammaParam::integer(2).unwrap(), 4),
                (GammaParam::new(3, 2).unwrap(), 5),
                (GammaParam::integer(10).unwrap(), 3),
            ] {
                let forbidden = [0, 5, 11];
                let got = enumerate_local_minima(&g, m, &forbidden, gamma, u128::MAX, None).unwrap();
                let allowed: Vec<usize> = (0..18).filter(|x| !forbidden.contains(x)).collect();
                let mut want = Vec::new();
                for mask in 0u32..(1 << allowed.len()) {
                    if mask.count_ones() as usize != m {
                        continue;
                    }
                    let u: Vec<usize> = (0..allowed.len())
                        .filter(|&i| mask >> i & 1 == 1)
                        .map(|i| allowed[i])
                        .collect();
                    if local_min_check(&g, &u, gamma).unwrap().is_strict_local_min {
                        want.push(u);
                    }
                }
                want.sort();
                let mut found = got.sets.clone();
                found.sort();
                assert_eq!(found, want, "seed {s} m {m}");
                assert_eq!(got.estimate.observed_count, want.len() as f64);
            }
        }
    }

    #[test]
    fn singletons_are_never_strict_minima() {
        let g = gen_er(30, Seed(1)).unwrap();
        let r = enumerate_local_minima(&g, 1, &[], GammaParam::integer(3).unwrap(), u128::MAX, None).unwrap();
        assert!(r.sets.is_empty());
    }

    #[test]
    fn oversized_sets_cannot_be_minima_at_small_n() {
        // At gamma = 10 a strict minimum of size 8 must be an 8-clique; G(20, 1/2)
        // essentially never has one.
        let g = gen_er(20, Seed(2)).unwrap();
        let r = enumerate_local_minima(&g, 8, &[], GammaParam::integer(10).unwrap(), u128::MAX, None).unwrap();
        assert_eq!(r.estimate.observed_count, 0.0);
    }

    #[test]
    fn budget_and_sampling() {
        let g = gen_er(40, Seed(3)).unwrap();
        let gamma = GammaParam::integer(10).unwrap();
        assert!(matches!(
            enumerate_local_minima(&g, 4, &[], gamma, 10, None),
            Err(Error::BudgetExceeded { .. })
        ));
        let exact = enumerate_local_minima(&g, 4, &[], gamma, u128::MAX, None)
            .unwrap()
            .estimate
            .observed_count;
        let plan = SamplingPlan {
            samples: 40_000,
            seed: Seed(1),
        };
        let est = enumerate_local_minima(&g, 4, &[], gamma, 10, Some(plan))
            .unwrap()
            .estimate;
        assert!(!est.exhaustive);
        assert!(
            (est.observed_count - exact).abs() <= 5.0 * est.stderr.max(1.0),
            "{} vs {exact} (se {})",
            est.observed_count,
            est.stderr
        );
    }

    #[test]
    fn exponent_only_in_regime() {
        let g = GammaParam::integer(10).unwrap();
        assert!(complexity_reference(64, 8, g).3.is_none());
        let (kappa, h, c, pred) = complexity_reference(1 << 20, 38, g);
        assert!((kappa - 10.0 / 11.0).abs() < 1e-15);
        assert!(c > 1.0 / (1.0 - h) && c < 2.0);
        assert!((pred.unwrap() - (1.0 - c * (1.0 - h) / 2.0)).abs() < 1e-15);
    }
}
