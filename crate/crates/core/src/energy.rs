//! Exact evaluation of the relaxed clique Hamiltonian.
//!
//! With `gamma = p / q` in lowest terms, energies are stored scaled by `q`:
//!
//! ```text
//! q * H(U) = p * C(|U|, 2) - (p + q) * |E(U)|
//! ```
//!
//! so every comparison and argmin is integer-exact.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_gen::bits;
use crate::graph_gen::Graph;

/// Lagrange multiplier `gamma = p / q > 1` as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GammaParam {
    p: u64,
    q: u64,
}

impl GammaParam {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::param("gamma", "zero denominator"));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if p <= q {
            return Err(Error::param("gamma", format!("need gamma > 1, got {p}/{q}")));
        }
        Ok(GammaParam { p, q })
    }

    pub fn integer(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn numer(self) -> u64 {
        self.p
    }

    pub fn denom(self) -> u64 {
        self.q
    }

    pub fn as_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `kappa = gamma / (1 + gamma) = p / (p + q)`.
    pub fn kappa(self) -> Ratio<u64> {
        Ratio::new(self.p, self.p + self.q)
    }

    #[inline]
    pub(crate) fn pi(self) -> i64 {
        self.p as i64
    }

    #[inline]
    pub(crate) fn pq(self) -> i64 {
        (self.p + self.q) as i64
    }

    /// Scaled energy of a set with `size` vertices and `edges` internal edges.
    pub fn scaled_energy(self, size: usize, edges: usize) -> i64 {
        let pairs = (size as i64) * (size as i64 - 1) / 2;
        self.pi() * pairs - self.pq() * edges as i64
    }
}

impl std::str::FromStr for GammaParam {
    type Err = Error;

    /// Accepts `"p/q"` or an integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("gamma", format!("cannot parse `{s}` as p/q"));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => Self::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => Self::integer(s.parse().map_err(|_| bad())?),
        }
    }
}

impl TryFrom<String> for GammaParam {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GammaParam> for String {
    fn from(g: GammaParam) -> String {
        g.to_string()
    }
}

impl std::fmt::Display for GammaParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// A subset `U` with cached degrees into `U`, internal edge count and scaled
/// energy.
///
/// `deg_into[x] = |E(x, U)|` is kept for every vertex, members or not, so both
/// add and remove deltas are O(1).
#[derive(Clone)]
pub struct SubsetState<'g> {
    graph: &'g Graph,
    gamma: GammaParam,
    members: Vec<u64>,
    size: usize,
    internal_edges: usize,
    deg_into: Vec<u32>,
    scaled_energy: i64,
}

impl std::fmt::Debug for SubsetState<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubsetState")
            .field("size", &self.size)
            .field("internal_edges", &self.internal_edges)
            .field("scaled_energy", &self.scaled_energy)
            .finish()
    }
}

impl PartialEq for SubsetState<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.graph, other.graph)
            && self.gamma == other.gamma
            && self.members == other.members
            && self.size == other.size
            && self.internal_edges == other.internal_edges
            && self.deg_into == other.deg_into
            && self.scaled_energy == other.scaled_energy
    }
}

impl<'g> SubsetState<'g> {
    /// Builds all caches from scratch in O(n^2 / 64).
    pub fn new(graph: &'g Graph, u: &[usize], gamma: GammaParam) -> Result<Self> {
        let n = graph.n();
        if let Some(&x) = u.iter().find(|&&x| x >= n) {
            return Err(Error::VertexOutOfRange { vertex: x, n });
        }
        Ok(Self::from_mask(graph, bits::from_indices(n, u.iter().copied()), gamma))
    }

    pub fn empty(graph: &'g Graph, gamma: GammaParam) -> Self {
        Self::from_mask(graph, vec![0; graph.words_per_row()], gamma)
    }

    pub fn full(graph: &'g Graph, gamma: GammaParam) -> Self {
        let n = graph.n();
        Self::from_mask(graph, bits::from_indices(n, 0..n), gamma)
    }

    fn from_mask(graph: &'g Graph, members: Vec<u64>, gamma: GammaParam) -> Self {
        let deg_into: Vec<u32> = (0..graph.n()).map(|x| graph.degree_into(x, &members)).collect();
        let size = members.iter().map(|w| w.count_ones() as usize).sum();
        let twice: usize = bits::ones(&members).map(|x| deg_into[x] as usize).sum();
        let internal_edges = twice / 2;
        SubsetState {
            graph,
            gamma,
            members,
            size,
            internal_edges,
            deg_into,
            scaled_energy: gamma.scaled_energy(size, internal_edges),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn gamma(&self) -> GammaParam {
        self.gamma
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        bits::test(&self.members, x)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn internal_edges(&self) -> usize {
        self.internal_edges
    }

    pub fn scaled_energy(&self) -> i64 {
        self.scaled_energy
    }

    /// `H(U)` as a real number.
    pub fn energy(&self) -> f64 {
        self.scaled_energy as f64 / self.gamma.denom() as f64
    }

    /// `|E(x, U)|`.
    #[inline]
    pub fn deg_into(&self, x: usize) -> u32 {
        self.deg_into[x]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.deg_into
    }

    pub fn mask(&self) -> &[u64] {
        &self.members
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        bits::ones(&self.members)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members().collect()
    }

    /// Scaled energy change of toggling `x`, whichever direction that is.
    #[inline]
    pub fn flip_delta(&self, x: usize) -> i64 {
        let d = self.deg_into[x] as i64;
        let s = self.size as i64;
        if self.contains(x) {
            self.gamma.pq() * d - self.gamma.pi() * (s - 1)
        } else {
            -self.gamma.pq() * d + self.gamma.pi() * s
        }
    }

    /// `q * (H(U + x) - H(U)) = -(p + q) |E(x, U)| + p |U|`.
    pub fn delta_add(&self, x: usize) -> Result<i64> {
        self.check(x)?;
        if self.contains(x) {
            return Err(Error::AlreadyMember(x));
        }
        Ok(self.flip_delta(x))
    }

    /// `q * (H(U - z) - H(U)) = (p + q) |E(z, U)| - p (|U| - 1)`.
    pub fn delta_remove(&self, z: usize) -> Result<i64> {
        self.check(z)?;
        if !self.contains(z) {
            return Err(Error::NotMember(z));
        }
        Ok(self.flip_delta(z))
    }

    fn check(&self, x: usize) -> Result<()> {
        if x >= self.n() {
            return Err(Error::VertexOutOfRange { vertex: x, n: self.n() });
        }
        Ok(())
    }

    /// Toggles membership of `x` and updates every cache in O(n / 64 + deg(x)).
    ///
    /// # Panics
    /// If `x` is not a vertex.
    pub fn apply_flip(&mut self, x: usize) {
        let delta = self.flip_delta(x);
        let d = self.deg_into[x] as usize;
        let adding = !self.contains(x);
        bits::toggle(&mut self.members, x);
        if adding {
            self.size += 1;
            self.internal_edges += d;
            for y in self.graph.neighbors(x) {
                self.deg_into[y] += 1;
            }
        } else {
            self.size -= 1;
            self.internal_edges -= d;
            for y in self.graph.neighbors(x) {
                self.deg_into[y] -= 1;
            }
        }
        self.scaled_energy += delta;
    }

    /// Recomputes every cache from the membership bits and compares.
    pub fn is_consistent(&self) -> bool {
        let fresh = Self::from_mask(self.graph, self.members.clone(), self.gamma);
        fresh == *self && 2 * self.internal_edges == self.members().map(|x| self.deg_into[x] as usize).sum::<usize>()
    }
}
