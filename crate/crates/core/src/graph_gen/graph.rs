use serde::{Deserialize, Serialize};

use super::bits;
use crate::error::{Error, Result};
use crate::rng::Seed;

/// Undirected simple graph on `0..n` with dense packed adjacency rows.
///
/// Row `u` is a bitset over all vertices; `|E(x, U)|` for a subset mask `U`
/// is a popcount of the row masked by `U`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl Graph {
    pub(crate) fn empty(n: usize) -> Self {
        let words = bits::words_for(n);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    /// Builds a graph from an explicit edge list. Self-loops are rejected;
    /// repeated pairs are merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "graph needs at least one vertex"));
        }
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::param("edges", format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub(crate) fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self> {
        let words = bits::words_for(n);
        if rows.len() != n * words {
            return Err(Error::Format(format!(
                "expected {} adjacency words, found {}",
                n * words,
                rows.len()
            )));
        }
        let g = Graph { n, words, rows };
        for u in 0..n {
            if g.has_edge(u, u) {
                return Err(Error::Format(format!("self-loop at {u}")));
            }
            let tail = n % 64;
            if tail != 0 && g.row(u)[words - 1] >> tail != 0 {
                return Err(Error::Format(format!("padding bits set in row {u}")));
            }
            for v in g.neighbors(u) {
                if !g.has_edge(v, u) {
                    return Err(Error::Format(format!("asymmetric pair ({u}, {v})")));
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        let w = self.words;
        bits::set(&mut self.rows[u * w..(u + 1) * w], v);
        bits::set(&mut self.rows[v * w..(v + 1) * w], u);
    }

    pub(crate) fn set_pair(&mut self, u: usize, v: usize, on: bool) {
        if self.has_edge(u, v) != on {
            let w = self.words;
            bits::toggle(&mut self.rows[u * w..(u + 1) * w], v);
            bits::toggle(&mut self.rows[v * w..(v + 1) * w], u);
        }
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, u: usize) -> &mut [u64] {
        let w = self.words;
        &mut self.rows[u * w..(u + 1) * w]
    }

    /// Copies every upper-triangle bit of row `u` (`v > u`) into row `v`.
    pub(crate) fn mirror_upper(&mut self) {
        for u in 0..self.n {
            let upper: Vec<usize> = bits::ones(self.row(u)).filter(|&v| v > u).collect();
            for v in upper {
                let w = self.words;
                bits::set(&mut self.rows[v * w..(v + 1) * w], u);
            }
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words_per_row(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub(crate) fn raw_rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::test(self.row(u), v)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of neighbors of `u` inside the subset given as a packed mask.
    #[inline]
    pub fn degree_into(&self, u: usize, mask: &[u64]) -> u32 {
        bits::and_count(self.row(u), mask)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        bits::ones(self.row(u))
    }

    /// Edges as `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edges_within(&self, set: &[usize]) -> usize {
        let mask = bits::from_indices(self.n, set.iter().copied());
        set.iter().map(|&u| self.degree_into(u, &mask) as usize).sum::<usize>() / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Er,
    Planted,
    Contaminated,
}

impl ModelTag {
    pub(crate) fn code(self) -> u8 {
        match self {
            ModelTag::Er => 0,
            ModelTag::Planted => 1,
            ModelTag::Contaminated => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(ModelTag::Er),
            1 => Some(ModelTag::Planted),
            2 => Some(ModelTag::Contaminated),
            _ => None,
        }
    }
}

/// The adversarial high-degree set of the contaminated model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contamination {
    pub v_set: Vec<usize>,
    pub q: f64,
}

/// A graph together with its ground-truth planted clique.
///
/// Vertex labels are never permuted: `pc` is reported in the labels of
/// `graph`.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    graph: Graph,
    pc: Vec<usize>,
    pc_mask: Vec<u64>,
    contamination: Option<Contamination>,
    v_mask: Option<Vec<u64>>,
    model: ModelTag,
    seed: Option<Seed>,
}

impl PlantedInstance {
    /// Validates clique completeness of `pc` and disjointness from `V`.
    pub fn new(graph: Graph, mut pc: Vec<usize>, contamination: Option<Contamination>) -> Result<Self> {
        let n = graph.n();
        pc.sort_unstable();
        pc.dedup();
        if let Some(&x) = pc.iter().find(|&&x| x >= n) {
            return Err(Error::VertexOutOfRange { vertex: x, n });
        }
        for (i, &u) in pc.iter().enumerate() {
            for &v in &pc[i + 1..] {
                if !graph.has_edge(u, v) {
                    return Err(Error::param("pc", format!("pair ({u}, {v}) is not an edge")));
                }
            }
        }
        let pc_mask = bits::from_indices(n, pc.iter().copied());
        let mut model = ModelTag::Planted;
        let v_mask = match &contamination {
            None => None,
            Some(c) => {
                model = ModelTag::Contaminated;
                if let Some(&x) = c.v_set.iter().find(|&&x| x >= n) {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
                if let Some(&x) = c.v_set.iter().find(|&&x| bits::test(&pc_mask, x)) {
                    return Err(Error::param("v_set", format!("vertex {x} is in the planted clique")));
                }
                Some(bits::from_indices(n, c.v_set.iter().copied()))
            }
        };
        Ok(PlantedInstance {
            graph,
            pc,
            pc_mask,
            contamination,
            v_mask,
            model,
            seed: None,
        })
    }

    pub(crate) fn with_provenance(mut self, model: ModelTag, seed: Option<Seed>) -> Self {
        self.model = model;
        self.seed = seed;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> usize {
        self.pc.len()
    }

    /// Planted clique vertices, ascending.
    pub fn pc(&self) -> &[usize] {
        &self.pc
    }

    pub fn pc_mask(&self) -> &[u64] {
        &self.pc_mask
    }

    #[inline]
    pub fn in_pc(&self, x: usize) -> bool {
        bits::test(&self.pc_mask, x)
    }

    pub fn contamination(&self) -> Option<&Contamination> {
        self.contamination.as_ref()
    }

    #[inline]
    pub fn in_v(&self, x: usize) -> bool {
        self.v_mask.as_ref().is_some_and(|m| bits::test(m, x))
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn seed(&self) -> Option<Seed> {
        self.seed
    }
}
