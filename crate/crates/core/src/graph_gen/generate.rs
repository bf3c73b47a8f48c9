use rand::seq::index;
use rand::{Rng, RngCore};

use super::bits;
use super::graph::{Contamination, Graph, ModelTag, PlantedInstance};
use crate::error::{Error, Result};
use crate::rng::{Seed, Stream};

/// How the contaminated set `V` is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VPolicy {
    /// Uniformly random `m`-subset of the non-planted vertices.
    #[default]
    Random,
    /// Caller-chosen vertices (the adversary's pick). Must have length `m`.
    Explicit(Vec<usize>),
}

/// Fair-coin upper triangle drawn row by row from the `Edges` stream, then
/// mirrored. Row `u` consumes one `u64` per word from word `(u + 1) / 64` on.
fn fair_graph(n: usize, seed: Seed) -> Graph {
    let mut rng = seed.rng(Stream::Edges);
    let mut g = Graph::empty(n);
    let words = g.words_per_row();
    let tail = n % 64;
    for u in 0..n {
        let first = (u + 1) / 64;
        let row = g.row_mut(u);
        for (w, slot) in row.iter_mut().enumerate().skip(first) {
            let mut r = rng.next_u64();
            if w == first {
                let low = (u + 1) % 64;
                r &= !((1u64 << low) - 1);
            }
            if w == words - 1 && tail != 0 {
                r &= (1u64 << tail) - 1;
            }
            *slot = r;
        }
    }
    g.mirror_upper();
    g
}

fn complete_clique(g: &mut Graph, pc: &[usize]) {
    for (i, &u) in pc.iter().enumerate() {
        for &v in &pc[i + 1..] {
            g.add_edge(u, v);
        }
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if k == 0 || k > n {
        return Err(Error::param("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    Ok(())
}

fn sample_sorted(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut v = index::sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

/// `G(n, 1/2)`.
pub fn gen_er(n: usize, seed: Seed) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    Ok(fair_graph(n, seed))
}

/// `G(n, 1/2, k)`. Uses the same edge stream as [`gen_er`], so the result is
/// `gen_er(n, seed)` with the planted pairs completed.
pub fn gen_planted(n: usize, k: usize, seed: Seed) -> Result<PlantedInstance> {
    gen_coupled(n, k, seed).map(|(_, g)| g)
}

/// The pair `(G0, G)`: `G0 ~ G(n, 1/2)` and `G` equal to `G0` plus the
/// missing pairs inside the planted set.
pub fn gen_coupled(n: usize, k: usize, seed: Seed) -> Result<(Graph, PlantedInstance)> {
    check_nk(n, k)?;
    let g0 = fair_graph(n, seed);
    let pc = sample_sorted(&mut seed.rng(Stream::Labels), n, k);
    let mut g = g0.clone();
    complete_clique(&mut g, &pc);
    let inst = PlantedInstance::new(g, pc, None)?.with_provenance(ModelTag::Planted, Some(seed));
    Ok((g0, inst))
}

/// Contaminated planted clique `G(n, 1/2, q, k, m)`: every pair touching `V`
/// is an edge with probability `q`, pairs inside the planted set always, all
/// other pairs with probability 1/2.
///
/// With `q == 0.5` no contamination draws are made and the graph equals
/// `gen_planted(n, k, seed)` bit for bit.
pub fn gen_contaminated(n: usize, k: usize, m: usize, q: f64, policy: &VPolicy, seed: Seed) -> Result<PlantedInstance> {
    check_nk(n, k)?;
    if !(0.5..1.0).contains(&q) {
        return Err(Error::param("q", format!("need 1/2 <= q < 1, got {q}")));
    }
    if k + m > n {
        return Err(Error::param(
            "m",
            format!("need k + m <= n, got k = {k}, m = {m}, n = {n}"),
        ));
    }
    let mut g = fair_graph(n, seed);
    let mut labels = seed.rng(Stream::Labels);
    let pc = sample_sorted(&mut labels, n, k);
    let pc_mask = bits::from_indices(n, pc.iter().copied());

    let mut v_set = match policy {
        VPolicy::Random => {
            let outside: Vec<usize> = (0..n).filter(|&x| !bits::test(&pc_mask, x)).collect();
            sample_sorted(&mut labels, outside.len(), m)
                .into_iter()
                .map(|i| outside[i])
                .collect()
        }
        VPolicy::Explicit(list) => {
            if list.len() != m {
                return Err(Error::param(
                    "v_set",
                    format!("expected {m} vertices, got {}", list.len()),
                ));
            }
            if let Some(&x) = list.iter().find(|&&x| x >= n) {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
            if let Some(&x) = list.iter().find(|&&x| bits::test(&pc_mask, x)) {
                return Err(Error::param("v_set", format!("vertex {x} overlaps the planted clique")));
            }
            list.clone()
        }
    };
    v_set.sort_unstable();
    v_set.dedup();
    if v_set.len() != m {
        return Err(Error::param("v_set", "duplicate vertices"));
    }

    if q != 0.5 && m > 0 {
        let v_mask = bits::from_indices(n, v_set.iter().copied());
        let mut rng = seed.rng(Stream::Contamination);
        for u in 0..n {
            let u_in = bits::test(&v_mask, u);
            for v in u + 1..n {
                if u_in || bits::test(&v_mask, v) {
                    let on = rng.gen_bool(q);
                    g.set_pair(u, v, on);
                }
            }
        }
    }
    complete_clique(&mut g, &pc);
    let inst = PlantedInstance::new(g, pc, Some(Contamination { v_set, q }))?
        .with_provenance(ModelTag::Contaminated, Some(seed));
    Ok(inst)
}
