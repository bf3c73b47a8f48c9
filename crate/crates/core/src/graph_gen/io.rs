//! Graph files.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic     b"PCLQ"
//! version   u16            (currently 1)
//! model     u8             (0 = er, 1 = planted, 2 = contaminated)
//! has_seed  u8
//! n, k, m   u64 each
//! q         f64            (0.5 unless contaminated)
//! seed      u64            (0 when has_seed = 0)
//! pc        k x u32        ascending
//! v_set     m x u32        ascending
//! rows      n x ceil(n/64) x u64, row-major, bit v of row u set iff {u, v} is an edge
//! ```
//!
//! The edge-list text format has one `u v` pair per line (`u < v`, 0-indexed),
//! preceded by a `# n <count>` comment so isolated trailing vertices survive.

use std::io::{BufRead, Read, Write};

use super::graph::{Contamination, Graph, ModelTag, PlantedInstance};
use crate::error::{Error, Result};
use crate::rng::Seed;

const MAGIC: &[u8; 4] = b"PCLQ";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphHeader {
    pub model: ModelTag,
    pub n: usize,
    pub seed: Option<Seed>,
    pub pc: Vec<usize>,
    pub contamination: Option<Contamination>,
}

impl GraphHeader {
    pub fn for_instance(inst: &PlantedInstance) -> Self {
        GraphHeader {
            model: inst.model(),
            n: inst.n(),
            seed: inst.seed(),
            pc: inst.pc().to_vec(),
            contamination: inst.contamination().cloned(),
        }
    }

    pub fn for_er(g: &Graph, seed: Option<Seed>) -> Self {
        GraphHeader {
            model: ModelTag::Er,
            n: g.n(),
            seed,
            pc: Vec::new(),
            contamination: None,
        }
    }
}

pub fn write_binary<W: Write>(mut w: W, header: &GraphHeader, g: &Graph) -> Result<()> {
    if header.n != g.n() {
        return Err(Error::Format(format!(
            "header n = {} but graph has {}",
            header.n,
            g.n()
        )));
    }
    let (m, q, v_set) = match &header.contamination {
        Some(c) => (c.v_set.len(), c.q, c.v_set.as_slice()),
        None => (0, 0.5, &[][..]),
    };
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&[header.model.code(), header.seed.is_some() as u8])?;
    for x in [header.n, header.pc.len(), m] {
        w.write_all(&(x as u64).to_le_bytes())?;
    }
    w.write_all(&q.to_le_bytes())?;
    w.write_all(&header.seed.map_or(0, |s| s.0).to_le_bytes())?;
    for &x in header.pc.iter().chain(v_set) {
        w.write_all(&(x as u32).to_le_bytes())?;
    }
    for word in g.raw_rows() {
        w.write_all(&word.to_le_bytes())?;
    }
    Ok(())
}

fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(buf)
}

fn take_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(take(r)?))
}

fn take_labels(r: &mut impl Read, count: usize, n: usize) -> Result<Vec<usize>> {
    (0..count)
        .map(|_| {
            let x = u32::from_le_bytes(take(r)?) as usize;
            if x >= n {
                return Err(Error::Format(format!("label {x} out of range")));
            }
            Ok(x)
        })
        .collect()
}

pub fn read_binary<R: Read>(mut r: R) -> Result<(GraphHeader, Graph)> {
    if &take::<4>(&mut r)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let [model, has_seed] = take::<2>(&mut r)?;
    let model = ModelTag::from_code(model).ok_or_else(|| Error::Format(format!("unknown model tag {model}")))?;
    let n = take_u64(&mut r)? as usize;
    let k = take_u64(&mut r)? as usize;
    let m = take_u64(&mut r)? as usize;
    let q = f64::from_le_bytes(take(&mut r)?);
    let seed = take_u64(&mut r)?;
    if n == 0 || k > n || m > n {
        return Err(Error::Format(format!("inconsistent sizes n = {n}, k = {k}, m = {m}")));
    }
    let pc = take_labels(&mut r, k, n)?;
    let v_set = take_labels(&mut r, m, n)?;
    let words = n.div_ceil(64);
    let rows = (0..n * words).map(|_| take_u64(&mut r)).collect::<Result<Vec<_>>>()?;
    let g = Graph::from_rows(n, rows)?;
    let header = GraphHeader {
        model,
        n,
        seed: (has_seed != 0).then_some(Seed(seed)),
        pc,
        contamination: (model == ModelTag::Contaminated).then_some(Contamination { v_set, q }),
    };
    Ok((header, g))
}

/// Reads a planted or contaminated instance; Erdős–Rényi files are rejected.
pub fn read_instance<R: Read>(r: R) -> Result<PlantedInstance> {
    let (h, g) = read_binary(r)?;
    if h.model == ModelTag::Er {
        return Err(Error::Format("file holds an unplanted graph".into()));
    }
    Ok(PlantedInstance::new(g, h.pc, h.contamination)?.with_provenance(h.model, h.seed))
}

pub fn write_edge_list<W: Write>(mut w: W, g: &Graph) -> Result<()> {
    writeln!(w, "# n {}", g.n())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let mut it = rest.split_whitespace();
            if it.next() == Some("n") {
                n = it.next().and_then(|s| s.parse::<usize>().ok());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
            _ => return Err(Error::Format(format!("line {}: expected `u v`", lineno + 1))),
        }
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_gen::{gen_contaminated, gen_er, gen_planted, VPolicy};

    #[test]
    fn binary_round_trip_preserves_instance() {
        let inst = gen_contaminated(130, 12, 9, 0.7, &VPolicy::Random, Seed(11)).unwrap();
        let mut buf = Vec::new();
        write_binary(&mut buf, &GraphHeader::for_instance(&inst), inst.graph()).unwrap();
        let back = read_instance(buf.as_slice()).unwrap();
        assert_eq!(back.graph(), inst.graph());
        assert_eq!(back.pc(), inst.pc());
        assert_eq!(back.contamination(), inst.contamination());
        assert_eq!(back.seed(), Some(Seed(11)));
        assert_eq!(back.model(), ModelTag::Contaminated);
    }

    #[test]
    fn binary_rejects_corruption() {
        let inst = gen_planted(70, 5, Seed(1)).unwrap();
        let mut buf = Vec::new();
        write_binary(&mut buf, &GraphHeader::for_instance(&inst), inst.graph()).unwrap();
        assert!(read_binary(&buf[..buf.len() - 3]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_binary(bad.as_slice()).is_err());
        // Flip one adjacency bit so the matrix is no longer symmetric.
        let mut asym = buf.clone();
        let last = asym.len() - 16;
        asym[last] ^= 1;
        assert!(read_binary(asym.as_slice()).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_er(90, Seed(2)).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g).unwrap();
        assert_eq!(read_edge_list(buf.as_slice()).unwrap(), g);
        let g = read_edge_list("0 2\n\n1 2\n".as_bytes()).unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 2));
        assert!(read_edge_list("0 x\n".as_bytes()).is_err());
    }
}
