use std::io::Write;

use serde::{Deserialize, Serialize};

/// One step between Hamming neighbors `U ~ U'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    Add(usize),
    Remove(usize),
    Stay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    /// Change of the scaled energy `q * H`; zero for `Stay`.
    pub scaled_delta: i64,
}

impl Move {
    pub const STAY: Move = Move {
        kind: MoveKind::Stay,
        scaled_delta: 0,
    };

    pub(crate) fn flip(x: usize, was_member: bool, scaled_delta: i64) -> Self {
        let kind = if was_member {
            MoveKind::Remove(x)
        } else {
            MoveKind::Add(x)
        };
        Move { kind, scaled_delta }
    }

    pub fn vertex(&self) -> Option<usize> {
        match self.kind {
            MoveKind::Add(x) | MoveKind::Remove(x) => Some(x),
            MoveKind::Stay => None,
        }
    }

    pub fn is_removal(&self) -> bool {
        matches!(self.kind, MoveKind::Remove(_))
    }

    fn kind_str(&self) -> &'static str {
        match self.kind {
            MoveKind::Add(_) => "add",
            MoveKind::Remove(_) => "remove",
            MoveKind::Stay => "stay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    /// `|S_t ∩ PC|`
    pub n1: usize,
    /// `|S_t \ PC|`
    pub n2: usize,
    pub scaled_energy: i64,
    /// The move that produced `S_t` (`Stay` at `t = 0`).
    pub mv: Move,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminal {
    /// Gradient descent found no strictly improving neighbor.
    pub absorbed: bool,
    /// Final state equals the planted clique (for the Gibbs chain: and stayed
    /// there for the whole hold window).
    pub reached_pc: bool,
    /// Number of transitions executed.
    pub steps: usize,
    /// Step at which the chain entered the planted clique for the final time,
    /// if it ended there.
    pub pc_entry: Option<usize>,
    pub final_size: usize,
    pub final_n1: usize,
    pub final_n2: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub terminal: Terminal,
    pub final_set: Vec<usize>,
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,n1,n2,scaled_energy,move_kind,move_vertex";

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
        for r in &self.records {
            let v = r.mv.vertex().map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.t,
                r.n1,
                r.n2,
                r.scaled_energy,
                r.mv.kind_str(),
                v
            )?;
        }
        Ok(())
    }

    /// Overlap coordinates `(|S ∩ PC| / k, |S \ PC| / (n - k))` of every record.
    pub fn overlap_path(&self, n: usize, k: usize) -> Vec<(f64, f64)> {
        let out = (n - k).max(1) as f64;
        self.records
            .iter()
            .map(|r| (r.n1 as f64 / k.max(1) as f64, r.n2 as f64 / out))
            .collect()
    }

    /// First step whose set meets the reference set.
    pub fn first_intersection(&self) -> Option<usize> {
        self.records.iter().find(|r| r.n1 > 0).map(|r| r.t)
    }
}
