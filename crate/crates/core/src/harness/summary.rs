use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::chains::Terminal;

/// Terminal record of one (cell, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub seed: u64,
    pub gamma: String,
    pub beta: Option<f64>,
    pub absorbed: bool,
    pub reached_pc: bool,
    pub steps: usize,
    /// Step at which the run entered the planted clique for the last time.
    pub pc_entry: Option<usize>,
    /// First step at which the set met the planted clique.
    pub tau: Option<usize>,
    /// Coupled runs: first step where planted and null moves differ.
    pub first_divergence: Option<usize>,
    /// Peeling: planted vertices passing the retained-set test.
    pub a_c1: Option<usize>,
    pub final_size: usize,
    pub final_n1: usize,
    pub final_n2: usize,
    /// Name of the trajectory file, relative to the output directory.
    pub trajectory: String,
}

impl SeedRow {
    pub fn from_terminal(seed: u64, gamma: String, beta: Option<f64>, t: &Terminal, trajectory: String) -> Self {
        SeedRow {
            seed,
            gamma,
            beta,
            absorbed: t.absorbed,
            reached_pc: t.reached_pc,
            steps: t.steps,
            pc_entry: t.pc_entry,
            tau: None,
            first_divergence: None,
            a_c1: None,
            final_size: t.final_size,
            final_n1: t.final_n1,
            final_n2: t.final_n2,
            trajectory,
        }
    }
}

/// Aggregates over the seeds of one `(gamma, beta)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub gamma: String,
    pub beta: Option<f64>,
    pub runs: usize,
    pub success_rate: f64,
    /// Over successful runs only.
    pub median_steps_to_pc: Option<f64>,
    /// Over absorbed runs only.
    pub median_absorption_time: Option<f64>,
    pub median_terminal_size: Option<f64>,
    /// Median of `final_n1 / k`.
    pub median_terminal_overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub verb: String,
    pub config: ExperimentConfig,
    pub rows: Vec<SeedRow>,
    pub aggregates: Vec<CellAggregate>,
}

pub fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let h = xs.len() / 2;
    Some(if xs.len() % 2 == 1 {
        xs[h]
    } else {
        (xs[h - 1] + xs[h]) / 2.0
    })
}

/// Groups rows by cell in first-appearance order.
pub fn aggregate(rows: &[SeedRow], k: usize) -> Vec<CellAggregate> {
    let mut cells: Vec<(String, Option<f64>)> = Vec::new();
    for r in rows {
        let key = (r.gamma.clone(), r.beta);
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    cells
        .into_iter()
        .map(|(gamma, beta)| {
            let rs: Vec<&SeedRow> = rows.iter().filter(|r| r.gamma == gamma && r.beta == beta).collect();
            let ok = rs.iter().filter(|r| r.reached_pc).count();
            CellAggregate {
                runs: rs.len(),
                success_rate: ok as f64 / rs.len() as f64,
                median_steps_to_pc: median(
                    rs.iter()
                        .filter(|r| r.reached_pc)
                        .filter_map(|r| r.pc_entry)
                        .map(|t| t as f64)
                        .collect(),
                ),
                median_absorption_time: median(rs.iter().filter(|r| r.absorbed).map(|r| r.steps as f64).collect()),
                median_terminal_size: median(rs.iter().map(|r| r.final_size as f64).collect()),
                median_terminal_overlap: median(rs.iter().map(|r| r.final_n1 as f64 / k.max(1) as f64).collect()),
                gamma,
                beta,
            }
        })
        .collect()
}
