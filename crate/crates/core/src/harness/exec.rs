use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{ExperimentConfig, LandscapeMode, Model, Verb};
use super::summary::{aggregate, RunSummary, SeedRow};
use crate::chains::{outside_at_most, run_chain, run_coupled_gd, run_on_graph, run_peel, ChainKind, Trajectory};
use crate::energy::GammaParam;
use crate::error::Result;
use crate::graph_gen::io::{write_binary, write_edge_list, GraphHeader};
use crate::graph_gen::{gen_contaminated, gen_er, gen_planted, Graph, PlantedInstance, VPolicy};
use crate::landscape::{binary_entropy, brute_force_min, enumerate_local_minima, write_scan_csv, SamplingPlan};
use crate::rng::Seed;

/// Whether cells run on the rayon pool or one after another. Both produce
/// the same output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

/// A file to be written under the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Artifact {
            name: name.into(),
            bytes,
        }
    }
}

/// Everything a verb produces, held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: Option<RunSummary>,
    pub artifacts: Vec<Artifact>,
}

pub const SUMMARY_FILE: &str = "summary.json";

impl Report {
    /// Writes every artifact (and `summary.json`) under `dir`, returning the
    /// paths in write order.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, bytes)?;
            paths.push(path);
            Ok(())
        };
        std::fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            put(&a.name, &a.bytes)?;
        }
        if let Some(s) = &self.summary {
            put(SUMMARY_FILE, &summary_json(s))?;
        }
        Ok(paths)
    }
}

fn summary_json(s: &RunSummary) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(s).expect("summary is plain data");
    out.push(b'\n');
    out
}

/// Validates `cfg` for `verb` and runs it.
pub fn execute(cfg: &ExperimentConfig, verb: Verb, exec: Execution) -> Result<Report> {
    cfg.validate(verb)?;
    cfg.chain_problems()?;
    match verb {
        Verb::Generate => generate(cfg, exec),
        Verb::Run => run(cfg, exec),
        Verb::Peel => peel(cfg, exec),
        Verb::Coupled => coupled(cfg, exec),
        Verb::Landscape => landscape(cfg, exec),
        Verb::Sweep => sweep(cfg, exec),
    }
}

fn par_map<I: Sync, T: Send>(
    items: &[I],
    exec: Execution,
    f: impl Fn(&I) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    match exec {
        Execution::Parallel => items.par_iter().map(f).collect(),
        Execution::Serial => items.iter().map(f).collect(),
    }
}

enum Instance {
    Null(Graph),
    Planted(PlantedInstance),
}

impl Instance {
    fn graph(&self) -> &Graph {
        match self {
            Instance::Null(g) => g,
            Instance::Planted(p) => p.graph(),
        }
    }

    fn pc(&self) -> &[usize] {
        match self {
            Instance::Null(_) => &[],
            Instance::Planted(p) => p.pc(),
        }
    }

    fn planted(&self) -> &PlantedInstance {
        match self {
            Instance::Planted(p) => p,
            Instance::Null(_) => unreachable!("validated: verb needs a planted model"),
        }
    }
}

fn make_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let seed = Seed(seed);
    Ok(match cfg.model {
        Model::Er => Instance::Null(gen_er(cfg.n, seed)?),
        Model::Planted => Instance::Planted(gen_planted(cfg.n, cfg.k, seed)?),
        Model::Contaminated => {
            let policy = cfg.v_set.clone().map_or(VPolicy::Random, VPolicy::Explicit);
            Instance::Planted(gen_contaminated(cfg.n, cfg.k, cfg.m, cfg.q, &policy, seed)?)
        }
    })
}

/// The shared instance when `graph_seed` is set.
fn shared_instance(cfg: &ExperimentConfig) -> Result<Option<Instance>> {
    cfg.graph_seed.map(|s| make_instance(cfg, s)).transpose()
}

fn with_instance<T>(
    cfg: &ExperimentConfig,
    shared: &Option<Instance>,
    seed: u64,
    f: impl FnOnce(&Instance) -> Result<T>,
) -> Result<T> {
    match shared {
        Some(inst) => f(inst),
        None => f(&make_instance(cfg, seed)?),
    }
}

fn gamma_tag(g: GammaParam) -> String {
    format!("g{}-{}", g.numer(), g.denom())
}

fn cell_tag(g: GammaParam, kind: ChainKind) -> String {
    match kind {
        ChainKind::Gd(_) => gamma_tag(g),
        ChainKind::Gibbs { beta } => format!("{}_b{beta}", gamma_tag(g)),
    }
}

fn beta_of(kind: ChainKind) -> Option<f64> {
    match kind {
        ChainKind::Gd(_) => None,
        ChainKind::Gibbs { beta } => Some(beta),
    }
}

fn csv_bytes(t: &Trajectory) -> Vec<u8> {
    let mut out = Vec::new();
    t.write_csv(&mut out).expect("writing to memory");
    out
}

fn summary(verb: Verb, cfg: &ExperimentConfig, rows: Vec<SeedRow>) -> RunSummary {
    RunSummary {
        verb: verb.name().into(),
        config: cfg.clone(),
        aggregates: aggregate(&rows, cfg.k),
        rows,
    }
}

fn seed_grid<T: Clone, S: Copy>(cells: &[T], seeds: &[S]) -> Vec<(T, S)> {
    cells
        .iter()
        .flat_map(|c| seeds.iter().map(move |&s| (c.clone(), s)))
        .collect()
}

fn generate(cfg: &ExperimentConfig, exec: Execution) -> Result<Report> {
    let seeds = match cfg.graph_seed {
        Some(s) => vec![s],
        None => cfg.seeds.seeds(),
    };
    let outputs = par_map(&seeds, exec, |&seed| {
        let inst = make_instance(cfg, seed)?;
        let header = match &inst {
            Instance::Null(g) => GraphHeader::for_er(g, Some(Seed(seed))),
            Instance::Planted(p) => GraphHeader::for_instance(p),
        };
        let (mut bin, mut edges) = (Vec::new(), Vec::new());
        write_binary(&mut bin, &header, inst.graph())?;
        write_edge_list(&mut edges, inst.graph())?;
        let line = format!(
            "{seed},{},{},{}\n",
            inst.graph().n(),
            inst.pc().len(),
            inst.graph().edge_count()
        );
        Ok((seed, bin, edges, line))
    })?;
    let mut index = String::from("seed,n,k,edges\n");
    let mut artifacts = Vec::new();
    for (seed, bin, edges, line) in outputs {
        artifacts.push(Artifact::new(format!("graph_s{seed}.bin"), bin));
        artifacts.push(Artifact::new(format!("graph_s{seed}.edges"), edges));
        index.push_str(&line);
    }
    artifacts.push(Artifact::new("graphs.csv", index.into_bytes()));
    Ok(Report {
        summary: None,
        artifacts,
    })
}

fn run(cfg: &ExperimentConfig, exec: Execution) -> Result<Report> {
    let shared = shared_instance(cfg)?;
    let grid = seed_grid(&cfg.chain_cells(), &cfg.seeds.seeds());
    let outputs = par_map(&grid, exec, |(chain, seed)| {
        let traj = with_instance(cfg, &shared, *seed, |inst| match inst {
            Instance::Planted(p) => run_chain(p, chain, Seed(*seed)),
            Instance::Null(g) => run_on_graph(g, &[], chain, Seed(*seed)),
        })?;
        let name = format!("traj_{}_s{seed}.csv", cell_tag(chain.gamma, chain.kind));
        let mut row = SeedRow::from_terminal(
            *seed,
            chain.gamma.to_string(),
            beta_of(chain.kind),
            &traj.terminal,
            name.clone(),
        );
        row.tau = traj.first_intersection();
        Ok((row, Artifact::new(name, csv_bytes(&traj))))
    })?;
    let (rows, artifacts) = outputs.into_iter().unzip();
    Ok(Report {
        summary: Some(summary(Verb::Run, cfg, rows)),
        artifacts,
    })
}

fn peel(cfg: &ExperimentConfig, exec: Execution) -> Result<Report> {
    let shared = shared_instance(cfg)?;
    let grid = seed_grid(&cfg.gamma, &cfg.seeds.seeds());
    let threshold = cfg.peel_threshold.unwrap_or(0);
    let outputs = par_map(&grid, exec, |&(gamma, seed)| {
        let (traj, diag) = with_instance(cfg, &shared, seed, |inst| {
            let p = inst.planted();
            Ok(run_peel(p, gamma, outside_at_most(p, threshold), cfg.c1, Seed(seed)))
        })?;
        let name = format!("peel_{}_s{seed}.csv", gamma_tag(gamma));
        let mut row = SeedRow::from_terminal(seed, gamma.to_string(), None, &traj.terminal, name.clone());
        row.tau = traj.first_intersection();
        row.a_c1 = diag.retained.as_ref().map(Vec::len);
        Ok((row, Artifact::new(name, csv_bytes(&traj))))
    })?;
    let (rows, artifacts) = outputs.into_iter().unzip();
    Ok(Report {
        summary: Some(summary(Verb::Peel, cfg, rows)),
        artifacts,
    })
}

fn coupled(cfg: &ExperimentConfig, exec: Execution) -> Result<Report> {
    let grid = seed_grid(&cfg.gamma, &cfg.seeds.seeds());
    let outputs = par_map(&grid, exec, |&(gamma, seed)| {
        let run = run_coupled_gd(
            cfg.n,
            cfg.k,
            gamma,
            cfg.tie,
            cfg.init_value(),
            cfg.max_steps_or_default(),
            Seed(seed),
        )?;
        let tag = gamma_tag(gamma);
        let planted = format!("planted_{tag}_s{seed}.csv");
        let null = format!("null_{tag}_s{seed}.csv");
        let mut row = SeedRow::from_terminal(seed, gamma.to_string(), None, &run.planted.terminal, planted.clone());
        row.tau = run.tau;
        row.first_divergence = run.first_divergence;
        Ok((
            row,
            [
                Artifact::new(planted, csv_bytes(&run.planted)),
                Artifact::new(null, csv_bytes(&run.null)),
            ],
        ))
    })?;
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    for (row, files) in outputs {
        rows.push(row);
        artifacts.extend(files);
    }
    Ok(Report {
        summary: Some(summary(Verb::Coupled, cfg, rows)),
        artifacts,
    })
}

fn landscape(cfg: &ExperimentConfig, exec: Execution) -> Result<Report> {
    let mode = cfg.landscape_mode.expect("validated");
    let artifacts = match mode {
        LandscapeMode::Kappa => {
            let mut csv = String::from("gamma,kappa,kappa_decimal,h_kappa\n");
            for &g in &cfg.gamma {
                let kappa = g.kappa();
                let x = *kappa.numer() as f64 / *kappa.denom() as f64;
                writeln!(
                    csv,
                    "{g},{}/{},{x},{}",
                    kappa.numer(),
                    kappa.denom(),
                    binary_entropy(x)?
                )
                .unwrap();
            }
            vec![Artifact::new("kappa.csv", csv.into_bytes())]
        }
        LandscapeMode::Bruteforce => {
            let shared = shared_instance(cfg)?;
            let grid = seed_grid(&cfg.gamma, &cfg.seeds.seeds());
            let rows = par_map(&grid, exec, |&(gamma, seed)| {
                with_instance(cfg, &shared, seed, |inst| {
                    let min = brute_force_min(inst.graph(), gamma)?;
                    let unique = match inst {
                        Instance::Planted(p) => Some(min.is_unique(p.pc())),
                        Instance::Null(_) => None,
                    };
                    let size = min.argmin.first().map_or(0, Vec::len);
                    Ok((gamma, seed, min.min_scaled_energy, min.argmin.len(), size, unique))
                })
            })?;
            let mut per_seed = String::from("gamma,seed,min_scaled_energy,minimizers,minimizer_size,pc_unique\n");
            for (g, s, e, count, size, unique) in &rows {
                let u = unique.map(|b| b.to_string()).unwrap_or_default();
                writeln!(per_seed, "{g},{s},{e},{count},{size},{u}").unwrap();
            }
            let mut freq = String::from("gamma,seeds,pc_unique,pc_unique_rate\n");
            for &g in &cfg.gamma {
                let cell: Vec<_> = rows.iter().filter(|r| r.0 == g).collect();
                let hits = cell.iter().filter(|r| r.5 == Some(true)).count();
                writeln!(freq, "{g},{},{hits},{}", cell.len(), hits as f64 / cell.len() as f64).unwrap();
            }
            vec![
                Artifact::new("bruteforce.csv", per_seed.into_bytes()),
                Artifact::new("bruteforce_freq.csv", freq.into_bytes()),
            ]
        }
        LandscapeMode::Mscan => {
            let seed = cfg.graph_seed.unwrap_or_else(|| cfg.seeds.seeds()[0]);
            let inst = make_instance(cfg, seed)?;
            let (lo, hi) = (cfg.m_min.expect("validated"), cfg.m_max.expect("validated"));
            let ms: Vec<usize> = (lo..=hi).collect();
            let grid = seed_grid(&cfg.gamma, &ms);
            let sampling = cfg.samples.map(|samples| SamplingPlan {
                samples,
                seed: Seed(seed),
            });
            let rows = par_map(&grid, exec, |&(gamma, m)| {
                let found = enumerate_local_minima(inst.graph(), m, inst.pc(), gamma, cfg.budget as u128, sampling)?;
                Ok(found.estimate)
            })?;
            let mut csv = Vec::new();
            write_scan_csv(&mut csv, &rows)?;
            vec![Artifact::new("mscan.csv", csv)]
        }
    };
    Ok(Report {
        summary: None,
        artifacts,
    })
}

pub const SWEEP_CSV_HEADER: &str = "param,value,gamma,beta,runs,success_rate,median_steps_to_pc,median_absorption_time,median_terminal_size,median_terminal_overlap";

fn sweep(cfg: &ExperimentConfig, exec: Execution) -> Result<Report> {
    let param = cfg.sweep_param.clone().expect("validated");
    let mut csv = format!("{SWEEP_CSV_HEADER}\n");
    let mut artifacts = Vec::new();
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for value in &cfg.sweep_values {
        let mut sub = cfg.clone();
        sub.sweep_param = None;
        sub.sweep_values.clear();
        sub.set(&param, value)?;
        let report = execute(&sub, Verb::Run, exec)?;
        let s = report.summary.expect("run always summarizes");
        for a in &s.aggregates {
            writeln!(
                csv,
                "{param},{value},{},{},{},{},{},{},{},{}",
                a.gamma,
                opt(a.beta),
                a.runs,
                a.success_rate,
                opt(a.median_steps_to_pc),
                opt(a.median_absorption_time),
                opt(a.median_terminal_size),
                opt(a.median_terminal_overlap)
            )
            .unwrap();
        }
        let dir = format!("{param}={value}");
        artifacts.extend(
            report
                .artifacts
                .into_iter()
                .map(|a| Artifact::new(format!("{dir}/{}", a.name), a.bytes)),
        );
        artifacts.push(Artifact::new(format!("{dir}/{SUMMARY_FILE}"), summary_json(&s)));
    }
    artifacts.push(Artifact::new("sweep.csv", csv.into_bytes()));
    Ok(Report {
        summary: None,
        artifacts,
    })
}

/// Output directory: explicit choice, then the config, then
/// `$PCLIQUE_OUT_DIR`, then `pclique-out`.
pub fn resolve_out_dir(explicit: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(super::config::OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(super::config::DEFAULT_OUT_DIR))
}
