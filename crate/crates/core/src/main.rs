use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use pclique::chains::TiePolicy;
use pclique::harness::{
    execute, preset, resolve_out_dir, ChainName, Execution, ExperimentConfig, InitName, LandscapeMode, Model, SeedSpec,
    Verb, OUT_DIR_ENV, PRESETS,
};
use pclique::{Error, GammaParam};

#[derive(Parser)]
#[command(name = "pclique", version, about = "Planted-clique dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    verb: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write graphs (binary and edge list) for each seed.
    Generate(Opts),
    /// Run gradient descent or the Gibbs chain on every (gamma, beta, seed) cell.
    Run(Opts),
    /// Min-degree peeling from the full vertex set.
    Peel(Opts),
    /// Descent on G and on G0 (G without the clique) with shared randomness.
    Coupled(Opts),
    /// Brute-force minima, local-minimum counts or the kappa table.
    Landscape(Opts),
    /// Repeat `run` over the values of one parameter.
    Sweep(Opts),
}

impl Command {
    fn split(self) -> (Verb, Opts) {
        match self {
            Command::Generate(o) => (Verb::Generate, o),
            Command::Run(o) => (Verb::Run, o),
            Command::Peel(o) => (Verb::Peel, o),
            Command::Coupled(o) => (Verb::Coupled, o),
            Command::Landscape(o) => (Verb::Landscape, o),
            Command::Sweep(o) => (Verb::Sweep, o),
        }
    }
}

/// Each flag overrides the field of the same name in the config file.
#[derive(Args)]
struct Opts {
    /// TOML config file.
    #[arg(long, short, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in config by name (see --list-presets).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    list_presets: bool,
    /// Output directory [default: config output_dir, then $PCLIQUE_OUT_DIR, then ./pclique-out].
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Run cells one at a time instead of on the thread pool.
    #[arg(long)]
    serial: bool,
    /// Validate and print the resolved config without running.
    #[arg(long)]
    dry_run: bool,

    #[arg(long, value_parser = parse_model)]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    v_set: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_chain)]
    chain: Option<ChainName>,
    /// Comma-separated, each `p/q` or an integer.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<GammaParam>>,
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// `halt` or `drift:<plateau moves>`.
    #[arg(long)]
    tie: Option<TiePolicy>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, value_parser = parse_init)]
    init: Option<InitName>,
    #[arg(long, value_delimiter = ',')]
    init_set: Option<Vec<usize>>,
    /// `a..b` or `s1,s2,...`.
    #[arg(long)]
    seeds: Option<SeedSpec>,
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long)]
    hold_window: Option<usize>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    peel_threshold: Option<usize>,
    #[arg(long, value_parser = parse_landscape)]
    landscape_mode: Option<LandscapeMode>,
    #[arg(long)]
    m_min: Option<usize>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    sweep_param: Option<String>,
    #[arg(long, value_delimiter = ',')]
    sweep_values: Option<Vec<String>>,
}

fn parse_enum<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_model(s: &str) -> Result<Model, String> {
    parse_enum(s)
}

fn parse_chain(s: &str) -> Result<ChainName, String> {
    parse_enum(s)
}

fn parse_init(s: &str) -> Result<InitName, String> {
    parse_enum(s)
}

fn parse_landscape(s: &str) -> Result<LandscapeMode, String> {
    parse_enum(s)
}

impl Opts {
    fn base(&self) -> anyhow::Result<ExperimentConfig> {
        Ok(match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => {
                let text = preset(name).ok_or_else(|| Error::Config(format!("preset: unknown preset `{name}`")))?;
                ExperimentConfig::from_toml(text)?
            }
            (None, None) => ExperimentConfig::default(),
        })
    }

    fn apply(self, c: &mut ExperimentConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f; } )* };
        }
        set!(
            model,
            n,
            k,
            m,
            q,
            chain,
            gamma,
            beta,
            tie,
            init,
            seeds,
            record_every,
            budget,
            sweep_values
        );
        set_opt!(
            v_set,
            max_steps,
            init_set,
            graph_seed,
            hold_window,
            c1,
            peel_threshold,
            landscape_mode,
            m_min,
            m_max,
            samples,
            sweep_param
        );
    }
}

fn main() -> ExitCode {
    let (verb, opts) = Cli::parse().verb.split();
    if opts.list_presets {
        for (name, verb, _) in PRESETS {
            println!("{name:<22} {}", verb.name());
        }
        return ExitCode::SUCCESS;
    }
    match run(verb, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let config_error = matches!(
                e.downcast_ref::<Error>(),
                Some(Error::Config(_) | Error::InvalidParam { .. })
            );
            if config_error {
                eprintln!("invalid config:\n{e:#}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        }
    }
}

fn run(verb: Verb, opts: Opts) -> anyhow::Result<()> {
    let mut cfg = opts.base()?;
    let (explicit_out, serial, dry_run) = (opts.out.clone(), opts.serial, opts.dry_run);
    opts.apply(&mut cfg);
    cfg.validate(verb)?;
    if dry_run {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let exec = if serial { Execution::Serial } else { Execution::Parallel };
    let report = execute(&cfg, verb, exec)?;
    let dir = resolve_out_dir(explicit_out.as_deref(), &cfg);
    let written = report
        .write_to(&dir)
        .with_context(|| format!("writing to {} (see ${OUT_DIR_ENV})", dir.display()))?;
    if let Some(s) = &report.summary {
        for a in &s.aggregates {
            let beta = a.beta.map(|b| format!(" beta={b}")).unwrap_or_default();
            let steps = a.median_steps_to_pc.map_or("-".into(), |x| x.to_string());
            println!(
                "gamma={}{beta}: {}/{} reached PC, median steps to PC {steps}, median terminal size {}",
                a.gamma,
                (a.success_rate * a.runs as f64).round(),
                a.runs,
                a.median_terminal_size.unwrap_or(0.0)
            );
        }
    }
    println!("wrote {} files to {}", written.len(), dir.display());
    Ok(())
}
