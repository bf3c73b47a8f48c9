use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chains::{ChainConfig, ChainKind, Init, TiePolicy};
use crate::energy::GammaParam;
use crate::error::{Error, Result};
use crate::landscape::BRUTE_FORCE_MAX_N;

pub const CONFIG_VERSION: u32 = 1;

/// Environment variable consulted for the output directory when neither the
/// command line nor the config names one.
pub const OUT_DIR_ENV: &str = "PCLIQUE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "pclique-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Er,
    #[default]
    Planted,
    Contaminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChainName {
    #[default]
    Gd,
    Gibbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    #[default]
    Full,
    Empty,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeMode {
    /// Exhaustive global minimum per seed (small `n` only).
    Bruteforce,
    /// Count of strict local minima for each size in `m_min..=m_max`.
    Mscan,
    /// `kappa` and `h(kappa)` for every listed gamma.
    Kappa,
}

/// Seeds as `a..b` (half-open) or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSpec {
    Range(u64, u64),
    List(Vec<u64>),
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::Range(a, b) => (*a..*b).collect(),
            SeedSpec::List(v) => v.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SeedSpec::Range(a, b) => a >= b,
            SeedSpec::List(v) => v.is_empty(),
        }
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Range(0, 1)
    }
}

impl fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSpec::Range(a, b) => write!(f, "{a}..{b}"),
            SeedSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for SeedSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("seeds", format!("expected `a..b` or `s1,s2,...`, got `{s}`"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once("..") {
            return Ok(SeedSpec::Range(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ));
        }
        if s.is_empty() {
            return Ok(SeedSpec::List(Vec::new()));
        }
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()
            .map(SeedSpec::List)
    }
}

/// Serde through `Display` / `FromStr`, for values that read best as a
/// single string in the config file.
mod as_string {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};
    use std::fmt::Display;
    use std::str::FromStr;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

fn half() -> f64 {
    0.5
}

fn one() -> usize {
    1
}

fn default_gamma() -> Vec<GammaParam> {
    vec![GammaParam::integer(4).expect("4 > 1")]
}

fn default_budget() -> u64 {
    100_000_000
}

/// One experiment: a random-graph model, a chain and a set of seeds.
///
/// Every combination of `gamma` (and `beta`, for the Gibbs chain) with every
/// seed is one cell. Each cell draws its graph from its own seed unless
/// `graph_seed` pins a single shared instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub model: Model,
    pub n: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default = "half")]
    pub q: f64,
    /// Contaminated set; drawn uniformly when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_set: Option<Vec<usize>>,
    #[serde(default)]
    pub chain: ChainName,
    #[serde(default = "default_gamma")]
    pub gamma: Vec<GammaParam>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<f64>,
    #[serde(default = "halt", with = "as_string")]
    pub tie: TiePolicy,
    /// Step cap per run; `10 * n` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub init: InitName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_set: Option<Vec<usize>>,
    #[serde(default, with = "as_string")]
    pub seeds: SeedSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hold_window: Option<usize>,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Peeling: slack constant of the retained-set test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    /// Peeling stops once at most this many non-planted vertices remain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peel_threshold: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landscape_mode: Option<LandscapeMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_min: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    /// Largest number of candidate subsets enumerated exactly.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Sample count for the fallback estimate when over budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Parameter varied by `sweep`, with its values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_param: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_values: Vec<String>,
}

fn halt() -> TiePolicy {
    TiePolicy::Halt
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            model: Model::default(),
            n: 0,
            k: 0,
            m: 0,
            q: half(),
            v_set: None,
            chain: ChainName::default(),
            gamma: default_gamma(),
            beta: Vec::new(),
            tie: TiePolicy::Halt,
            max_steps: None,
            init: InitName::default(),
            init_set: None,
            seeds: SeedSpec::default(),
            graph_seed: None,
            hold_window: None,
            record_every: 1,
            output_dir: None,
            c1: None,
            peel_threshold: None,
            landscape_mode: None,
            m_min: None,
            m_max: None,
            budget: default_budget(),
            samples: None,
            sweep_param: None,
            sweep_values: Vec::new(),
        }
    }
}

/// Parameters `sweep` can vary.
pub const SWEEP_PARAMS: &[&str] = &["n", "k", "m", "q", "max_steps", "hold_window", "record_every", "c1"];

/// Which operation a config is validated for; some fields only make sense
/// for some verbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Generate,
    Run,
    Peel,
    Coupled,
    Landscape,
    Sweep,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Generate => "generate",
            Verb::Run => "run",
            Verb::Peel => "peel",
            Verb::Coupled => "coupled",
            Verb::Landscape => "landscape",
            Verb::Sweep => "sweep",
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn max_steps_or_default(&self) -> usize {
        self.max_steps.unwrap_or(10 * self.n)
    }

    pub fn init_value(&self) -> Init {
        match self.init {
            InitName::Full => Init::Full,
            InitName::Empty => Init::Empty,
            InitName::Explicit => Init::Explicit(self.init_set.clone().unwrap_or_default()),
        }
    }

    /// One chain configuration per `(gamma, beta)` cell, in file order.
    pub fn chain_cells(&self) -> Vec<ChainConfig> {
        let kinds: Vec<ChainKind> = match self.chain {
            ChainName::Gd => vec![ChainKind::Gd(self.tie)],
            ChainName::Gibbs => self.beta.iter().map(|&beta| ChainKind::Gibbs { beta }).collect(),
        };
        let mut out = Vec::new();
        for &gamma in &self.gamma {
            for &kind in &kinds {
                let mut cfg = ChainConfig::new(self.init_value(), kind, gamma, self.max_steps_or_default());
                cfg.hold_window = self.hold_window;
                cfg.record_every = self.record_every;
                out.push(cfg);
            }
        }
        out
    }

    /// Sets one sweepable field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse `{value}`")))
        }
        match key {
            "n" => self.n = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "q" => self.q = parse(key, value)?,
            "max_steps" => self.max_steps = Some(parse(key, value)?),
            "hold_window" => self.hold_window = Some(parse(key, value)?),
            "record_every" => self.record_every = parse(key, value)?,
            "c1" => self.c1 = Some(parse(key, value)?),
            _ => {
                return Err(Error::param(
                    "sweep_param",
                    format!("`{key}` cannot be swept; choose one of {}", SWEEP_PARAMS.join(", ")),
                ))
            }
        }
        Ok(())
    }

    /// Checks every field for `verb` and reports all problems at once, one
    /// `field: message` per line.
    pub fn validate(&self, verb: Verb) -> Result<()> {
        let errs = self.problems(verb);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs.join("\n")))
        }
    }

    fn problems(&self, verb: Verb) -> Vec<String> {
        let mut errs = Vec::new();
        let mut bad = |field: &str, msg: String| errs.push(format!("{field}: {msg}"));
        let n = self.n;

        if self.version != CONFIG_VERSION {
            bad(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
            );
        }
        if n == 0 {
            bad("n", "must be at least 1".into());
        }
        match self.model {
            Model::Er => {
                if self.k != 0 {
                    bad("k", "must be 0 for the er model".into());
                }
            }
            Model::Planted | Model::Contaminated => {
                if self.k == 0 || self.k > n {
                    bad("k", format!("need 1 <= k <= n = {n}, got {}", self.k));
                }
            }
        }
        if self.model == Model::Contaminated {
            if !(0.5..1.0).contains(&self.q) {
                bad("q", format!("need 0.5 <= q < 1, got {}", self.q));
            }
            if self.k + self.m > n {
                bad("m", format!("need k + m <= n, got {} + {} > {n}", self.k, self.m));
            }
            if let Some(v) = &self.v_set {
                if v.len() != self.m {
                    bad("v_set", format!("has {} vertices but m = {}", v.len(), self.m));
                }
                if let Some(x) = v.iter().find(|&&x| x >= n) {
                    bad("v_set", format!("vertex {x} out of range for n = {n}"));
                }
                let mut s = v.clone();
                s.sort_unstable();
                s.dedup();
                if s.len() != v.len() {
                    bad("v_set", "contains duplicates".into());
                }
            }
        } else {
            if self.m != 0 {
                bad("m", "only used by the contaminated model".into());
            }
            if self.q != 0.5 {
                bad("q", "only used by the contaminated model".into());
            }
            if self.v_set.is_some() {
                bad("v_set", "only used by the contaminated model".into());
            }
        }

        if self.gamma.is_empty() {
            bad("gamma", "list at least one value".into());
        }
        match self.chain {
            ChainName::Gd => {
                if !self.beta.is_empty() {
                    bad("beta", "only used by the gibbs chain".into());
                }
            }
            ChainName::Gibbs => {
                if self.beta.is_empty() {
                    bad("beta", "the gibbs chain needs at least one value".into());
                }
                if let Some(b) = self.beta.iter().find(|b| !b.is_finite() || **b < 0.0) {
                    bad("beta", format!("must be finite and >= 0, got {b}"));
                }
            }
        }
        if self.max_steps == Some(0) {
            bad("max_steps", "must be at least 1".into());
        }
        if self.hold_window == Some(0) {
            bad("hold_window", "must be at least 1".into());
        }
        if self.record_every == 0 {
            bad("record_every", "must be at least 1".into());
        }
        match (self.init, &self.init_set) {
            (InitName::Explicit, None) => bad("init_set", "required when init = \"explicit\"".into()),
            (InitName::Explicit, Some(set)) => {
                if let Some(x) = set.iter().find(|&&x| x >= n) {
                    bad("init_set", format!("vertex {x} out of range for n = {n}"));
                }
            }
            (_, Some(_)) => bad("init_set", "only used when init = \"explicit\"".into()),
            _ => {}
        }
        if self.seeds.is_empty() {
            bad("seeds", "no seeds selected".into());
        }
        // TOML integers are signed 64-bit.
        if self.graph_seed.is_some_and(|s| s > i64::MAX as u64) {
            bad("graph_seed", format!("must be at most {}", i64::MAX));
        }
        if self.budget > i64::MAX as u64 {
            bad("budget", format!("must be at most {}", i64::MAX));
        }
        if let Some(c1) = self.c1 {
            if !c1.is_finite() {
                bad("c1", format!("must be finite, got {c1}"));
            }
        }

        match verb {
            Verb::Peel => {
                if self.model == Model::Er {
                    bad("model", "peel needs a planted clique".into());
                }
            }
            Verb::Coupled => {
                if self.model != Model::Planted {
                    bad("model", "coupled runs use the planted model".into());
                }
                if self.chain != ChainName::Gd {
                    bad("chain", "coupled runs use gradient descent".into());
                }
                if self.graph_seed.is_some() {
                    bad(
                        "graph_seed",
                        "coupled runs draw each graph pair from the run seed".into(),
                    );
                }
            }
            Verb::Landscape => match self.landscape_mode {
                None => bad("landscape_mode", "required: bruteforce, mscan or kappa".into()),
                Some(LandscapeMode::Bruteforce) => {
                    if n > BRUTE_FORCE_MAX_N {
                        bad("n", format!("brute force is limited to n <= {BRUTE_FORCE_MAX_N}"));
                    }
                }
                Some(LandscapeMode::Mscan) => match (self.m_min, self.m_max) {
                    (Some(lo), Some(hi)) if lo >= 1 && lo <= hi && hi <= n => {}
                    (Some(lo), Some(hi)) => bad("m_max", format!("need 1 <= m_min <= m_max <= n, got {lo}..={hi}")),
                    _ => bad("m_min", "mscan needs m_min and m_max".into()),
                },
                Some(LandscapeMode::Kappa) => {}
            },
            Verb::Sweep => match &self.sweep_param {
                None => bad("sweep_param", "required for sweep".into()),
                Some(p) if !SWEEP_PARAMS.contains(&p.as_str()) => bad(
                    "sweep_param",
                    format!("`{p}` cannot be swept; choose one of {}", SWEEP_PARAMS.join(", ")),
                ),
                Some(p) => {
                    if self.sweep_values.is_empty() {
                        bad("sweep_values", "list at least one value".into());
                    }
                    for v in &self.sweep_values {
                        let mut c = self.clone();
                        c.sweep_param = None;
                        c.sweep_values.clear();
                        match c.set(p, v) {
                            Err(e) => bad("sweep_values", e.to_string()),
                            Ok(()) => {
                                for e in c.problems(Verb::Run) {
                                    bad("sweep_values", format!("{p} = {v}: {e}"));
                                }
                            }
                        }
                    }
                }
            },
            Verb::Generate | Verb::Run => {}
        }
        errs
    }

    /// Chain-level checks that need the resolved chain configs.
    pub(crate) fn chain_problems(&self) -> Result<()> {
        for cfg in self.chain_cells() {
            cfg.validate(self.n).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted() -> ExperimentConfig {
        ExperimentConfig {
            n: 100,
            k: 10,
            ..Default::default()
        }
    }

    #[test]
    fn seed_spec_forms() {
        assert_eq!("0..40".parse::<SeedSpec>().unwrap().seeds().len(), 40);
        assert_eq!("3, 7,11".parse::<SeedSpec>().unwrap().seeds(), vec![3, 7, 11]);
        assert!("x..4".parse::<SeedSpec>().is_err());
        for s in ["0..40", "3,7,11"] {
            assert_eq!(s.parse::<SeedSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn toml_round_trip() {
        let mut c = planted();
        c.gamma = vec!["2".parse().unwrap(), "9/2".parse().unwrap()];
        c.tie = TiePolicy::drift(3).unwrap();
        c.seeds = SeedSpec::List(vec![1, 5]);
        c.c1 = Some(0.75);
        let text = c.to_toml().unwrap();
        assert!(text.contains("tie = \"drift:3\""));
        assert!(text.contains("gamma = [\"2/1\", \"9/2\"]"));
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("version = 1\nn = 5\nbogus = 3\n").is_err());
    }

    #[test]
    fn validation_lists_every_bad_field() {
        let c = ExperimentConfig {
            k: 500,
            record_every: 0,
            chain: ChainName::Gibbs,
            ..planted()
        };
        let msg = c.validate(Verb::Run).unwrap_err().to_string();
        for field in ["k:", "record_every:", "beta:"] {
            assert!(msg.contains(field), "{msg}");
        }
    }

    #[test]
    fn verb_specific_checks() {
        let c = ExperimentConfig {
            model: Model::Er,
            k: 0,
            ..planted()
        };
        assert!(c.validate(Verb::Run).is_ok());
        assert!(c.validate(Verb::Peel).is_err());
        assert!(planted().validate(Verb::Landscape).is_err());
        let c = ExperimentConfig {
            sweep_param: Some("n".into()),
            sweep_values: vec!["50".into(), "5".into()],
            ..planted()
        };
        let msg = c.validate(Verb::Sweep).unwrap_err().to_string();
        assert!(msg.contains("n = 5"), "{msg}");
    }

    #[test]
    fn cells_cross_gamma_and_beta() {
        let c = ExperimentConfig {
            chain: ChainName::Gibbs,
            gamma: vec![GammaParam::integer(2).unwrap(), GammaParam::integer(4).unwrap()],
            beta: vec![1.0, 2.0, 3.0],
            ..planted()
        };
        assert_eq!(c.chain_cells().len(), 6);
        assert_eq!(c.chain_cells()[0].max_steps, 1000);
    }
}
