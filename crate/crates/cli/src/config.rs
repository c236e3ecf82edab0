//! Experiment configuration: a flat TOML file of key–value pairs.
//!
//! ```toml
//! distribution = "pareto:4"        # or "explicit:2=0.5;3=0.5"
//! n_grid = [1000, 10000]
//! replicates = 200
//! master_seed = 1
//! mode = "process"                 # process | realized | both
//! suite = "fpp"                    # fpp | tree | limits | validate-all
//! out_dir = "out"
//! bfs = false                      # graph distances (realized mode only)
//! timing = false                   # fill the `ms` column
//! profile = "full"                 # full | quick (validation sizes)
//! criteria = [1, 2, 3]             # validation selection; empty = all
//! tree_length = 100                # steps of the tree-flow experiment
//! population_cap = 100000          # branching-process cap for limit laws
//! ```
//!
//! Every key is optional. `n_grid` is sorted and deduplicated on load.

use std::path::{Path, PathBuf};

use fppcm_core::limit_laws::MIN_POPULATION_CAP;
use fppcm_core::DegreeDistribution;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("replicates must be at least 1")]
    NoReplicates,
    #[error("n_grid is empty")]
    EmptyGrid,
    #[error("grid size {0} is below 2")]
    GridTooSmall(u64),
    #[error("invalid distribution {spec:?}: {reason}")]
    Distribution { spec: String, reason: String },
    #[error("unknown criterion {0}; criteria are numbered 1 to 12")]
    UnknownCriterion(u8),
    #[error("tree_length must be at least 1")]
    EmptyTree,
    #[error("population_cap must be at least {MIN_POPULATION_CAP}")]
    PopulationCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Process,
    Realized,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Fpp,
    Tree,
    Limits,
    ValidateAll,
}

/// Sample sizes of the validation suite. `Full` uses the pre-registered
/// sizes; `Quick` shrinks every experiment for smoke tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Full,
    Quick,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    distribution: String,
    n_grid: Vec<u64>,
    replicates: u64,
    master_seed: u64,
    mode: Mode,
    suite: Suite,
    out_dir: PathBuf,
    bfs: bool,
    timing: bool,
    profile: Profile,
    criteria: Vec<u8>,
    tree_length: usize,
    population_cap: u64,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            distribution: "pareto:4".into(),
            n_grid: vec![1000],
            replicates: 100,
            master_seed: 1,
            mode: Mode::Process,
            suite: Suite::Fpp,
            out_dir: PathBuf::from("out"),
            bfs: false,
            timing: false,
            profile: Profile::Full,
            criteria: Vec::new(),
            tree_length: 100,
            population_cap: fppcm_core::limit_laws::DEFAULT_POPULATION_CAP,
        }
    }
}

/// A validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dist: DegreeDistribution,
    pub n_grid: Vec<u64>,
    pub replicates: u64,
    pub master_seed: u64,
    pub mode: Mode,
    pub suite: Suite,
    pub out_dir: PathBuf,
    pub bfs: bool,
    pub timing: bool,
    pub profile: Profile,
    /// Selected criteria, sorted; all twelve when the file lists none.
    pub criteria: Vec<u8>,
    pub tree_length: usize,
    pub population_cap: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_raw(RawConfig::default()).expect("defaults are valid")
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::from_raw(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml_str(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        if raw.replicates == 0 {
            return Err(ConfigError::NoReplicates);
        }
        let mut n_grid = raw.n_grid;
        if n_grid.is_empty() {
            return Err(ConfigError::EmptyGrid);
        }
        n_grid.sort_unstable();
        n_grid.dedup();
        if n_grid[0] < 2 {
            return Err(ConfigError::GridTooSmall(n_grid[0]));
        }
        let mut criteria = raw.criteria;
        if let Some(&bad) = criteria.iter().find(|&&c| !(1..=12).contains(&c)) {
            return Err(ConfigError::UnknownCriterion(bad));
        }
        if criteria.is_empty() {
            criteria = (1..=12).collect();
        }
        criteria.sort_unstable();
        criteria.dedup();
        if raw.tree_length == 0 {
            return Err(ConfigError::EmptyTree);
        }
        if raw.population_cap < MIN_POPULATION_CAP {
            return Err(ConfigError::PopulationCap);
        }
        Ok(Self {
            dist: parse_distribution(&raw.distribution)?,
            n_grid,
            replicates: raw.replicates,
            master_seed: raw.master_seed,
            mode: raw.mode,
            suite: raw.suite,
            out_dir: raw.out_dir,
            bfs: raw.bfs,
            timing: raw.timing,
            profile: raw.profile,
            criteria,
            tree_length: raw.tree_length,
            population_cap: raw.population_cap,
        })
    }
}

/// Parses `pareto:TAU` or `explicit:K=P;K=P;…`. A trailing `#suffix` (as
/// written in the `dist` column for runs in both modes) is ignored.
pub fn parse_distribution(spec: &str) -> Result<DegreeDistribution, ConfigError> {
    let bad = |reason: String| ConfigError::Distribution { spec: spec.into(), reason };
    let body = spec.split('#').next().unwrap_or_default().trim();
    let (kind, args) = body.split_once(':').ok_or_else(|| bad("expected KIND:ARGS".into()))?;
    match kind.trim() {
        "pareto" => {
            let tau: f64 = args.trim().parse().map_err(|e| bad(format!("{e}")))?;
            DegreeDistribution::pareto(tau).map_err(|e| bad(e.to_string()))
        }
        "explicit" => {
            let mut pmf = Vec::new();
            for part in args.split(';').filter(|p| !p.trim().is_empty()) {
                let (k, p) = part.split_once('=').ok_or_else(|| bad(format!("expected K=P, got {part:?}")))?;
                let k: u64 = k.trim().parse().map_err(|e| bad(format!("{e}")))?;
                let p: f64 = p.trim().parse().map_err(|e| bad(format!("{e}")))?;
                pmf.push((k, p));
            }
            DegreeDistribution::explicit(pmf).map_err(|e| bad(e.to_string()))
        }
        other => Err(bad(format!("unknown kind {other:?}"))),
    }
}
