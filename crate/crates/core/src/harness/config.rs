//! Scenario resolution from a JSON config file and command-line flags.
//!
//! Precedence, highest first: explicit flag, config file, built-in default.
//! `n`, `m`, `gamma_r` and `gamma_e` have no default and must come from one of
//! the first two.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::channel::{NoiseMode, ScenarioConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{SamplingMode, DEFAULT_SEED, DEFAULT_TRIALS};
use crate::protocol::{ProtocolChoice, ProtocolKind, TauPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Exact,
    InterferenceLimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    #[value(alias = "optimal-maxmin", alias = "protocol1")]
    Optimal,
    #[value(alias = "random-uniform", alias = "protocol2")]
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TauPolicyArg {
    Protocol1Formula,
    Theorem2Max,
    Theorem2Min,
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    Shared,
    IndependentLegs,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Candidate relays
    #[arg(long)]
    pub n: Option<usize>,
    /// Eavesdroppers
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub gamma_r: Option<f64>,
    #[arg(long)]
    pub gamma_e: Option<f64>,
    #[arg(long)]
    pub eps_s: Option<f64>,
    #[arg(long)]
    pub eps_t: Option<f64>,
    #[arg(long)]
    pub es: Option<f64>,
    #[arg(long)]
    pub n0: Option<f64>,
    #[arg(long, value_enum)]
    pub noise_mode: Option<NoiseArg>,
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    #[arg(long, value_enum)]
    pub tau_policy: Option<TauPolicyArg>,
    /// Jamming threshold for `--tau-policy manual`
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub coherence_len: Option<usize>,
    /// How hops share channel draws
    #[arg(long, value_enum)]
    pub sampling: Option<SamplingArg>,
    /// Parallel trial chunks; results do not depend on it
    #[arg(long)]
    pub workers: Option<usize>,
    /// Flat JSON object with scenario and protocol fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (JSON is overwritten, CSV is appended)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Contents of a `--config` file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub gamma_r: Option<f64>,
    pub gamma_e: Option<f64>,
    pub eps_s: Option<f64>,
    pub eps_t: Option<f64>,
    pub es: Option<f64>,
    pub n0: Option<f64>,
    pub noise_mode: Option<NoiseMode>,
    pub coherence_len: Option<usize>,
    pub protocol: Option<ProtocolKind>,
    pub tau_policy: Option<String>,
    pub tau: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub sampling: Option<SamplingMode>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::config(format!("bad config file {}: {e}", path.display())))
    }
}

/// Fully resolved run settings, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub config: ScenarioConfig,
    pub protocol: ProtocolChoice,
    pub trials: u64,
    pub seed: u64,
    pub sampling: SamplingMode,
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file)
        .ok_or_else(|| Error::config(format!("--{name} is required (flag or config file)")))
}

impl CommonArgs {
    pub fn file(&self) -> Result<ConfigFile> {
        match &self.config {
            Some(path) => ConfigFile::load(path),
            None => Ok(ConfigFile::default()),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(rayon::current_num_threads)
            .max(1)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let file = self.file()?;
        let defaults = ScenarioConfig::default();
        let config = ScenarioConfig {
            n: required(self.n, file.n, "n")?,
            m: required(self.m, file.m, "m")?,
            gamma_r: required(self.gamma_r, file.gamma_r, "gamma-r")?,
            gamma_e: required(self.gamma_e, file.gamma_e, "gamma-e")?,
            es: self.es.or(file.es).unwrap_or(defaults.es),
            n0: self.n0.or(file.n0).unwrap_or(defaults.n0),
            noise_mode: self
                .noise_mode
                .map(|a| match a {
                    NoiseArg::Exact => NoiseMode::Exact,
                    NoiseArg::InterferenceLimited => NoiseMode::InterferenceLimited,
                })
                .or(file.noise_mode)
                .unwrap_or(defaults.noise_mode),
            coherence_len: self
                .coherence_len
                .or(file.coherence_len)
                .unwrap_or(defaults.coherence_len),
            eps_s: self.eps_s.or(file.eps_s).unwrap_or(defaults.eps_s),
            eps_t: self.eps_t.or(file.eps_t).unwrap_or(defaults.eps_t),
        };
        config.validate()?;

        let kind = self
            .protocol
            .map(|p| match p {
                ProtocolArg::Optimal => ProtocolKind::OptimalMaxmin,
                ProtocolArg::Random => ProtocolKind::RandomUniform,
            })
            .or(file.protocol)
            .unwrap_or(ProtocolKind::RandomUniform);
        let policy_name = match self.tau_policy {
            Some(TauPolicyArg::Protocol1Formula) => "protocol1-formula".to_string(),
            Some(TauPolicyArg::Theorem2Max) => "theorem2-max".to_string(),
            Some(TauPolicyArg::Theorem2Min) => "theorem2-min".to_string(),
            Some(TauPolicyArg::Manual) => "manual".to_string(),
            None => file
                .tau_policy
                .clone()
                .unwrap_or_else(|| match (self.tau, file.tau) {
                    // a bare tau means a manual threshold
                    (Some(_), _) | (_, Some(_)) => "manual".to_string(),
                    _ => "theorem2-max".to_string(),
                }),
        };
        let tau_policy = TauPolicy::from_parts(&policy_name, self.tau.or(file.tau))?;
        let protocol = ProtocolChoice::new(kind, tau_policy);
        protocol.validate()?;

        let trials = self.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
        if trials < 1 {
            return Err(Error::config("--trials must be at least 1"));
        }
        let sampling = self
            .sampling
            .map(|s| match s {
                SamplingArg::Shared => SamplingMode::Shared,
                SamplingArg::IndependentLegs => SamplingMode::IndependentLegs,
            })
            .or(file.sampling)
            .unwrap_or_default();
        Ok(Resolved {
            config,
            protocol,
            trials,
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            sampling,
        })
    }
}
