//! Experiment configuration: one TOML file with flat dotted keys.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CmabError, Result};
use crate::oracles::FailureMode;

fn one() -> u32 {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: u64,
    #[serde(default = "one")]
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub policy: PolicySpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub seed: u64,
    #[serde(default = "GenerateSpec::low")]
    pub p_low: f64,
    #[serde(default = "GenerateSpec::high")]
    pub p_high: f64,
    /// PMC: probability that a left/right pair is an edge.
    pub density: Option<f64>,
    /// IC: number of directed edges; linear: number of super arms.
    pub count: Option<usize>,
    /// Linear: arms per super arm.
    pub size: Option<usize>,
    /// Linear: largest weight.
    pub max_weight: Option<f64>,
}

impl GenerateSpec {
    fn low() -> f64 {
        0.1
    }
    fn high() -> f64 {
        0.9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearArmSpec {
    pub members: Vec<usize>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    Classical {
        means: Vec<f64>,
    },
    Pmc {
        left: usize,
        right: usize,
        budget: usize,
        #[serde(default)]
        edges: Vec<(usize, usize, f64)>,
        generate: Option<GenerateSpec>,
    },
    Linear {
        #[serde(default)]
        means: Vec<f64>,
        #[serde(default)]
        super_arms: Vec<LinearArmSpec>,
        top_k: Option<usize>,
        arms: Option<usize>,
        generate: Option<GenerateSpec>,
    },
    Ic {
        nodes: usize,
        budget: usize,
        #[serde(default)]
        edges: Vec<(usize, usize, f64)>,
        exact_cap: Option<usize>,
        generate: Option<GenerateSpec>,
    },
    /// Instance table stored in a separate TOML file, relative to the config.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClusterSpec {
    Named(String),
    Explicit(Vec<Vec<usize>>),
}

fn exploration_default() -> f64 {
    3.0
}

fn c_default() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Cucb {
        /// Coefficient `y` of `y ln t` in the confidence radius.
        #[serde(default = "exploration_default")]
        exploration: f64,
        /// Use `2 ln t + ln ln t` instead.
        #[serde(default)]
        loglog: bool,
    },
    ClusteredCucb {
        clusters: ClusterSpec,
    },
    EpsGreedy {
        /// Computed from `c` and the gap profile when absent.
        gamma: Option<f64>,
        #[serde(default = "c_default")]
        c: f64,
    },
    Ucb1Improved {
        #[serde(default = "c_default")]
        c: f64,
    },
    Uniform,
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec::Cucb {
            exploration: exploration_default(),
            loglog: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Exact for classical and linear, greedy for PMC and IM.
    #[default]
    Auto,
    Exact,
    GreedyPmc,
    GreedyIm,
    Linear,
}

fn sims_default() -> u64 {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default)]
    pub kind: OracleKind,
    #[serde(default = "sims_default")]
    pub sims: u64,
    #[serde(default)]
    pub epsilon: f64,
    pub beta_override: Option<f64>,
    #[serde(default = "OracleSpec::mode_default")]
    pub failure_mode: FailureMode,
}

impl OracleSpec {
    fn mode_default() -> FailureMode {
        FailureMode::UniformRandom
    }
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            kind: OracleKind::Auto,
            sims: sims_default(),
            epsilon: 0.0,
            beta_override: None,
            failure_mode: Self::mode_default(),
        }
    }
}

fn mc_default() -> u64 {
    1_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Track bad-round counters and nice-run failures.
    #[serde(default)]
    pub diagnostics: bool,
    /// Bound evaluators to emit; empty selects the defaults for the instance.
    #[serde(default)]
    pub bounds: Vec<String>,
    /// Samples per super arm when expected rewards cannot be enumerated.
    #[serde(default = "mc_default")]
    pub mc_samples: u64,
    /// Skip the per-run trajectory files.
    #[serde(default)]
    pub aggregate_only: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            diagnostics: false,
            bounds: Vec::new(),
            mc_samples: mc_default(),
            aggregate_only: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| CmabError::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    /// Reads a config file; `instance.kind = "file"` paths are resolved
    /// against the config's directory and inlined.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut config = Self::from_toml(&text)?;
        config.resolve_files(path.parent().unwrap_or(Path::new(".")))?;
        Ok(config)
    }

    pub fn resolve_files(&mut self, base: &Path) -> Result<()> {
        if let InstanceSpec::File { path } = &self.instance {
            let full = base.join(path);
            let text = fs::read_to_string(&full).map_err(|e| CmabError::Io(format!("{}: {e}", full.display())))?;
            let spec: InstanceSpec = toml::from_str(&text).map_err(|e| CmabError::Config(e.to_string()))?;
            if matches!(spec, InstanceSpec::File { .. }) {
                return Err(CmabError::Config("instance files cannot nest".into()));
            }
            self.instance = spec;
        }
        Ok(())
    }

    pub fn check(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(CmabError::Config("horizon must be at least 1".into()));
        }
        if self.repetitions < 1 {
            return Err(CmabError::Config("repetitions must be at least 1".into()));
        }
        if self.options.mc_samples < 1 {
            return Err(CmabError::Config("options.mc_samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CmabError::Config(e.to_string()))
    }
}
