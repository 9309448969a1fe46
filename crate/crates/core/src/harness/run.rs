//! Seeded repetitions of (environment x policy x oracle) and their outputs.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    classical_bound, classical_gaps, clustered_bound, compute_cluster_profile, compute_gap_profile, epsgreedy_bound,
    im_bound, im_independent_bound, linear_bound, linear_independent_bound, pmc_bound, pmc_independent_bound,
    theorem1_bound, theorem2_from_profile, ucb1_improved_bound, BoundReport, GapProfile, RegretLedger,
};
use crate::arm_model::{validate_instance, Environment, OracleQuality};
use crate::environments::{Instance, SpreadMode};
use crate::error::{CmabError, Result};
use crate::harness::build::{build_clusters, build_instance, build_oracle, build_policy, eps_gamma};
use crate::harness::config::{ExperimentConfig, PolicySpec};
use crate::harness::output::{
    checkpoints, fmt_num, mean_stderr, write_lines, AggregateRow, TrajectoryRecord, AGGREGATE_HEADER, TRAJECTORY_HEADER,
};
use crate::oracles::{Oracle, OracleDescriptor};
use crate::policies::{eps_greedy_gamma, nice_run_check, ClusterScheme, Diagnostics, Policy};
use crate::rng::{self, SimRng, RNG_ALGORITHM};

/// Expected reward of every super arm, indexed by id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardTable {
    pub exact: bool,
    pub rewards: Vec<f64>,
    /// Standard errors of Monte-Carlo estimates (empty when exact).
    pub std_errors: Vec<f64>,
    pub opt: f64,
    pub optimal_arm: usize,
}

impl RewardTable {
    fn from_profile(profile: &GapProfile) -> Self {
        let len = profile.super_arms.iter().map(|s| s.id + 1).max().unwrap_or(0);
        let mut rewards = vec![f64::NAN; len];
        for s in &profile.super_arms {
            rewards[s.id] = s.reward;
        }
        Self {
            exact: true,
            rewards,
            std_errors: Vec::new(),
            opt: profile.opt,
            optimal_arm: profile.optimal_arm,
        }
    }

    fn estimated(instance: &Instance, samples: u64, seed: u64) -> Result<Self> {
        let Instance::Ic(ic) = instance else {
            return Err(CmabError::Config(format!(
                "{} rewards are always enumerable",
                instance.kind()
            )));
        };
        let list = ic.space().explicit()?;
        let mut estimates: Vec<(usize, f64, f64)> = list
            .par_iter()
            .map(|s| {
                let mut r = rng::stream(seed ^ 0x5eed_e571_3a7e_0000, s.id as u64);
                let seeds = s.nodes().unwrap_or(&[]);
                let est = ic.spread(ic.true_means(), seeds, SpreadMode::MonteCarlo { samples }, &mut r)?;
                Ok((s.id, est.mean, est.std_error))
            })
            .collect::<Result<_>>()?;
        estimates.sort_by_key(|e| e.0);
        let len = estimates.last().map_or(0, |e| e.0 + 1);
        let mut rewards = vec![f64::NAN; len];
        let mut std_errors = vec![f64::NAN; len];
        let (mut optimal_arm, mut opt) = (estimates[0].0, estimates[0].1);
        for &(id, mean, se) in &estimates {
            rewards[id] = mean;
            std_errors[id] = se;
            if mean > opt {
                opt = mean;
                optimal_arm = id;
            }
        }
        Ok(Self {
            exact: false,
            rewards,
            std_errors,
            opt,
            optimal_arm,
        })
    }

    pub fn reward(&self, id: usize) -> Result<f64> {
        self.rewards
            .get(id)
            .copied()
            .filter(|r| !r.is_nan())
            .ok_or(CmabError::UnknownSuperArm(id))
    }
}

/// Everything a run needs, built once per experiment.
pub struct Prepared {
    pub config: ExperimentConfig,
    pub instance: Instance,
    pub oracle: Box<dyn Oracle>,
    pub descriptor: OracleDescriptor,
    pub profile: Option<GapProfile>,
    pub rewards: RewardTable,
    pub clusters: Option<ClusterScheme>,
    pub gamma: Option<f64>,
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.check()?;
    let instance = build_instance(&config.instance)?;
    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CmabError::Config(format!("invalid instance: {}", list.join("; "))));
    }
    let oracle = build_oracle(&config.oracle, &instance)?;
    let descriptor = oracle.descriptor();
    let profile = match compute_gap_profile(&instance, instance.true_means(), descriptor.alpha) {
        Ok(p) => Some(p),
        Err(CmabError::EnumerationCap { .. }) => None,
        Err(e) => return Err(e),
    };
    let rewards = match &profile {
        Some(p) => RewardTable::from_profile(p),
        None => RewardTable::estimated(&instance, config.options.mc_samples, config.seed)?,
    };
    let clusters = match &config.policy {
        PolicySpec::ClusteredCucb { clusters } => Some(build_clusters(clusters, &instance)?),
        _ => None,
    };
    let gamma = eps_gamma(&config.policy, &instance, profile.as_ref())?;
    Ok(Prepared {
        config: config.clone(),
        instance,
        oracle,
        descriptor,
        profile,
        rewards,
        clusters,
        gamma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub run_id: u32,
    pub final_cumulative_regret: f64,
    pub oracle_failures: u64,
    /// Cumulative regret at each checkpoint.
    pub checkpoints: Vec<(u64, f64)>,
    pub diagnostics: Option<Diagnostics>,
}

/// State of one repetition, advanced a round at a time.
pub struct RunState {
    run_id: u32,
    t: u64,
    rng: SimRng,
    policy: Box<dyn Policy>,
    ledger: RegretLedger,
    diagnostics: Option<Diagnostics>,
    oracle_failures: u64,
}

impl RunState {
    pub fn new(prep: &Prepared, run_id: u32) -> Result<Self> {
        let config = &prep.config;
        let diagnostics = match (&prep.profile, config.options.diagnostics) {
            (Some(_), true) => Some(Diagnostics::new(
                prep.instance.num_arms(),
                prep.clusters.as_ref().map_or(0, |c| c.len()),
            )),
            _ => None,
        };
        Ok(Self {
            run_id,
            t: 0,
            rng: rng::stream(config.seed, u64::from(run_id)),
            policy: build_policy(&config.policy, &prep.instance, prep.clusters.as_ref(), prep.gamma)?,
            ledger: RegretLedger::new(prep.descriptor.alpha, prep.descriptor.beta, prep.rewards.opt),
            diagnostics,
            oracle_failures: 0,
        })
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn ledger(&self) -> &RegretLedger {
        &self.ledger
    }

    pub fn policy(&self) -> &dyn Policy {
        self.policy.as_ref()
    }

    pub fn diagnostics(&self) -> Option<&Diagnostics> {
        self.diagnostics.as_ref()
    }

    /// Plays round `t + 1`: select, play, update, account.
    pub fn step(&mut self, prep: &Prepared) -> Result<TrajectoryRecord> {
        let instance = &prep.instance;
        let t = self.t + 1;
        if let Some(d) = self.diagnostics.as_mut() {
            d.record_nice(&nice_run_check(
                self.policy.estimates(),
                t,
                instance.true_means().values(),
            ));
        }
        let choice = self.policy.select(instance, prep.oracle.as_ref(), &mut self.rng)?;
        let feedback = instance.play(&choice.super_arm, t, &mut self.rng)?;
        self.policy.update(&feedback)?;
        self.t = t;
        let id = choice.super_arm.id;
        if let (Some(d), Some(profile)) = (self.diagnostics.as_mut(), &prep.profile) {
            d.record_play(id, profile, prep.clusters.as_ref());
        }
        let expected = prep.rewards.reward(id)?;
        let regret = self.ledger.update(expected);
        let failed = choice.quality == OracleQuality::Failed;
        self.oracle_failures += u64::from(failed);
        Ok(TrajectoryRecord {
            run_id: self.run_id,
            t,
            super_arm: id,
            realized_reward: feedback.reward,
            expected_reward: expected,
            regret,
            cumulative_regret: self.ledger.total(),
            oracle_failed: failed,
        })
    }
}

/// Plays one repetition, handing every round's record to `sink`.
pub fn simulate(
    prep: &Prepared,
    run_id: u32,
    mut sink: impl FnMut(&TrajectoryRecord) -> Result<()>,
) -> Result<RunSummary> {
    let mut state = RunState::new(prep, run_id)?;
    let marks = checkpoints(prep.config.horizon);
    let mut next_mark = 0;
    let mut points = Vec::with_capacity(marks.len());
    for _ in 0..prep.config.horizon {
        let record = state.step(prep)?;
        sink(&record)?;
        if marks.get(next_mark) == Some(&record.t) {
            points.push((record.t, record.cumulative_regret));
            next_mark += 1;
        }
    }
    Ok(RunSummary {
        run_id,
        final_cumulative_regret: state.ledger.total(),
        oracle_failures: state.oracle_failures,
        checkpoints: points,
        diagnostics: state.diagnostics,
    })
}

/// Runs every repetition in parallel; results come back in run order.
pub fn run_all(prep: &Prepared, trajectory_dir: Option<&Path>) -> Result<Vec<RunSummary>> {
    (0..prep.config.repetitions)
        .into_par_iter()
        .map(|run_id| match trajectory_dir {
            Some(dir) => {
                let mut lines = Vec::new();
                let summary = simulate(prep, run_id, |rec| {
                    lines.push(rec.csv_line());
                    Ok(())
                })?;
                write_lines(&trajectory_path(dir, run_id), TRAJECTORY_HEADER, lines)?;
                Ok(summary)
            }
            None => simulate(prep, run_id, |_| Ok(())),
        })
        .collect()
}

pub fn trajectory_path(dir: &Path, run_id: u32) -> PathBuf {
    dir.join(format!("run_{run_id:04}.csv"))
}

/// Mean and standard error of cumulative regret across runs at each checkpoint.
pub fn aggregate(label: &str, runs: &[RunSummary]) -> Vec<AggregateRow> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    first
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &(t, _))| {
            let values: Vec<f64> = runs.iter().map(|r| r.checkpoints[k].1).collect();
            let (mean, stderr) = mean_stderr(&values);
            AggregateRow {
                kind: "experiment".into(),
                label: label.to_string(),
                t,
                runs: runs.len() as u32,
                mean,
                stderr,
            }
        })
        .collect()
}

/// Bound evaluators that apply to the prepared experiment by default.
pub fn default_bounds(prep: &Prepared) -> Vec<String> {
    let mut names = vec!["theorem1".to_string(), "theorem2".to_string()];
    names.push(
        match prep.instance {
            Instance::Classical(_) => "classical",
            Instance::Pmc(_) => "pmc",
            Instance::Linear(_) => "linear",
            Instance::Ic(_) => "im",
        }
        .to_string(),
    );
    match prep.config.policy {
        PolicySpec::ClusteredCucb { .. } => names.push("clustered".into()),
        PolicySpec::EpsGreedy { .. } => names.push("epsgreedy".into()),
        PolicySpec::Ucb1Improved { .. } if matches!(prep.instance, Instance::Classical(_)) => {
            names.push("ucb1_improved".into())
        }
        _ => {}
    }
    names
}

fn inapplicable(name: &str, instance: &Instance) -> CmabError {
    CmabError::Config(format!("bound {name} does not apply to {} instances", instance.kind()))
}

/// Evaluates a named bound at horizon `n`.
pub fn evaluate_bound(prep: &Prepared, name: &str, n: f64) -> Result<BoundReport> {
    let profile = prep.profile.as_ref().ok_or_else(|| {
        CmabError::Config("bounds need exact expected rewards; the instance exceeds the enumeration cap".into())
    })?;
    let instance = &prep.instance;
    let f = instance.smoothness();
    let report = match name {
        "theorem1" => theorem1_bound(profile, &f, n)?,
        "theorem2" => theorem2_from_profile(profile, &f, n)?,
        "clustered" => {
            let scheme = match &prep.clusters {
                Some(s) => s.clone(),
                None => match instance {
                    Instance::Pmc(pmc) => ClusterScheme::per_left_node(pmc)?,
                    Instance::Ic(ic) => ClusterScheme::per_source_node(ic)?,
                    _ => ClusterScheme::singletons(instance)?,
                },
            };
            clustered_bound(&compute_cluster_profile(profile, &scheme)?, &f, n)?
        }
        "classical" | "ucb1_improved" => {
            if !matches!(instance, Instance::Classical(_)) {
                return Err(inapplicable(name, instance));
            }
            let gaps = classical_gaps(profile);
            if name == "classical" {
                classical_bound(&gaps, n)?
            } else {
                let c = match prep.config.policy {
                    PolicySpec::Ucb1Improved { c } => c,
                    _ => 2.0,
                };
                ucb1_improved_bound(c, &gaps, n)?
            }
        }
        "epsgreedy" => {
            let c = match prep.config.policy {
                PolicySpec::EpsGreedy { c, .. } => c,
                _ => 2.0,
            };
            let gamma = match prep.gamma {
                Some(g) => g,
                None => eps_greedy_gamma(c, instance.num_arms(), &f, profile.delta_min)?,
            };
            epsgreedy_bound(gamma, c, instance.num_arms(), n, profile.delta_max)?
        }
        "pmc" | "pmc_independent" => {
            let Instance::Pmc(pmc) = instance else {
                return Err(inapplicable(name, instance));
            };
            if name == "pmc" {
                pmc_bound(profile, pmc.edges().len(), n)?
            } else {
                pmc_independent_bound(pmc.edges().len(), n, profile.delta_max)?
            }
        }
        "linear" | "linear_independent" => {
            let Instance::Linear(lin) = instance else {
                return Err(inapplicable(name, instance));
            };
            if name == "linear" {
                linear_bound(profile, lin.max_weight(), lin.max_size(), n)?
            } else {
                linear_independent_bound(lin.num_arms(), lin.max_weight(), lin.max_size(), n, profile.delta_max)?
            }
        }
        "im" | "im_independent" => {
            let Instance::Ic(ic) = instance else {
                return Err(inapplicable(name, instance));
            };
            if name == "im" {
                im_bound(profile, ic.num_nodes(), ic.edges().len(), n)?
            } else {
                im_independent_bound(ic.num_nodes(), ic.edges().len(), n, profile.p_star, profile.delta_max)?
            }
        }
        other => return Err(CmabError::Config(format!("unknown bound {other:?}"))),
    };
    Ok(report.with_param("beta", prep.descriptor.beta))
}

fn bound_names(prep: &Prepared) -> Vec<String> {
    if prep.config.options.bounds.is_empty() {
        default_bounds(prep)
    } else {
        prep.config.options.bounds.clone()
    }
}

/// Bound values at every checkpoint `t >= 2`, tagged `kind=bound`, plus the
/// full reports at the horizon.
pub fn bound_rows(prep: &Prepared) -> Result<(Vec<AggregateRow>, Vec<BoundReport>)> {
    if prep.profile.is_none() {
        return Ok((Vec::new(), Vec::new()));
    }
    let n = prep.config.horizon;
    let mut rows = Vec::new();
    let mut finals = Vec::new();
    for name in bound_names(prep) {
        for t in checkpoints(n).into_iter().filter(|&t| t >= 2) {
            let report = evaluate_bound(prep, &name, t as f64)?;
            rows.push(AggregateRow {
                kind: "bound".into(),
                label: name.clone(),
                t,
                runs: 0,
                mean: report.value,
                stderr: 0.0,
            });
            if t == n {
                finals.push(report);
            }
        }
    }
    Ok((rows, finals))
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub opt: f64,
    pub optimal_arm: usize,
    pub alpha: f64,
    pub super_arms: usize,
    pub bad_super_arms: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub p_star: f64,
    pub arms: Vec<serde_json::Value>,
}

impl From<&GapProfile> for ProfileSummary {
    fn from(p: &GapProfile) -> Self {
        Self {
            opt: p.opt,
            optimal_arm: p.optimal_arm,
            alpha: p.alpha,
            super_arms: p.super_arms.len(),
            bad_super_arms: p.bad_set().len(),
            delta_min: p.delta_min,
            delta_max: p.delta_max,
            p_star: p.p_star,
            arms: p
                .arms
                .iter()
                .map(|a| {
                    json!({
                        "k": a.k,
                        "delta_min": a.delta_min,
                        "delta_max": a.delta_max,
                        "trigger_min": a.trigger_min,
                    })
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub output: PathBuf,
    pub policy: String,
    pub runs: Vec<RunSummary>,
    pub aggregate: Vec<AggregateRow>,
    pub bounds: Vec<BoundReport>,
}

impl ExperimentSummary {
    /// Aggregate mean cumulative regret at round `t`, if `t` is a checkpoint.
    pub fn mean_regret_at(&self, t: u64) -> Option<f64> {
        self.aggregate.iter().find(|r| r.t == t).map(|r| r.mean)
    }

    pub fn bound(&self, name: &str) -> Option<&BoundReport> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

fn policy_label(prep: &Prepared) -> Result<String> {
    Ok(build_policy(&prep.config.policy, &prep.instance, prep.clusters.as_ref(), prep.gamma)?.name())
}

/// Runs the experiment and writes `runs/`, `aggregate.csv`, `bounds.csv`
/// and `metadata.json` under `config.output`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let prep = prepare(config)?;
    let out = &config.output;
    fs::create_dir_all(out).map_err(|e| CmabError::Io(format!("{}: {e}", out.display())))?;
    let runs_dir = out.join("runs");
    let trajectory_dir = if config.options.aggregate_only {
        None
    } else {
        fs::create_dir_all(&runs_dir)?;
        Some(runs_dir.as_path())
    };
    let runs = run_all(&prep, trajectory_dir)?;
    let label = policy_label(&prep)?;
    let aggregate = aggregate(&label, &runs);
    write_lines(
        &out.join("aggregate.csv"),
        AGGREGATE_HEADER,
        aggregate.iter().map(|r| r.csv_line()),
    )?;
    let (rows, bounds) = bound_rows(&prep)?;
    write_lines(
        &out.join("bounds.csv"),
        AGGREGATE_HEADER,
        rows.iter().map(|r| r.csv_line()),
    )?;
    write_metadata(&prep, &out.join("metadata.json"), Some(&runs), &bounds)?;
    Ok(ExperimentSummary {
        output: out.clone(),
        policy: label,
        runs,
        aggregate,
        bounds,
    })
}

/// Evaluates bounds only, writing `bounds.csv` and `metadata.json`.
pub fn run_bounds(config: &ExperimentConfig) -> Result<Vec<BoundReport>> {
    let prep = prepare(config)?;
    let out = &config.output;
    fs::create_dir_all(out).map_err(|e| CmabError::Io(format!("{}: {e}", out.display())))?;
    let (rows, bounds) = bound_rows(&prep)?;
    write_lines(
        &out.join("bounds.csv"),
        AGGREGATE_HEADER,
        rows.iter().map(|r| r.csv_line()),
    )?;
    write_metadata(&prep, &out.join("metadata.json"), None, &bounds)?;
    Ok(bounds)
}

fn write_metadata(prep: &Prepared, path: &Path, runs: Option<&[RunSummary]>, bounds: &[BoundReport]) -> Result<()> {
    let table = &prep.rewards;
    let regret = if table.exact {
        json!({ "mode": "exact", "opt": table.opt, "optimal_arm": table.optimal_arm })
    } else {
        json!({
            "mode": "monte_carlo",
            "samples": prep.config.options.mc_samples,
            "opt": table.opt,
            "optimal_arm": table.optimal_arm,
            "opt_std_error": table.std_errors[table.optimal_arm],
            "max_std_error": table.std_errors.iter().copied().filter(|s| !s.is_nan()).fold(0.0, f64::max),
        })
    };
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "rng": RNG_ALGORITHM,
        "config": prep.config,
        "instance": {
            "kind": prep.instance.kind(),
            "arms": prep.instance.num_arms(),
            "super_arms": prep.instance.space().count().to_string(),
            "smoothness": prep.instance.smoothness().to_string(),
        },
        "oracle": prep.descriptor,
        "policy": policy_label(prep)?,
        "eps_greedy_gamma": prep.gamma,
        "regret": regret,
        "gap_profile": prep.profile.as_ref().map(ProfileSummary::from),
        "bounds": bounds,
        "bounds_skipped": prep.profile.is_none(),
        "runs": runs,
        "trajectory_header": TRAJECTORY_HEADER,
        "aggregate_header": AGGREGATE_HEADER,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| CmabError::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// `value` in the numeric type of the key it replaces.
fn sweep_value(existing: &toml::Value, value: f64, axis: &str) -> Result<toml::Value> {
    match existing {
        toml::Value::Integer(_) => {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(CmabError::Config(format!(
                    "{axis} needs a nonnegative integer, got {value}"
                )));
            }
            Ok(toml::Value::Integer(value as i64))
        }
        toml::Value::Float(_) => Ok(toml::Value::Float(value)),
        _ => Err(CmabError::Config(format!("axis {axis} is not numeric"))),
    }
}

/// Copy of `template` with the numeric dotted key `axis` set to `value`.
pub fn with_axis(template: &ExperimentConfig, axis: &str, value: f64) -> Result<ExperimentConfig> {
    let mut root = toml::Value::try_from(template).map_err(|e| CmabError::Config(e.to_string()))?;
    let mut node = &mut root;
    for key in axis.split('.') {
        node = node
            .get_mut(key)
            .ok_or_else(|| CmabError::Config(format!("unknown axis {axis:?}")))?;
    }
    *node = sweep_value(node, value, axis)?;
    let config: ExperimentConfig = root
        .try_into()
        .map_err(|e: toml::de::Error| CmabError::Config(e.to_string()))?;
    config.check()?;
    Ok(config)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub value: f64,
    pub output: PathBuf,
    pub final_mean_regret: f64,
}

/// One experiment per value under `template.output/<axis>=<value>`, plus
/// an `index.csv` mapping values to directories.
pub fn sweep(template: &ExperimentConfig, axis: &str, values: &[f64]) -> Result<Vec<SweepEntry>> {
    if values.is_empty() {
        return Err(CmabError::Config("sweep needs at least one value".into()));
    }
    let configs: Vec<ExperimentConfig> = values
        .iter()
        .map(|&v| {
            let mut c = with_axis(template, axis, v)?;
            c.output = template.output.join(format!("{axis}={}", fmt_num(v)));
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(values.len());
    for (config, &value) in configs.iter().zip(values) {
        let summary = run_experiment(config)?;
        entries.push(SweepEntry {
            value,
            output: config.output.clone(),
            final_mean_regret: summary.mean_regret_at(config.horizon).unwrap_or(f64::NAN),
        });
    }
    write_lines(
        &template.output.join("index.csv"),
        "axis,value,output,final_mean_cumulative_regret",
        entries.iter().map(|e| {
            format!(
                "{axis},{},{},{}",
                fmt_num(e.value),
                e.output.display(),
                fmt_num(e.final_mean_regret)
            )
        }),
    )?;
    Ok(entries)
}
