//! Offline `(alpha, beta)`-approximation oracles.
//!
//! An oracle maps a mean vector to a super arm. All ties are broken towards
//! the lowest id (lowest node id inside greedy steps), which makes every
//! oracle deterministic given its inputs and RNG state.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arm_model::{Environment, ExpectationVector, OracleQuality, OracleResult, SuperArm};
use crate::environments::{IcInstance, Instance, PmcInstance, SpreadMode};
use crate::error::{CmabError, Result};
use crate::rng::{self, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleDescriptor {
    pub alpha: f64,
    pub beta: f64,
    pub name: String,
}

impl OracleDescriptor {
    pub fn new(name: impl Into<String>, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0) {
            return Err(CmabError::InvalidParameter(format!(
                "oracle needs 0 < alpha, beta <= 1 (got alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            name: name.into(),
        })
    }
}

impl fmt::Display for OracleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (alpha = {}, beta = {})", self.name, self.alpha, self.beta)
    }
}

pub trait Oracle: Send + Sync {
    fn descriptor(&self) -> OracleDescriptor;

    fn select(&self, instance: &Instance, means: &ExpectationVector, rng: &mut SimRng) -> Result<OracleResult>;
}

/// Argmax of `r_mu(S)` over `candidates`, lowest id on ties.
fn argmax_by_reward<'a>(
    env: &dyn Environment,
    means: &ExpectationVector,
    candidates: impl IntoIterator<Item = &'a SuperArm>,
    prefer_low: bool,
) -> Result<&'a SuperArm> {
    let mut best: Option<(&SuperArm, f64)> = None;
    for s in candidates {
        let r = env.expected_reward(means, s)?;
        let better = match best {
            None => true,
            Some((_, b)) if prefer_low => r < b,
            Some((_, b)) => r > b,
        };
        if better {
            best = Some((s, r));
        }
    }
    best.map(|(s, _)| s).ok_or(CmabError::EmptySpace)
}

/// Exhaustive `(1, 1)` oracle over an explicit super-arm list.
#[derive(Debug, Clone, Default)]
pub struct ExactOracle;

impl Oracle for ExactOracle {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor {
            alpha: 1.0,
            beta: 1.0,
            name: "exact".into(),
        }
    }

    fn select(&self, instance: &Instance, means: &ExpectationVector, _rng: &mut SimRng) -> Result<OracleResult> {
        let list = instance.space().explicit()?;
        let best = argmax_by_reward(instance, means, list, false)?;
        Ok(OracleResult::approx(best.clone()))
    }
}

/// Greedy coverage maximization for PMC, a `(1 - 1/e, 1)` oracle.
#[derive(Debug, Clone, Default)]
pub struct GreedyPmcOracle;

impl GreedyPmcOracle {
    pub fn greedy_nodes(pmc: &PmcInstance, means: &ExpectationVector) -> Vec<usize> {
        let mut miss = vec![1.0f64; pmc.right()];
        let mut scratch = vec![1.0f64; pmc.right()];
        let mut chosen: Vec<usize> = Vec::with_capacity(pmc.budget());
        for _ in 0..pmc.budget() {
            let mut best: Option<(usize, f64)> = None;
            for u in 0..pmc.left() {
                if chosen.contains(&u) {
                    continue;
                }
                let edges = pmc.incident(u);
                for &e in edges {
                    scratch[pmc.edges()[e].right] = 1.0;
                }
                for &e in edges {
                    scratch[pmc.edges()[e].right] *= 1.0 - means[e];
                }
                let mut gain = 0.0;
                for &e in edges {
                    let v = pmc.edges()[e].right;
                    if scratch[v] >= 0.0 {
                        gain += miss[v] * (1.0 - scratch[v]);
                        // Count each right node once.
                        scratch[v] = -1.0;
                    }
                }
                if best.is_none_or(|(_, g)| gain > g) {
                    best = Some((u, gain));
                }
            }
            let (u, _) = best.expect("budget never exceeds |L|");
            for &e in pmc.incident(u) {
                miss[pmc.edges()[e].right] *= 1.0 - means[e];
            }
            chosen.push(u);
        }
        chosen
    }
}

impl Oracle for GreedyPmcOracle {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor {
            alpha: 1.0 - (-1.0f64).exp(),
            beta: 1.0,
            name: "greedy-pmc".into(),
        }
    }

    fn select(&self, instance: &Instance, means: &ExpectationVector, _rng: &mut SimRng) -> Result<OracleResult> {
        let Instance::Pmc(pmc) = instance else {
            return Err(CmabError::UnsupportedInstance {
                oracle: "greedy-pmc".into(),
                instance: instance.kind().into(),
            });
        };
        let nodes = Self::greedy_nodes(pmc, means);
        Ok(OracleResult::approx(pmc.arm_for_nodes(nodes)))
    }
}

/// Greedy seed selection on Monte-Carlo spread estimates.
///
/// Within one greedy step every candidate is evaluated on the same random
/// stream (common random numbers), so candidate comparisons are not
/// dominated by sampling noise. `epsilon` only enters the descriptor.
#[derive(Debug, Clone)]
pub struct GreedyImOracle {
    sims: u64,
    epsilon: f64,
    num_edges: usize,
}

impl GreedyImOracle {
    pub fn new(ic: &IcInstance, sims: u64, epsilon: f64) -> Result<Self> {
        if sims < 1 {
            return Err(CmabError::InvalidParameter("greedy-im needs sims >= 1".into()));
        }
        if !(0.0..1.0 - (-1.0f64).exp()).contains(&epsilon) {
            return Err(CmabError::InvalidParameter(format!(
                "greedy-im epsilon {epsilon} must lie in [0, 1 - 1/e)"
            )));
        }
        Ok(Self {
            sims,
            epsilon,
            num_edges: ic.edges().len(),
        })
    }

    pub fn greedy_seeds(&self, ic: &IcInstance, means: &ExpectationVector, rng: &mut SimRng) -> Result<Vec<usize>> {
        let base_seed: u64 = rng.random();
        let mut seeds: Vec<usize> = Vec::with_capacity(ic.budget());
        for step in 0..ic.budget() {
            let mut best: Option<(usize, f64)> = None;
            for u in 0..ic.num_nodes() {
                if seeds.contains(&u) {
                    continue;
                }
                let mut candidate = seeds.clone();
                candidate.push(u);
                let mut crn = rng::stream(base_seed, step as u64);
                let spread = ic
                    .spread(
                        means,
                        &candidate,
                        SpreadMode::MonteCarlo { samples: self.sims },
                        &mut crn,
                    )?
                    .mean;
                if best.is_none_or(|(_, s)| spread > s) {
                    best = Some((u, spread));
                }
            }
            seeds.push(best.expect("budget never exceeds |V|").0);
        }
        Ok(seeds)
    }
}

impl Oracle for GreedyImOracle {
    fn descriptor(&self) -> OracleDescriptor {
        let beta = if self.num_edges >= 2 {
            1.0 - 1.0 / self.num_edges as f64
        } else {
            1.0
        };
        OracleDescriptor {
            alpha: 1.0 - (-1.0f64).exp() - self.epsilon,
            beta,
            name: "greedy-im".into(),
        }
    }

    fn select(&self, instance: &Instance, means: &ExpectationVector, rng: &mut SimRng) -> Result<OracleResult> {
        let Instance::Ic(ic) = instance else {
            return Err(CmabError::UnsupportedInstance {
                oracle: "greedy-im".into(),
                instance: instance.kind().into(),
            });
        };
        let seeds = self.greedy_seeds(ic, means, rng)?;
        Ok(OracleResult::approx(ic.arm_for_seeds(seeds)))
    }
}

/// Exact maximization of `sum_i w_{i,S} mu_i` over a linear instance's list.
#[derive(Debug, Clone, Default)]
pub struct LinearOracle;

impl Oracle for LinearOracle {
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor {
            alpha: 1.0,
            beta: 1.0,
            name: "linear".into(),
        }
    }

    fn select(&self, instance: &Instance, means: &ExpectationVector, _rng: &mut SimRng) -> Result<OracleResult> {
        let Instance::Linear(lin) = instance else {
            return Err(CmabError::UnsupportedInstance {
                oracle: "linear".into(),
                instance: instance.kind().into(),
            });
        };
        let list = lin.space().explicit()?;
        Ok(OracleResult::approx(argmax_by_reward(lin, means, list, false)?.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    /// A uniformly random super arm.
    UniformRandom,
    /// The super arm with the lowest reward under the oracle's input.
    Worst,
}

/// Wraps an oracle so that it fails with probability `1 - beta_override`.
pub struct BetaFailureWrapper {
    inner: Box<dyn Oracle>,
    beta: f64,
    mode: FailureMode,
}

impl BetaFailureWrapper {
    pub fn new(inner: Box<dyn Oracle>, beta_override: f64, mode: FailureMode) -> Result<Self> {
        if !(beta_override > 0.0 && beta_override <= 1.0) {
            return Err(CmabError::InvalidParameter(format!(
                "beta_override {beta_override} must lie in (0, 1]"
            )));
        }
        Ok(Self {
            inner,
            beta: beta_override,
            mode,
        })
    }
}

impl Oracle for BetaFailureWrapper {
    fn descriptor(&self) -> OracleDescriptor {
        let inner = self.inner.descriptor();
        OracleDescriptor {
            alpha: inner.alpha,
            beta: inner.beta * self.beta,
            name: format!("{}+failures", inner.name),
        }
    }

    fn select(&self, instance: &Instance, means: &ExpectationVector, rng: &mut SimRng) -> Result<OracleResult> {
        if self.beta >= 1.0 || rng.random::<f64>() < self.beta {
            return self.inner.select(instance, means, rng);
        }
        let super_arm = match self.mode {
            FailureMode::UniformRandom => {
                let count = instance.space().count();
                let id = rng.random_range(0..count) as usize;
                instance.super_arm(id)?
            }
            FailureMode::Worst => {
                let list = instance.space().explicit()?;
                argmax_by_reward(instance, means, list, true)?.clone()
            }
        };
        Ok(OracleResult {
            super_arm,
            quality: OracleQuality::Failed,
        })
    }
}
