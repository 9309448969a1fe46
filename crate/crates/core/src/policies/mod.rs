//! Online policies. Each proposes a super arm per round and learns from the
//! outcomes of the arms that round triggered.

mod baseline;
mod clustered;
mod cucb;
pub mod diagnostics;
mod eps_greedy;
mod ucb1;

use serde::{Deserialize, Serialize};

pub use baseline::UniformRandom;
pub use clustered::{clustered_init_schedule, ClusterScheme, ClusteredCucb};
pub use cucb::Cucb;
pub use diagnostics::{nice_run_check, Diagnostics, NiceRun};
pub use eps_greedy::{eps_greedy_gamma, EpsGreedy};
pub use ucb1::Ucb1Improved;

use crate::arm_model::{OracleResult, PlayFeedback};
use crate::environments::Instance;
use crate::error::{CmabError, Result};
use crate::oracles::Oracle;
use crate::rng::SimRng;

pub trait Policy: Send {
    fn name(&self) -> String;

    /// Starts the next round and proposes the super arm to play.
    fn select(&mut self, instance: &Instance, oracle: &dyn Oracle, rng: &mut SimRng) -> Result<OracleResult>;

    fn update(&mut self, feedback: &PlayFeedback) -> Result<()>;

    /// Index of the current round; 0 before the first `select`.
    fn round(&self) -> u64;

    fn estimates(&self) -> &ArmEstimates;
}

/// Play counts `T_i` and empirical means of every base arm.
///
/// Means are kept as `sum / count`, so they equal the arithmetic mean of the
/// observed outcomes exactly. Unplayed arms report `initial_mean`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmEstimates {
    counts: Vec<u64>,
    sums: Vec<f64>,
    initial_mean: f64,
}

impl ArmEstimates {
    pub fn new(arms: usize, initial_mean: f64) -> Self {
        Self {
            counts: vec![0; arms],
            sums: vec![0.0; arms],
            initial_mean,
        }
    }

    /// Builds estimates from given `(mean, count)` pairs.
    pub fn from_stats(stats: &[(f64, u64)], initial_mean: f64) -> Self {
        Self {
            counts: stats.iter().map(|s| s.1).collect(),
            sums: stats.iter().map(|&(m, c)| m * c as f64).collect(),
            initial_mean,
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mean(&self, arm: usize) -> f64 {
        match self.counts[arm] {
            0 => self.initial_mean,
            c => self.sums[arm] / c as f64,
        }
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.mean(i)).collect()
    }

    pub fn observe(&mut self, arm: usize, outcome: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&outcome) {
            return Err(CmabError::OutcomeOutOfRange { arm, value: outcome });
        }
        self.counts[arm] += 1;
        self.sums[arm] += outcome;
        Ok(())
    }

    /// Applies a whole feedback record; nothing changes if any outcome is invalid.
    pub fn observe_all(&mut self, feedback: &PlayFeedback) -> Result<()> {
        if let Some(&(arm, value)) = feedback.outcomes.iter().find(|(_, x)| !(0.0..=1.0).contains(x)) {
            return Err(CmabError::OutcomeOutOfRange { arm, value });
        }
        for &(arm, x) in &feedback.outcomes {
            self.observe(arm, x)?;
        }
        Ok(())
    }
}

/// Confidence-radius rule `sqrt(y_t / (2 T_i))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ExplorationRule {
    /// `y_t = coefficient * ln t`; 3 is the standard CUCB choice, `1 + c` the zeta variant.
    LogScaled { coefficient: f64 },
    /// `y_t = 2 ln t + ln ln t`.
    LogLog,
}

impl Default for ExplorationRule {
    fn default() -> Self {
        ExplorationRule::LogScaled { coefficient: 3.0 }
    }
}

impl ExplorationRule {
    pub fn numerator(&self, t: u64) -> f64 {
        let ln_t = (t as f64).ln();
        let y = match *self {
            ExplorationRule::LogScaled { coefficient } => coefficient * ln_t,
            ExplorationRule::LogLog => 2.0 * ln_t + ln_t.ln(),
        };
        if y.is_finite() {
            y.max(0.0)
        } else {
            0.0
        }
    }

    /// Upper confidence value `min(mean + sqrt(y_t / (2 T)), 1)`; 1 when `T = 0`.
    pub fn adjust(&self, mean: f64, count: u64, t: u64) -> f64 {
        if count == 0 {
            return 1.0;
        }
        (mean + (self.numerator(t) / (2.0 * count as f64)).sqrt()).min(1.0)
    }
}

/// Standard CUCB adjustment `min(mean + sqrt(3 ln t / (2 T)), 1)`.
pub fn ucb_adjust(mean: f64, count: u64, t: u64) -> f64 {
    ExplorationRule::default().adjust(mean, count, t)
}
