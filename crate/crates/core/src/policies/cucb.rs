use crate::arm_model::{Environment, ExpectationVector, OracleResult, PlayFeedback};
use crate::environments::Instance;
use crate::error::{CmabError, Result};
use crate::oracles::Oracle;
use crate::policies::{ArmEstimates, ExplorationRule, Policy};
use crate::rng::SimRng;

/// CUCB: feed the oracle upper confidence values of every base arm.
///
/// There is no initialization phase. Unplayed arms start at mean 1 with an
/// adjusted value of 1, which steers the oracle towards triggering them.
#[derive(Debug, Clone)]
pub struct Cucb {
    t: u64,
    estimates: ArmEstimates,
    rule: ExplorationRule,
}

impl Cucb {
    pub fn new(arms: usize) -> Self {
        Self::with_rule(arms, ExplorationRule::default())
    }

    pub fn with_rule(arms: usize, rule: ExplorationRule) -> Self {
        Self {
            t: 0,
            estimates: ArmEstimates::new(arms, 1.0),
            rule,
        }
    }

    pub fn from_estimates(estimates: ArmEstimates, t: u64) -> Self {
        Self {
            t,
            estimates,
            rule: ExplorationRule::default(),
        }
    }

    pub fn rule(&self) -> ExplorationRule {
        self.rule
    }

    /// Adjusted means for round `t`.
    pub fn upper_confidence(&self, t: u64) -> ExpectationVector {
        ExpectationVector::from_raw(
            (0..self.estimates.len())
                .map(|i| self.rule.adjust(self.estimates.mean(i), self.estimates.count(i), t))
                .collect(),
        )
    }

    /// Advances the round counter without consulting the oracle; used by
    /// wrappers that dictate the super arm for a round.
    pub(crate) fn begin_round(&mut self) -> u64 {
        self.t += 1;
        self.t
    }
}

impl Policy for Cucb {
    fn name(&self) -> String {
        match self.rule {
            ExplorationRule::LogScaled { coefficient: 3.0 } => "cucb".into(),
            ExplorationRule::LogScaled { coefficient } => format!("cucb(y={coefficient}ln t)"),
            ExplorationRule::LogLog => "cucb(2ln t+lnln t)".into(),
        }
    }

    fn select(&mut self, instance: &Instance, oracle: &dyn Oracle, rng: &mut SimRng) -> Result<OracleResult> {
        let t = self.begin_round();
        let bar = self.upper_confidence(t);
        debug_assert_eq!(bar.len(), instance.num_arms());
        oracle.select(instance, &bar, rng)
    }

    fn update(&mut self, feedback: &PlayFeedback) -> Result<()> {
        if feedback.round != self.t {
            return Err(CmabError::RoundMismatch {
                expected: self.t,
                got: feedback.round,
            });
        }
        self.estimates.observe_all(feedback)
    }

    fn round(&self) -> u64 {
        self.t
    }

    fn estimates(&self) -> &ArmEstimates {
        &self.estimates
    }
}
