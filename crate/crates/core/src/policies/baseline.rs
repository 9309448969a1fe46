use rand::Rng;

use crate::arm_model::{Environment, OracleResult, PlayFeedback};
use crate::environments::Instance;
use crate::error::{CmabError, Result};
use crate::oracles::Oracle;
use crate::policies::{ArmEstimates, Policy};
use crate::rng::SimRng;

/// Plays a uniformly random super arm every round; ignores the oracle.
#[derive(Debug, Clone)]
pub struct UniformRandom {
    t: u64,
    estimates: ArmEstimates,
}

impl UniformRandom {
    pub fn new(arms: usize) -> Self {
        Self {
            t: 0,
            estimates: ArmEstimates::new(arms, 1.0),
        }
    }
}

impl Policy for UniformRandom {
    fn name(&self) -> String {
        "uniform-random".into()
    }

    fn select(&mut self, instance: &Instance, _oracle: &dyn Oracle, rng: &mut SimRng) -> Result<OracleResult> {
        self.t += 1;
        let id = rng.random_range(0..instance.space().count()) as usize;
        Ok(OracleResult::approx(instance.super_arm(id)?))
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
