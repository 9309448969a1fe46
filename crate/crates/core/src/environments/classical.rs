use rand::Rng;

use crate::arm_model::{Environment, ExpectationVector, Payload, PlayFeedback, SuperArm, SuperArmSpace, TriggeringSet};
use crate::environments::Smoothness;
use crate::error::{CmabError, Result};
use crate::rng::SimRng;

/// Classical MAB: `m` Bernoulli arms, every super arm is a singleton.
#[derive(Debug, Clone)]
pub struct ClassicalMab {
    means: ExpectationVector,
    space: SuperArmSpace,
}

impl ClassicalMab {
    pub fn new(means: Vec<f64>) -> Self {
        let space = SuperArmSpace::Explicit(
            (0..means.len())
                .map(|i| SuperArm::new(i, vec![i], Payload::None))
                .collect(),
        );
        Self {
            means: ExpectationVector::from_raw(means),
            space,
        }
    }
}

impl Environment for ClassicalMab {
    fn kind(&self) -> &'static str {
        "classical"
    }

    fn num_arms(&self) -> usize {
        self.means.len()
    }

    fn true_means(&self) -> &ExpectationVector {
        &self.means
    }

    fn space(&self) -> &SuperArmSpace {
        &self.space
    }

    fn super_arm(&self, id: usize) -> Result<SuperArm> {
        self.space
            .explicit()?
            .get(id)
            .cloned()
            .ok_or(CmabError::UnknownSuperArm(id))
    }

    fn play(&self, arm: &SuperArm, round: u64, rng: &mut SimRng) -> Result<PlayFeedback> {
        let i = *arm
            .members
            .first()
            .filter(|&&i| i < self.num_arms())
            .ok_or(CmabError::UnknownSuperArm(arm.id))?;
        let x = if rng.random::<f64>() < self.means[i] { 1.0 } else { 0.0 };
        Ok(PlayFeedback {
            round,
            super_arm: arm.id,
            outcomes: vec![(i, x)],
            reward: x,
        })
    }

    fn expected_reward(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<f64> {
        arm.members
            .first()
            .map(|&i| means[i])
            .ok_or(CmabError::UnknownSuperArm(arm.id))
    }

    fn triggering_set(&self, _means: &ExpectationVector, arm: &SuperArm) -> Result<TriggeringSet> {
        Ok(TriggeringSet::deterministic(arm))
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::identity()
    }

    fn lowest_super_arm_reaching(&self, arm: usize) -> Result<usize> {
        if arm < self.num_arms() {
            Ok(arm)
        } else {
            Err(CmabError::UntriggerableArm(arm))
        }
    }
}
