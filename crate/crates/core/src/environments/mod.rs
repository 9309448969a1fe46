//! Built-in problem instances.

mod classical;
pub mod generate;
pub mod ic;
mod linear;
pub mod pmc;
mod smoothness;

use rand::Rng;

pub use classical::ClassicalMab;
pub use ic::{IcInstance, SpreadEstimate, SpreadMode};
pub use linear::LinearInstance;
pub use pmc::PmcInstance;
pub use smoothness::Smoothness;

use crate::arm_model::{
    Environment, ExpectationVector, PlayFeedback, SuperArm, SuperArmSpace, TriggeringSet, Violation,
};
use crate::error::Result;
use crate::rng::SimRng;

/// Seed-set spaces up to this size are enumerated explicitly.
pub const EXPLICIT_SPACE_CAP: u128 = 200_000;

pub(crate) fn bernoulli(rng: &mut SimRng, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// Any built-in instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Classical(ClassicalMab),
    Pmc(PmcInstance),
    Linear(LinearInstance),
    Ic(IcInstance),
}

impl Instance {
    fn inner(&self) -> &dyn Environment {
        match self {
            Instance::Classical(e) => e,
            Instance::Pmc(e) => e,
            Instance::Linear(e) => e,
            Instance::Ic(e) => e,
        }
    }
}

impl Environment for Instance {
    fn kind(&self) -> &'static str {
        self.inner().kind()
    }
    fn num_arms(&self) -> usize {
        self.inner().num_arms()
    }
    fn true_means(&self) -> &ExpectationVector {
        self.inner().true_means()
    }
    fn space(&self) -> &SuperArmSpace {
        self.inner().space()
    }
    fn super_arm(&self, id: usize) -> Result<SuperArm> {
        self.inner().super_arm(id)
    }
    fn play(&self, arm: &SuperArm, round: u64, rng: &mut SimRng) -> Result<PlayFeedback> {
        self.inner().play(arm, round, rng)
    }
    fn expected_reward(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<f64> {
        self.inner().expected_reward(means, arm)
    }
    fn triggering_set(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<TriggeringSet> {
        self.inner().triggering_set(means, arm)
    }
    fn reachable_arms(&self, arm: &SuperArm) -> Vec<usize> {
        self.inner().reachable_arms(arm)
    }
    fn smoothness(&self) -> Smoothness {
        self.inner().smoothness()
    }
    fn lowest_super_arm_reaching(&self, arm: usize) -> Result<usize> {
        self.inner().lowest_super_arm_reaching(arm)
    }
    fn extra_violations(&self) -> Vec<Violation> {
        self.inner().extra_violations()
    }
}

impl From<ClassicalMab> for Instance {
    fn from(e: ClassicalMab) -> Self {
        Instance::Classical(e)
    }
}
impl From<PmcInstance> for Instance {
    fn from(e: PmcInstance) -> Self {
        Instance::Pmc(e)
    }
}
impl From<LinearInstance> for Instance {
    fn from(e: LinearInstance) -> Self {
        Instance::Linear(e)
    }
}
impl From<IcInstance> for Instance {
    fn from(e: IcInstance) -> Self {
        Instance::Ic(e)
    }
}
