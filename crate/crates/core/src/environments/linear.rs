use crate::arm_model::{Environment, ExpectationVector, Payload, PlayFeedback, SuperArm, SuperArmSpace, TriggeringSet};
use crate::environments::{bernoulli, Smoothness};
use crate::error::{CmabError, Result};
use crate::rng::SimRng;

/// Linear rewards: each super arm carries coefficients `w_{i,S} >= 0` and
/// pays `sum_i w_{i,S} X_i`.
#[derive(Debug, Clone)]
pub struct LinearInstance {
    means: ExpectationVector,
    space: SuperArmSpace,
    max_size: usize,
    max_weight: f64,
}

impl LinearInstance {
    /// `super_arms` holds `(members, weights)`; ids follow list order.
    pub fn new(means: Vec<f64>, super_arms: Vec<(Vec<usize>, Vec<f64>)>) -> Result<Self> {
        if super_arms.is_empty() {
            return Err(CmabError::EmptySpace);
        }
        let m = means.len();
        let mut list = Vec::with_capacity(super_arms.len());
        for (id, (members, weights)) in super_arms.into_iter().enumerate() {
            if members.len() != weights.len() {
                return Err(CmabError::InvalidParameter(format!(
                    "super arm {id}: {} members but {} weights",
                    members.len(),
                    weights.len()
                )));
            }
            if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
                return Err(CmabError::InvalidParameter(format!(
                    "super arm {id}: negative weight {w}"
                )));
            }
            if let Some(i) = members.iter().find(|&&i| i >= m) {
                return Err(CmabError::InvalidParameter(format!(
                    "super arm {id}: member {i} is not a base arm"
                )));
            }
            list.push(SuperArm::new(id, members, Payload::Weights(weights)));
        }
        let max_size = list.iter().map(|s| s.members.len()).max().unwrap_or(0);
        let max_weight = list.iter().flat_map(|s| weights(s).iter().copied()).fold(0.0, f64::max);
        Ok(Self {
            means: ExpectationVector::from_raw(means),
            space: SuperArmSpace::Explicit(list),
            max_size,
            max_weight,
        })
    }

    /// Top-k of m: every k-subset with unit weights.
    pub fn top_k(means: Vec<f64>, k: usize) -> Result<Self> {
        let arms = crate::combin::k_subsets(means.len(), k)
            .into_iter()
            .map(|s| (s, vec![1.0; k]))
            .collect();
        Self::new(means, arms)
    }

    /// `L = max |S|`.
    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// `a_max = max w_{i,S}`.
    pub fn max_weight(&self) -> f64 {
        self.max_weight
    }

    fn listed(&self, arm: &SuperArm) -> Result<&SuperArm> {
        self.space
            .explicit()?
            .get(arm.id)
            .filter(|s| *s == arm)
            .ok_or(CmabError::UnknownSuperArm(arm.id))
    }
}

fn weights(arm: &SuperArm) -> &[f64] {
    match &arm.payload {
        Payload::Weights(w) => w,
        _ => &[],
    }
}

impl Environment for LinearInstance {
    fn kind(&self) -> &'static str {
        "linear"
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
        let arm = self.listed(arm)?;
        let mut reward = 0.0;
        let outcomes = arm
            .members
            .iter()
            .zip(weights(arm))
            .map(|(&i, &w)| {
                let x = if bernoulli(rng, self.means[i]) { 1.0 } else { 0.0 };
                reward += w * x;
                (i, x)
            })
            .collect();
        Ok(PlayFeedback {
            round,
            super_arm: arm.id,
            outcomes,
            reward,
        })
    }

    fn expected_reward(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<f64> {
        let arm = self.listed(arm)?;
        Ok(arm.members.iter().zip(weights(arm)).map(|(&i, &w)| w * means[i]).sum())
    }

    fn triggering_set(&self, _means: &ExpectationVector, arm: &SuperArm) -> Result<TriggeringSet> {
        Ok(TriggeringSet::deterministic(self.listed(arm)?))
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::linear(self.max_weight * self.max_size as f64)
    }
}
