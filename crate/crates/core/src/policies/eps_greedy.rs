use rand::Rng;

use crate::arm_model::{Environment, ExpectationVector, OracleResult, PlayFeedback};
use crate::environments::{Instance, Smoothness};
use crate::error::{CmabError, Result};
use crate::oracles::Oracle;
use crate::policies::{ArmEstimates, Policy};
use crate::rng::SimRng;

/// epsilon_t-greedy with `epsilon_t = min(gamma / t, 1)`.
///
/// Exploration picks a base arm uniformly and plays the lowest-id super arm
/// that can trigger it. Exploitation hands the raw empirical means to the
/// oracle.
#[derive(Debug, Clone)]
pub struct EpsGreedy {
    t: u64,
    estimates: ArmEstimates,
    gamma: f64,
    explored: bool,
}

impl EpsGreedy {
    pub fn new(arms: usize, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(CmabError::InvalidParameter(format!("gamma {gamma} must be >= 0")));
        }
        Ok(Self {
            t: 0,
            estimates: ArmEstimates::new(arms, 1.0),
            gamma,
            explored: false,
        })
    }

    pub fn epsilon(&self, t: u64) -> f64 {
        (self.gamma / t as f64).min(1.0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Whether the last selected round was an exploration round.
    pub fn explored(&self) -> bool {
        self.explored
    }
}

impl Policy for EpsGreedy {
    fn name(&self) -> String {
        format!("eps-greedy(gamma={})", crate::harness::fmt_num(self.gamma))
    }

    fn select(&mut self, instance: &Instance, oracle: &dyn Oracle, rng: &mut SimRng) -> Result<OracleResult> {
        self.t += 1;
        let eps = self.epsilon(self.t);
        self.explored = rng.random::<f64>() < eps;
        if self.explored {
            let arm = rng.random_range(0..instance.num_arms());
            let id = instance.lowest_super_arm_reaching(arm)?;
            return Ok(OracleResult::approx(instance.super_arm(id)?));
        }
        let means = ExpectationVector::from_raw(self.estimates.means());
        oracle.select(instance, &means, rng)
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

/// Smallest `gamma` meeting both requirements of the epsilon_t-greedy
/// analysis: `gamma >= 3 m (c + 1) / f^{-1}(delta_min / 2)^2` and
/// `gamma >= 20 c m`.
pub fn eps_greedy_gamma(c: f64, m: usize, smoothness: &Smoothness, delta_min: f64) -> Result<f64> {
    if !(delta_min > 0.0) {
        return Err(CmabError::InvalidParameter(format!(
            "delta_min {delta_min} must be positive"
        )));
    }
    if !(c > 1.0) {
        return Err(CmabError::InvalidParameter(format!("c {c} must exceed 1")));
    }
    let m = m as f64;
    let radius = smoothness.inverse(delta_min / 2.0);
    let sampling = 3.0 * m * (c + 1.0) / (radius * radius);
    Ok(sampling.max(20.0 * c * m))
}
