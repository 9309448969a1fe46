use crate::arm_model::{Environment, OracleResult, PlayFeedback};
use crate::environments::Instance;
use crate::error::{CmabError, Result};
use crate::oracles::Oracle;
use crate::policies::{ArmEstimates, Policy};
use crate::rng::SimRng;

/// UCB1 with the sharper radius `sqrt((c + 1) ln t / (2 T_i))`, classical MAB only.
///
/// Every arm is played once first (lowest index first); afterwards the arm
/// with the largest index wins, ties going to the lowest index.
#[derive(Debug, Clone)]
pub struct Ucb1Improved {
    t: u64,
    estimates: ArmEstimates,
    c: f64,
}

impl Ucb1Improved {
    pub fn new(arms: usize, c: f64) -> Result<Self> {
        if !(c > 1.0) {
            return Err(CmabError::InvalidParameter(format!("c {c} must exceed 1")));
        }
        Ok(Self {
            t: 0,
            estimates: ArmEstimates::new(arms, 0.0),
            c,
        })
    }

    pub fn from_estimates(estimates: ArmEstimates, t: u64, c: f64) -> Result<Self> {
        let mut p = Self::new(estimates.len(), c)?;
        p.estimates = estimates;
        p.t = t;
        Ok(p)
    }

    pub fn index(&self, arm: usize, t: u64) -> f64 {
        let count = self.estimates.count(arm) as f64;
        self.estimates.mean(arm) + ((self.c + 1.0) * (t as f64).ln() / (2.0 * count)).sqrt()
    }

    /// Arm chosen in round `t`.
    pub fn select_arm(&self, t: u64) -> usize {
        if let Some(unplayed) = (0..self.estimates.len()).find(|&i| self.estimates.count(i) == 0) {
            return unplayed;
        }
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..self.estimates.len() {
            let v = self.index(i, t);
            if v > best.1 {
                best = (i, v);
            }
        }
        best.0
    }
}

impl Policy for Ucb1Improved {
    fn name(&self) -> String {
        format!("ucb1-improved(c={})", self.c)
    }

    fn select(&mut self, instance: &Instance, _oracle: &dyn Oracle, _rng: &mut SimRng) -> Result<OracleResult> {
        if !matches!(instance, Instance::Classical(_)) {
            return Err(CmabError::UnsupportedInstance {
                oracle: "ucb1-improved".into(),
                instance: instance.kind().into(),
            });
        }
        self.t += 1;
        let arm = self.select_arm(self.t);
        Ok(OracleResult::approx(instance.super_arm(arm)?))
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
