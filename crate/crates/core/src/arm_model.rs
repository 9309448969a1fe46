//! Core vocabulary: base arms, super arms, triggering sets, play feedback and
//! the [`Environment`] contract every problem instance implements.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::environments::Smoothness;
use crate::error::{CmabError, Result};
use crate::rng::SimRng;

/// Per-arm means, one entry per base arm.
///
/// [`ExpectationVector::new`] enforces the `[0, 1]` range. Instances built
/// from raw data go through [`ExpectationVector::from_raw`] so that
/// [`validate_instance`] can report bad entries instead of failing early.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationVector(Vec<f64>);

impl ExpectationVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(CmabError::InvalidParameter(format!(
                "mean out of range at arm {i}: {v}"
            )));
        }
        Ok(Self(values))
    }

    pub fn from_raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, arm: usize) -> f64 {
        self.0[arm]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ExpectationVector {
    type Output = f64;
    fn index(&self, arm: usize) -> &f64 {
        &self.0[arm]
    }
}

/// Environment-specific data attached to a super arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    None,
    /// Chosen graph nodes: left nodes for PMC, seed nodes for influence maximization.
    Nodes(Vec<usize>),
    /// Coefficients `w_{i,S}`, aligned with `members`.
    Weights(Vec<f64>),
}

/// A set of base arms played together.
///
/// Two super arms with the same members but different payloads are distinct;
/// identity is the `id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperArm {
    pub id: usize,
    /// Sorted base-arm indices.
    pub members: Vec<usize>,
    pub payload: Payload,
}

impl SuperArm {
    /// Members are sorted; weights, when present, are permuted along with them.
    pub fn new(id: usize, members: Vec<usize>, payload: Payload) -> Self {
        let (members, payload) = match payload {
            Payload::Weights(w) => {
                let mut pairs: Vec<(usize, f64)> = members.into_iter().zip(w).collect();
                pairs.sort_by_key(|p| p.0);
                let (m, w) = pairs.into_iter().unzip();
                (m, Payload::Weights(w))
            }
            other => {
                let mut m = members;
                m.sort_unstable();
                (m, other)
            }
        };
        Self { id, members, payload }
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.members.binary_search(&arm).is_ok()
    }

    pub fn nodes(&self) -> Option<&[usize]> {
        match &self.payload {
            Payload::Nodes(n) => Some(n),
            _ => None,
        }
    }
}

/// The super-arm space of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum SuperArmSpace {
    Explicit(Vec<SuperArm>),
    /// Too large to list; arms are materialized by id on demand.
    Implicit {
        count: u128,
    },
}

impl SuperArmSpace {
    pub fn explicit(&self) -> Result<&[SuperArm]> {
        match self {
            SuperArmSpace::Explicit(list) => Ok(list),
            SuperArmSpace::Implicit { .. } => Err(CmabError::ImplicitSpace),
        }
    }

    pub fn count(&self) -> u128 {
        match self {
            SuperArmSpace::Explicit(list) => list.len() as u128,
            SuperArmSpace::Implicit { count } => *count,
        }
    }
}

/// Arms that may be triggered when a super arm is played, with their
/// triggering probabilities `p_i^S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggeringSet {
    pub super_arm: usize,
    pub probabilities: BTreeMap<usize, f64>,
}

impl TriggeringSet {
    /// Deterministic triggering: exactly the members, each with probability 1.
    pub fn deterministic(arm: &SuperArm) -> Self {
        Self {
            super_arm: arm.id,
            probabilities: arm.members.iter().map(|&i| (i, 1.0)).collect(),
        }
    }

    pub fn arms(&self) -> impl Iterator<Item = usize> + '_ {
        self.probabilities.keys().copied()
    }

    pub fn probability(&self, arm: usize) -> f64 {
        self.probabilities.get(&arm).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.probabilities.contains_key(&arm)
    }
}

/// Outcome of one round of play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayFeedback {
    pub round: u64,
    pub super_arm: usize,
    /// `(arm, outcome)` for every triggered arm, sorted by arm.
    pub outcomes: Vec<(usize, f64)>,
    pub reward: f64,
}

impl PlayFeedback {
    pub fn triggered(&self) -> impl Iterator<Item = usize> + '_ {
        self.outcomes.iter().map(|&(arm, _)| arm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleQuality {
    AlphaApprox,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub super_arm: SuperArm,
    pub quality: OracleQuality,
}

impl OracleResult {
    pub fn approx(super_arm: SuperArm) -> Self {
        Self {
            super_arm,
            quality: OracleQuality::AlphaApprox,
        }
    }

    pub fn failed(&self) -> bool {
        self.quality == OracleQuality::Failed
    }
}

/// A stochastic CMAB problem instance.
///
/// Implementations are immutable after construction; `play` takes the RNG
/// explicitly so independent runs can share one instance.
pub trait Environment: Send + Sync {
    fn kind(&self) -> &'static str;

    fn num_arms(&self) -> usize;

    fn true_means(&self) -> &ExpectationVector;

    fn space(&self) -> &SuperArmSpace;

    /// Materializes a super arm by id; works for implicit spaces too.
    fn super_arm(&self, id: usize) -> Result<SuperArm>;

    fn play(&self, arm: &SuperArm, round: u64, rng: &mut SimRng) -> Result<PlayFeedback>;

    /// `r_mu(S)` under an arbitrary mean vector.
    fn expected_reward(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<f64>;

    /// Triggering probabilities `p_i^S` under `means`; arms with zero
    /// probability are omitted.
    fn triggering_set(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<TriggeringSet>;

    /// Arms that can be triggered by `arm` for some mean vector. Independent
    /// of the means, and always a superset of the members.
    fn reachable_arms(&self, arm: &SuperArm) -> Vec<usize> {
        arm.members.clone()
    }

    fn smoothness(&self) -> Smoothness;

    /// Lowest-id super arm whose reachable set contains `arm`.
    fn lowest_super_arm_reaching(&self, arm: usize) -> Result<usize> {
        self.space()
            .explicit()?
            .iter()
            .find(|s| self.reachable_arms(s).contains(&arm))
            .map(|s| s.id)
            .ok_or(CmabError::UntriggerableArm(arm))
    }

    /// Extra consistency checks specific to the environment.
    fn extra_violations(&self) -> Vec<Violation> {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub arm: Option<usize>,
    pub super_arm: Option<usize>,
    pub message: String,
}

impl Violation {
    pub fn arm(arm: usize, message: impl Into<String>) -> Self {
        Self {
            arm: Some(arm),
            super_arm: None,
            message: message.into(),
        }
    }

    pub fn super_arm(id: usize, message: impl Into<String>) -> Self {
        Self {
            arm: None,
            super_arm: Some(id),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            arm: None,
            super_arm: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.arm, self.super_arm) {
            (_, Some(s)) => write!(f, "{} (super arm {s})", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

/// Checks the shared invariants of an instance. Returns every violation
/// found; an empty list means the instance is well formed.
pub fn validate_instance(env: &dyn Environment) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = env.num_arms();
    let means = env.true_means();
    if means.len() != m {
        out.push(Violation::general(format!(
            "mean vector has length {}, expected {m}",
            means.len()
        )));
    }
    for (i, &v) in means.values().iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            out.push(Violation::arm(i, format!("mean out of range at arm {i}")));
        }
    }
    if let SuperArmSpace::Explicit(list) = env.space() {
        if list.is_empty() {
            out.push(Violation::general("super arm space is empty"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in list {
            if !seen.insert(s.id) {
                out.push(Violation::super_arm(s.id, "duplicate super arm id"));
            }
            if s.members.is_empty() && s.nodes().is_none_or(|n| n.is_empty()) {
                out.push(Violation::super_arm(s.id, "super arm is empty"));
            }
            if let Some(&bad) = s.members.iter().find(|&&i| i >= m) {
                out.push(Violation::super_arm(s.id, format!("member {bad} is not a base arm")));
                continue;
            }
            if out.iter().any(|v| v.arm.is_some()) {
                continue;
            }
            match env.triggering_set(means, s) {
                Ok(ts) => {
                    let members_certain = s.members.iter().all(|&i| (ts.probability(i) - 1.0).abs() < 1e-12);
                    let in_range = ts.probabilities.values().all(|&p| p > 0.0 && p <= 1.0);
                    if !members_certain || !in_range {
                        out.push(Violation::super_arm(s.id, "triggering set inconsistent"));
                    }
                }
                Err(CmabError::EnumerationCap { .. }) => {}
                Err(e) => out.push(Violation::super_arm(s.id, e.to_string())),
            }
        }
    }
    out.extend(env.extra_violations());
    out
}
