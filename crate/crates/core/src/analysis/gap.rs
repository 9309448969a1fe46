//! Ground-truth gap quantities: `opt`, bad super arms and their gaps, and the
//! per-arm and per-cluster aggregates the regret bounds are written in.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arm_model::{Environment, ExpectationVector};
use crate::error::{CmabError, Result};
use crate::policies::ClusterScheme;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperArmGap {
    pub id: usize,
    pub reward: f64,
    /// `alpha * opt - reward` for bad super arms.
    pub delta: Option<f64>,
    /// Arms triggered with positive probability under the true means.
    pub triggering: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmGap {
    /// Number of bad super arms whose triggering set contains the arm.
    pub k: usize,
    /// Their gaps, largest first.
    pub deltas: Vec<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Smallest positive triggering probability over all super arms.
    pub trigger_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapProfile {
    pub opt: f64,
    pub optimal_arm: usize,
    pub alpha: f64,
    pub super_arms: Vec<SuperArmGap>,
    pub arms: Vec<ArmGap>,
    /// Over arms with `k > 0`; zero when no super arm is bad.
    pub delta_min: f64,
    pub delta_max: f64,
    /// Minimum of the per-arm triggering minima; 1 when nothing is triggered.
    pub p_star: f64,
}

impl GapProfile {
    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    fn entry(&self, id: usize) -> Option<&SuperArmGap> {
        self.super_arms
            .binary_search_by_key(&id, |s| s.id)
            .ok()
            .map(|i| &self.super_arms[i])
    }

    pub fn reward(&self, id: usize) -> Option<f64> {
        self.entry(id).map(|s| s.reward)
    }

    pub fn is_bad(&self, id: usize) -> bool {
        self.entry(id).is_some_and(|s| s.delta.is_some())
    }

    pub fn triggering_arms(&self, id: usize) -> &[usize] {
        self.entry(id).map_or(&[], |s| &s.triggering)
    }

    pub fn trigger_min(&self, arm: usize) -> Option<f64> {
        self.arms.get(arm).and_then(|a| a.trigger_min)
    }

    /// `(id, delta)` for every bad super arm, in id order.
    pub fn bad_set(&self) -> Vec<(usize, f64)> {
        self.super_arms
            .iter()
            .filter_map(|s| s.delta.map(|d| (s.id, d)))
            .collect()
    }

    /// Arms with `k > 0`.
    pub fn contributing_arms(&self) -> impl Iterator<Item = (usize, &ArmGap)> {
        self.arms.iter().enumerate().filter(|(_, a)| a.k > 0)
    }
}

fn summarize(mut deltas: Vec<f64>) -> (Vec<f64>, f64, f64) {
    deltas.sort_by(|a, b| b.total_cmp(a));
    let max = deltas.first().copied().unwrap_or(0.0);
    let min = deltas.last().copied().unwrap_or(0.0);
    (deltas, min, max)
}

/// Evaluates every super arm of an explicit space under `true_mu`.
pub fn compute_gap_profile(env: &dyn Environment, true_mu: &ExpectationVector, alpha: f64) -> Result<GapProfile> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CmabError::InvalidParameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    let list = env.space().explicit()?;
    if list.is_empty() {
        return Err(CmabError::EmptySpace);
    }
    let evaluated: Vec<(usize, f64, BTreeMap<usize, f64>)> = list
        .par_iter()
        .map(|s| {
            let reward = env.expected_reward(true_mu, s)?;
            let trig = env.triggering_set(true_mu, s)?;
            Ok((s.id, reward, trig.probabilities))
        })
        .collect::<Result<_>>()?;
    let mut evaluated = evaluated;
    evaluated.sort_by_key(|e| e.0);

    let (mut optimal_arm, mut opt) = (evaluated[0].0, evaluated[0].1);
    for &(id, r, _) in &evaluated[1..] {
        if r > opt {
            opt = r;
            optimal_arm = id;
        }
    }
    let threshold = alpha * opt;

    let m = env.num_arms();
    let mut deltas = vec![Vec::new(); m];
    let mut trigger_min: Vec<Option<f64>> = vec![None; m];
    let mut super_arms = Vec::with_capacity(evaluated.len());
    for (id, reward, probs) in evaluated {
        let delta = (reward < threshold).then_some(threshold - reward);
        let mut triggering = Vec::with_capacity(probs.len());
        for (&i, &p) in &probs {
            if p <= 0.0 {
                continue;
            }
            triggering.push(i);
            trigger_min[i] = Some(trigger_min[i].map_or(p, |q| q.min(p)));
            if let Some(d) = delta {
                deltas[i].push(d);
            }
        }
        super_arms.push(SuperArmGap {
            id,
            reward,
            delta,
            triggering,
        });
    }

    let arms: Vec<ArmGap> = deltas
        .into_iter()
        .zip(trigger_min)
        .map(|(d, p)| {
            let (deltas, delta_min, delta_max) = summarize(d);
            ArmGap {
                k: deltas.len(),
                deltas,
                delta_min,
                delta_max,
                trigger_min: p,
            }
        })
        .collect();
    let contributing = || arms.iter().filter(|a| a.k > 0);
    let delta_min = contributing().map(|a| a.delta_min).reduce(f64::min).unwrap_or(0.0);
    let delta_max = contributing().map(|a| a.delta_max).reduce(f64::max).unwrap_or(0.0);
    let p_star = arms
        .iter()
        .filter_map(|a| a.trigger_min)
        .reduce(f64::min)
        .unwrap_or(1.0);

    Ok(GapProfile {
        opt,
        optimal_arm,
        alpha,
        super_arms,
        arms,
        delta_min,
        delta_max,
        p_star,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterGap {
    pub members: Vec<usize>,
    pub k: usize,
    pub deltas: Vec<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
}

/// Cluster analogue of [`GapProfile`]: cluster `C` collects the gaps of the
/// bad super arms with `C` in `g(S)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub num_arms: usize,
    pub clusters: Vec<ClusterGap>,
    pub delta_max: f64,
}

pub fn compute_cluster_profile(profile: &GapProfile, scheme: &ClusterScheme) -> Result<ClusterProfile> {
    let mut deltas = vec![Vec::new(); scheme.len()];
    for (id, d) in profile.bad_set() {
        for &c in scheme.groups(id) {
            deltas[c].push(d);
        }
    }
    let clusters: Vec<ClusterGap> = deltas
        .into_iter()
        .zip(scheme.clusters())
        .map(|(d, members)| {
            let (deltas, delta_min, delta_max) = summarize(d);
            ClusterGap {
                members: members.clone(),
                k: deltas.len(),
                deltas,
                delta_min,
                delta_max,
            }
        })
        .collect();
    let delta_max = clusters.iter().map(|c| c.delta_max).fold(0.0, f64::max);
    Ok(ClusterProfile {
        num_arms: profile.num_arms(),
        clusters,
        delta_max,
    })
}
