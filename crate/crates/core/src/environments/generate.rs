//! Seeded random instance generators.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environments::{IcInstance, LinearInstance, PmcInstance};
use crate::error::{CmabError, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRange {
    pub low: f64,
    pub high: f64,
}

impl ProbabilityRange {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(0.0 <= low && low <= high && high <= 1.0) {
            return Err(CmabError::InvalidParameter(format!(
                "probability range [{low}, {high}] must satisfy 0 <= low <= high <= 1"
            )));
        }
        Ok(Self { low, high })
    }

    fn draw(&self, rng: &mut SimRng) -> f64 {
        if self.low == self.high {
            self.low
        } else {
            rng.random_range(self.low..self.high)
        }
    }
}

/// Bipartite coverage instance: every `(u, v)` pair is an edge with
/// probability `density`, edge means drawn uniformly from `range`.
pub fn random_pmc(
    left: usize,
    right: usize,
    density: f64,
    range: ProbabilityRange,
    k: usize,
    rng: &mut SimRng,
) -> Result<PmcInstance> {
    if !(0.0..=1.0).contains(&density) {
        return Err(CmabError::InvalidParameter(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    let mut edges = Vec::new();
    for u in 0..left {
        for v in 0..right {
            if rng.random::<f64>() < density {
                edges.push((u, v, range.draw(rng)));
            }
        }
    }
    PmcInstance::new(left, right, &edges, k)
}

/// Directed graph with `edges` distinct non-loop edges chosen uniformly.
pub fn random_ic(
    nodes: usize,
    edges: usize,
    range: ProbabilityRange,
    k: usize,
    rng: &mut SimRng,
) -> Result<IcInstance> {
    let pairs = nodes * nodes.saturating_sub(1);
    if edges > pairs {
        return Err(CmabError::InvalidParameter(format!(
            "{edges} edges do not fit in a simple digraph on {nodes} nodes"
        )));
    }
    let mut chosen = index::sample(rng, pairs, edges).into_vec();
    chosen.sort_unstable();
    let list: Vec<(usize, usize, f64)> = chosen
        .into_iter()
        .map(|code| {
            let u = code / (nodes - 1);
            let mut v = code % (nodes - 1);
            if v >= u {
                v += 1;
            }
            (u, v, range.draw(rng))
        })
        .collect();
    IcInstance::new(nodes, &list, k)
}

/// Linear-reward instance with `count` random super arms of `size` arms each
/// and weights drawn uniformly from `[0, max_weight]`.
pub fn random_linear(
    arms: usize,
    count: usize,
    size: usize,
    max_weight: f64,
    range: ProbabilityRange,
    rng: &mut SimRng,
) -> Result<LinearInstance> {
    if size == 0 || size > arms {
        return Err(CmabError::InvalidParameter(format!(
            "super-arm size {size} must lie in 1..={arms}"
        )));
    }
    if !(max_weight > 0.0) {
        return Err(CmabError::InvalidParameter(format!(
            "max weight must be positive, got {max_weight}"
        )));
    }
    let means = (0..arms).map(|_| range.draw(rng)).collect();
    let super_arms = (0..count)
        .map(|_| {
            let members = index::sample(rng, arms, size).into_vec();
            let weights = (0..size).map(|_| rng.random_range(0.0..=max_weight)).collect();
            (members, weights)
        })
        .collect();
    LinearInstance::new(means, super_arms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm_model::{validate_instance, Environment};
    use crate::rng;

    #[test]
    fn generated_instances_validate() {
        let mut r = rng::seeded(11);
        let range = ProbabilityRange::new(0.1, 0.9).unwrap();
        let pmc = random_pmc(5, 6, 0.5, range, 2, &mut r).unwrap();
        assert!(validate_instance(&pmc).is_empty());
        let ic = random_ic(6, 10, range, 1, &mut r).unwrap();
        assert_eq!(ic.num_arms(), 10);
        assert!(validate_instance(&ic).is_empty());
        let lin = random_linear(6, 8, 3, 2.0, range, &mut r).unwrap();
        assert!(validate_instance(&lin).is_empty());
    }

    #[test]
    fn same_seed_same_instance() {
        let range = ProbabilityRange::new(0.1, 0.9).unwrap();
        let a = random_ic(6, 10, range, 1, &mut rng::seeded(3)).unwrap();
        let b = random_ic(6, 10, range, 1, &mut rng::seeded(3)).unwrap();
        assert_eq!(a.true_means(), b.true_means());
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn too_many_edges_rejected() {
        let range = ProbabilityRange::new(0.5, 0.5).unwrap();
        assert!(random_ic(3, 7, range, 1, &mut rng::seeded(0)).is_err());
    }
}
