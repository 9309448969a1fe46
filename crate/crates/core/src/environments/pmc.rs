//! Probabilistic maximum coverage on a bipartite graph `(L, R, E)`.
//!
//! Base arms are edges; the super arm for a left-node set `S` with `|S| = k`
//! is `E_S`, all edges incident to `S`. A right node is covered when at least
//! one of its `E_S` edges fires.

use crate::arm_model::{
    Environment, ExpectationVector, Payload, PlayFeedback, SuperArm, SuperArmSpace, TriggeringSet, Violation,
};
use crate::combin;
use crate::environments::{bernoulli, Smoothness, EXPLICIT_SPACE_CAP};
use crate::error::{CmabError, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteEdge {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone)]
pub struct PmcInstance {
    left: usize,
    right: usize,
    k: usize,
    edges: Vec<BipartiteEdge>,
    means: ExpectationVector,
    /// Edge indices incident to each left node.
    incident: Vec<Vec<usize>>,
    space: SuperArmSpace,
}

impl PmcInstance {
    /// `edges` are `(left, right, probability)` triples; edge `i` is base arm `i`.
    pub fn new(left: usize, right: usize, edges: &[(usize, usize, f64)], k: usize) -> Result<Self> {
        if k == 0 || k > left {
            return Err(CmabError::InvalidParameter(format!(
                "budget k = {k} must lie in 1..={left}"
            )));
        }
        let mut incident = vec![Vec::new(); left];
        let mut list = Vec::with_capacity(edges.len());
        let mut means = Vec::with_capacity(edges.len());
        for (i, &(u, v, p)) in edges.iter().enumerate() {
            if u >= left || v >= right {
                return Err(CmabError::InvalidParameter(format!(
                    "edge {i} = ({u}, {v}) is outside the {left}x{right} bipartite graph"
                )));
            }
            incident[u].push(i);
            list.push(BipartiteEdge { left: u, right: v });
            means.push(p);
        }
        let mut inst = Self {
            left,
            right,
            k,
            edges: list,
            means: ExpectationVector::from_raw(means),
            incident,
            space: SuperArmSpace::Implicit {
                count: combin::binomial(left, k),
            },
        };
        if inst.space.count() <= EXPLICIT_SPACE_CAP {
            let arms = combin::k_subsets(left, k)
                .into_iter()
                .map(|nodes| inst.arm_for_nodes(nodes))
                .collect();
            inst.space = SuperArmSpace::Explicit(arms);
        }
        Ok(inst)
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn budget(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[BipartiteEdge] {
        &self.edges
    }

    pub fn incident(&self, left_node: usize) -> &[usize] {
        &self.incident[left_node]
    }

    /// Super arm `E_S` for a left-node set; the id is the colex rank of `S`.
    pub fn arm_for_nodes(&self, mut nodes: Vec<usize>) -> SuperArm {
        nodes.sort_unstable();
        let members = nodes.iter().flat_map(|&u| self.incident[u].iter().copied()).collect();
        SuperArm::new(combin::colex_rank(&nodes), members, Payload::Nodes(nodes))
    }

    /// Coverage probability `sum_v 1 - prod (1 - mu_e)` over the edges of `nodes`.
    pub fn coverage(&self, means: &ExpectationVector, nodes: &[usize]) -> f64 {
        let mut miss = vec![1.0; self.right];
        for &u in nodes {
            for &e in &self.incident[u] {
                miss[self.edges[e].right] *= 1.0 - means[e];
            }
        }
        miss.iter().map(|q| 1.0 - q).sum()
    }

    fn nodes_of(&self, arm: &SuperArm) -> Result<Vec<usize>> {
        let nodes = arm.nodes().ok_or(CmabError::UnknownSuperArm(arm.id))?;
        if nodes.len() != self.k || nodes.iter().any(|&u| u >= self.left) {
            return Err(CmabError::UnknownSuperArm(arm.id));
        }
        Ok(nodes.to_vec())
    }

    /// Rewards for a full world of edge outcomes; only `E_S` is read.
    pub fn reward_in_world(&self, arm: &SuperArm, world: &[bool]) -> f64 {
        let mut covered = vec![false; self.right];
        for &e in &arm.members {
            if world[e] {
                covered[self.edges[e].right] = true;
            }
        }
        covered.iter().filter(|&&c| c).count() as f64
    }

    #[doc(hidden)]
    pub fn space_mut(&mut self) -> &mut SuperArmSpace {
        &mut self.space
    }
}

impl Environment for PmcInstance {
    fn kind(&self) -> &'static str {
        "pmc"
    }

    fn num_arms(&self) -> usize {
        self.edges.len()
    }

    fn true_means(&self) -> &ExpectationVector {
        &self.means
    }

    fn space(&self) -> &SuperArmSpace {
        &self.space
    }

    fn super_arm(&self, id: usize) -> Result<SuperArm> {
        match &self.space {
            SuperArmSpace::Explicit(list) => list.get(id).cloned().ok_or(CmabError::UnknownSuperArm(id)),
            SuperArmSpace::Implicit { count } => {
                if (id as u128) < *count {
                    Ok(self.arm_for_nodes(combin::colex_unrank(id, self.k)))
                } else {
                    Err(CmabError::UnknownSuperArm(id))
                }
            }
        }
    }

    /// Draws the whole edge world, then reveals only `E_S`.
    fn play(&self, arm: &SuperArm, round: u64, rng: &mut SimRng) -> Result<PlayFeedback> {
        self.nodes_of(arm)?;
        let world: Vec<bool> = self.means.values().iter().map(|&p| bernoulli(rng, p)).collect();
        let outcomes = arm
            .members
            .iter()
            .map(|&e| (e, if world[e] { 1.0 } else { 0.0 }))
            .collect();
        Ok(PlayFeedback {
            round,
            super_arm: arm.id,
            outcomes,
            reward: self.reward_in_world(arm, &world),
        })
    }

    fn expected_reward(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<f64> {
        Ok(self.coverage(means, &self.nodes_of(arm)?))
    }

    fn triggering_set(&self, _means: &ExpectationVector, arm: &SuperArm) -> Result<TriggeringSet> {
        Ok(TriggeringSet::deterministic(arm))
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::linear(self.edges.len() as f64)
    }

    fn lowest_super_arm_reaching(&self, arm: usize) -> Result<usize> {
        let u = self.edges.get(arm).ok_or(CmabError::UntriggerableArm(arm))?.left;
        Ok(lowest_rank_containing(u, self.k))
    }

    /// Re-derives `E_S` from the graph for every listed super arm.
    fn extra_violations(&self) -> Vec<Violation> {
        let SuperArmSpace::Explicit(list) = &self.space else {
            return Vec::new();
        };
        list.iter()
            .filter_map(|s| {
                let Some(nodes) = s.nodes() else {
                    return Some(Violation::super_arm(s.id, "triggering set inconsistent"));
                };
                let mut expected: Vec<usize> = self
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| nodes.contains(&e.left))
                    .map(|(i, _)| i)
                    .collect();
                expected.sort_unstable();
                (expected != s.members || nodes.len() != self.k)
                    .then(|| Violation::super_arm(s.id, "triggering set inconsistent"))
            })
            .collect()
    }
}

/// Colex-lowest `k`-subset that contains `node`.
pub(crate) fn lowest_rank_containing(node: usize, k: usize) -> usize {
    if node < k {
        0
    } else {
        let mut set: Vec<usize> = (0..k - 1).collect();
        set.push(node);
        combin::colex_rank(&set)
    }
}
