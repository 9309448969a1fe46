//! Influence maximization under the independent cascade model.
//!
//! Base arms are directed edges with influence probabilities. The super arm
//! for seed set `S` is `E_S`, the outgoing edges of `S`. Playing it runs one
//! cascade: every edge whose source becomes active is triggered, reveals its
//! Bernoulli outcome and, on success, activates its target. The reward is
//! the number of active nodes at the end, seeds included.

use std::collections::VecDeque;

use crate::arm_model::{Environment, ExpectationVector, Payload, PlayFeedback, SuperArm, SuperArmSpace, TriggeringSet};
use crate::combin;
use crate::environments::pmc::lowest_rank_containing;
use crate::environments::{bernoulli, Smoothness, EXPLICIT_SPACE_CAP};
use crate::error::{CmabError, Result};
use crate::rng::SimRng;

/// Default cap on the number of random edges enumerated exactly (2^18 worlds).
pub const DEFAULT_EXACT_CAP: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub source: usize,
    pub target: usize,
}

/// How spread and triggering probabilities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpreadMode {
    Exact,
    MonteCarlo { samples: u64 },
}

/// A Monte-Carlo or exact spread value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadEstimate {
    pub mean: f64,
    /// Zero for exact evaluations.
    pub std_error: f64,
}

#[derive(Debug, Clone)]
pub struct IcInstance {
    nodes: usize,
    k: usize,
    edges: Vec<DirectedEdge>,
    means: ExpectationVector,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    space: SuperArmSpace,
    exact_cap: usize,
}

impl IcInstance {
    /// `edges` are `(source, target, probability)`; edge `i` is base arm `i`.
    pub fn new(nodes: usize, edges: &[(usize, usize, f64)], k: usize) -> Result<Self> {
        if k == 0 || k > nodes {
            return Err(CmabError::InvalidParameter(format!(
                "seed budget k = {k} must lie in 1..={nodes}"
            )));
        }
        let mut out_edges = vec![Vec::new(); nodes];
        let mut in_edges = vec![Vec::new(); nodes];
        let mut list = Vec::with_capacity(edges.len());
        let mut means = Vec::with_capacity(edges.len());
        for (i, &(u, v, p)) in edges.iter().enumerate() {
            if u >= nodes || v >= nodes || u == v {
                return Err(CmabError::InvalidParameter(format!(
                    "edge {i} = ({u}, {v}) is not a valid edge on {nodes} nodes"
                )));
            }
            out_edges[u].push(i);
            in_edges[v].push(i);
            list.push(DirectedEdge { source: u, target: v });
            means.push(p);
        }
        let mut inst = Self {
            nodes,
            k,
            edges: list,
            means: ExpectationVector::from_raw(means),
            out_edges,
            in_edges,
            space: SuperArmSpace::Implicit {
                count: combin::binomial(nodes, k),
            },
            exact_cap: DEFAULT_EXACT_CAP,
        };
        if inst.space.count() <= EXPLICIT_SPACE_CAP {
            let arms = combin::k_subsets(nodes, k)
                .into_iter()
                .map(|s| inst.arm_for_seeds(s))
                .collect();
            inst.space = SuperArmSpace::Explicit(arms);
        }
        Ok(inst)
    }

    pub fn with_exact_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap;
        self
    }

    pub fn exact_cap(&self) -> usize {
        self.exact_cap
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn budget(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    /// Super arm `E_S` for a seed set; the id is the colex rank of `S`.
    pub fn arm_for_seeds(&self, mut seeds: Vec<usize>) -> SuperArm {
        seeds.sort_unstable();
        let members = seeds.iter().flat_map(|&u| self.out_edges[u].iter().copied()).collect();
        SuperArm::new(combin::colex_rank(&seeds), members, Payload::Nodes(seeds))
    }

    fn seeds_of<'a>(&self, arm: &'a SuperArm) -> Result<&'a [usize]> {
        let seeds = arm.nodes().ok_or(CmabError::UnknownSuperArm(arm.id))?;
        if seeds.len() != self.k || seeds.iter().any(|&u| u >= self.nodes) {
            return Err(CmabError::UnknownSuperArm(arm.id));
        }
        Ok(seeds)
    }

    /// Nodes reachable from `seeds` along any edge, seeds included.
    pub fn reachable_nodes(&self, seeds: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.nodes];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in seeds {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &e in &self.out_edges[u] {
                let v = self.edges[e].target;
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Edges whose source is reachable from `seeds`, sorted.
    pub fn reachable_edges(&self, seeds: &[usize]) -> Vec<usize> {
        let seen = self.reachable_nodes(seeds);
        (0..self.edges.len()).filter(|&e| seen[self.edges[e].source]).collect()
    }

    /// Runs the cascade in a fixed world of edge outcomes. Returns the active
    /// node mask; an edge is triggered iff its source is active.
    pub fn cascade_in_world(&self, seeds: &[usize], world: &[bool]) -> Vec<bool> {
        let mut active = vec![false; self.nodes];
        let mut queue = VecDeque::new();
        for &s in seeds {
            if !active[s] {
                active[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &e in &self.out_edges[u] {
                let v = self.edges[e].target;
                if world[e] && !active[v] {
                    active[v] = true;
                    queue.push_back(v);
                }
            }
        }
        active
    }

    /// Feedback for a fixed world: triggered edges with their outcomes.
    pub fn feedback_in_world(&self, arm: &SuperArm, round: u64, world: &[bool]) -> Result<PlayFeedback> {
        let seeds = self.seeds_of(arm)?;
        let active = self.cascade_in_world(seeds, world);
        let outcomes = (0..self.edges.len())
            .filter(|&e| active[self.edges[e].source])
            .map(|e| (e, if world[e] { 1.0 } else { 0.0 }))
            .collect();
        Ok(PlayFeedback {
            round,
            super_arm: arm.id,
            outcomes,
            reward: active.iter().filter(|&&a| a).count() as f64,
        })
    }

    /// One cascade under `means`, drawing only edges that get triggered.
    pub fn sample_spread(&self, means: &ExpectationVector, seeds: &[usize], rng: &mut SimRng) -> usize {
        let mut active = vec![false; self.nodes];
        let mut queue = VecDeque::new();
        let mut count = 0;
        for &s in seeds {
            if !active[s] {
                active[s] = true;
                count += 1;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &e in &self.out_edges[u] {
                let v = self.edges[e].target;
                if bernoulli(rng, means[e]) && !active[v] {
                    active[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count
    }

    /// Activation probability of every node, by exhaustive enumeration of the
    /// outcomes of reachable edges with means strictly inside `(0, 1)`.
    pub fn activation_probabilities(&self, means: &ExpectationVector, seeds: &[usize]) -> Result<Vec<f64>> {
        let relevant = self.reachable_edges(seeds);
        let random: Vec<usize> = relevant
            .iter()
            .copied()
            .filter(|&e| means[e] > 0.0 && means[e] < 1.0)
            .collect();
        if random.len() > self.exact_cap {
            return Err(CmabError::EnumerationCap {
                edges: random.len(),
                cap: self.exact_cap,
            });
        }
        let mut world: Vec<bool> = (0..self.edges.len()).map(|e| means[e] >= 1.0).collect();
        let mut prob = vec![0.0; self.nodes];
        for mask in 0u64..(1u64 << random.len()) {
            let mut weight = 1.0;
            for (bit, &e) in random.iter().enumerate() {
                let live = mask >> bit & 1 == 1;
                world[e] = live;
                weight *= if live { means[e] } else { 1.0 - means[e] };
            }
            for (v, a) in self.cascade_in_world(seeds, &world).into_iter().enumerate() {
                if a {
                    prob[v] += weight;
                }
            }
        }
        Ok(prob)
    }

    /// Influence spread of `seeds` under `means`.
    pub fn spread(
        &self,
        means: &ExpectationVector,
        seeds: &[usize],
        mode: SpreadMode,
        rng: &mut SimRng,
    ) -> Result<SpreadEstimate> {
        match mode {
            SpreadMode::Exact => Ok(SpreadEstimate {
                mean: self.activation_probabilities(means, seeds)?.iter().sum(),
                std_error: 0.0,
            }),
            SpreadMode::MonteCarlo { samples } => {
                if samples == 0 {
                    return Err(CmabError::InvalidParameter(
                        "Monte-Carlo needs at least one sample".into(),
                    ));
                }
                let (mut sum, mut sum_sq) = (0.0, 0.0);
                for _ in 0..samples {
                    let x = self.sample_spread(means, seeds, rng) as f64;
                    sum += x;
                    sum_sq += x * x;
                }
                let n = samples as f64;
                let mean = sum / n;
                let var = if samples > 1 {
                    ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
                } else {
                    0.0
                };
                Ok(SpreadEstimate {
                    mean,
                    std_error: (var / n).sqrt(),
                })
            }
        }
    }

    /// Trigger probabilities `p_e^S`: the chance that the source of `e` is
    /// activated. Zero-probability edges are left out.
    pub fn trigger_probabilities(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<TriggeringSet> {
        let seeds = self.seeds_of(arm)?;
        let active = self.activation_probabilities(means, seeds)?;
        let mut ts = TriggeringSet {
            super_arm: arm.id,
            probabilities: Default::default(),
        };
        for (e, edge) in self.edges.iter().enumerate() {
            let p = if seeds.contains(&edge.source) {
                1.0
            } else {
                active[edge.source].min(1.0)
            };
            if p > 0.0 {
                ts.probabilities.insert(e, p);
            }
        }
        Ok(ts)
    }

    /// Nodes that can reach `node`, `node` included.
    fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes];
        let mut queue = VecDeque::from([node]);
        seen[node] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.in_edges[v] {
                let u = self.edges[e].source;
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        (0..self.nodes).filter(|&u| seen[u]).collect()
    }
}

impl Environment for IcInstance {
    fn kind(&self) -> &'static str {
        "ic"
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
            SuperArmSpace::Implicit { count } if (id as u128) < *count => {
                Ok(self.arm_for_seeds(combin::colex_unrank(id, self.k)))
            }
            SuperArmSpace::Implicit { .. } => Err(CmabError::UnknownSuperArm(id)),
        }
    }

    /// Draws a full world of edge outcomes in edge order, then reveals the
    /// triggered part of it.
    fn play(&self, arm: &SuperArm, round: u64, rng: &mut SimRng) -> Result<PlayFeedback> {
        let world: Vec<bool> = self.means.values().iter().map(|&p| bernoulli(rng, p)).collect();
        self.feedback_in_world(arm, round, &world)
    }

    fn expected_reward(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<f64> {
        let seeds = self.seeds_of(arm)?;
        Ok(self.activation_probabilities(means, seeds)?.iter().sum())
    }

    fn triggering_set(&self, means: &ExpectationVector, arm: &SuperArm) -> Result<TriggeringSet> {
        self.trigger_probabilities(means, arm)
    }

    fn reachable_arms(&self, arm: &SuperArm) -> Vec<usize> {
        match arm.nodes() {
            Some(seeds) => self.reachable_edges(seeds),
            None => arm.members.clone(),
        }
    }

    /// `f(x) = |E| |V| x`.
    fn smoothness(&self) -> Smoothness {
        Smoothness::linear((self.edges.len() * self.nodes) as f64)
    }

    fn lowest_super_arm_reaching(&self, arm: usize) -> Result<usize> {
        let source = self.edges.get(arm).ok_or(CmabError::UntriggerableArm(arm))?.source;
        let first = self.ancestors(source)[0];
        Ok(lowest_rank_containing(first, self.k))
    }
}
