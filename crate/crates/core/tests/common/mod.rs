#![allow(dead_code)]

use cmab_core::arm_model::ExpectationVector;
use cmab_core::environments::generate::{random_ic, random_pmc, ProbabilityRange};
use cmab_core::environments::{IcInstance, PmcInstance};
use cmab_core::rng::{self, SimRng};
use rand::Rng;

pub fn rng(seed: u64) -> SimRng {
    rng::seeded(seed)
}

pub fn range(low: f64, high: f64) -> ProbabilityRange {
    ProbabilityRange::new(low, high).unwrap()
}

pub fn pmc(seed: u64, left: usize, right: usize, density: f64, k: usize) -> PmcInstance {
    random_pmc(left, right, density, range(0.1, 0.9), k, &mut rng(seed)).unwrap()
}

pub fn ic(seed: u64, nodes: usize, edges: usize, k: usize) -> IcInstance {
    random_ic(nodes, edges, range(0.1, 0.9), k, &mut rng(seed)).unwrap()
}

pub fn uniform_means(len: usize, r: &mut SimRng) -> ExpectationVector {
    ExpectationVector::new((0..len).map(|_| r.random::<f64>()).collect()).unwrap()
}

/// Mean and the 3-sigma half-width of a sample of `n` values.
pub fn three_sigma(sum: f64, sum_sq: f64, n: f64) -> (f64, f64) {
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (mean, 3.0 * (var / n).sqrt())
}

/// Brute-force influence quantities: enumerates every outcome of every
/// edge and runs a depth-first reachability per world. Returns the
/// expected number of active nodes and the activation probability of
/// every node.
pub fn brute_force_ic(nodes: usize, edges: &[(usize, usize)], means: &[f64], seeds: &[usize]) -> (f64, Vec<f64>) {
    let mut active_prob = vec![0.0; nodes];
    for mask in 0u64..(1 << edges.len()) {
        let mut w = 1.0;
        for (e, &p) in means.iter().enumerate() {
            w *= if mask >> e & 1 == 1 { p } else { 1.0 - p };
        }
        if w == 0.0 {
            continue;
        }
        let mut on = vec![false; nodes];
        let mut stack: Vec<usize> = seeds.to_vec();
        for &s in seeds {
            on[s] = true;
        }
        while let Some(u) = stack.pop() {
            for (e, &(a, b)) in edges.iter().enumerate() {
                if a == u && mask >> e & 1 == 1 && !on[b] {
                    on[b] = true;
                    stack.push(b);
                }
            }
        }
        for v in 0..nodes {
            if on[v] {
                active_prob[v] += w;
            }
        }
    }
    (active_prob.iter().sum(), active_prob)
}

pub fn edge_pairs(ic: &IcInstance) -> Vec<(usize, usize)> {
    ic.edges().iter().map(|e| (e.source, e.target)).collect()
}

/// Coverage reward computed straight from the bipartite edge list.
pub fn brute_force_coverage(pmc: &PmcInstance, means: &[f64], nodes: &[usize]) -> f64 {
    (0..pmc.right())
        .map(|v| {
            let miss: f64 = pmc
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.right == v && nodes.contains(&e.left))
                .map(|(i, _)| 1.0 - means[i])
                .product();
            1.0 - miss
        })
        .sum()
}
