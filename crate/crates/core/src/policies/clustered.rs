use crate::arm_model::{Environment, OracleResult, PlayFeedback};
use crate::environments::{IcInstance, Instance, PmcInstance};
use crate::error::{CmabError, Result};
use crate::oracles::Oracle;
use crate::policies::{ArmEstimates, Cucb, Policy};
use crate::rng::SimRng;

/// Clusters of base arms that are always played together. Every super arm
/// of the instance must be exactly the union of the clusters it contains.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterScheme {
    clusters: Vec<Vec<usize>>,
    /// `g(S)` for every super arm, indexed by super-arm id.
    groups: Vec<Vec<usize>>,
}

impl ClusterScheme {
    pub fn new(mut clusters: Vec<Vec<usize>>, env: &dyn Environment) -> Result<Self> {
        let list = env.space().explicit()?;
        for (c, cluster) in clusters.iter_mut().enumerate() {
            cluster.sort_unstable();
            cluster.dedup();
            if cluster.is_empty() {
                return Err(CmabError::InvalidParameter(format!("cluster {c} is empty")));
            }
        }
        let mut groups = vec![Vec::new(); list.len()];
        for s in list {
            let g: Vec<usize> = (0..clusters.len())
                .filter(|&c| clusters[c].iter().all(|&i| s.contains(i)))
                .collect();
            let covered = s
                .members
                .iter()
                .all(|&i| g.iter().any(|&c| clusters[c].binary_search(&i).is_ok()));
            if !covered {
                return Err(CmabError::InvalidParameter(format!(
                    "super arm {} is not a union of clusters",
                    s.id
                )));
            }
            groups[s.id] = g;
        }
        Ok(Self { clusters, groups })
    }

    /// One cluster per arm.
    pub fn singletons(env: &dyn Environment) -> Result<Self> {
        Self::new((0..env.num_arms()).map(|i| vec![i]).collect(), env)
    }

    /// PMC: the edges incident to each left node (nodes without edges are skipped).
    pub fn per_left_node(pmc: &PmcInstance) -> Result<Self> {
        let clusters = (0..pmc.left())
            .map(|u| pmc.incident(u).to_vec())
            .filter(|c| !c.is_empty())
            .collect();
        Self::new(clusters, pmc)
    }

    /// Influence maximization: the outgoing edges of each node.
    pub fn per_source_node(ic: &IcInstance) -> Result<Self> {
        let mut clusters = vec![Vec::new(); ic.num_nodes()];
        for (e, edge) in ic.edges().iter().enumerate() {
            clusters[edge.source].push(e);
        }
        clusters.retain(|c| !c.is_empty());
        Self::new(clusters, ic)
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// `g(S)` for super arm `id`.
    pub fn groups(&self, id: usize) -> &[usize] {
        self.groups.get(id).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Initialization schedule: for each cluster in order, the lowest-id super
/// arm that contains it.
pub fn clustered_init_schedule(scheme: &ClusterScheme) -> Result<Vec<usize>> {
    (0..scheme.len())
        .map(|c| {
            scheme
                .groups
                .iter()
                .position(|g| g.contains(&c))
                .ok_or(CmabError::UncoverableCluster(c))
        })
        .collect()
}

/// CUCB preceded by one initialization round per cluster.
#[derive(Debug, Clone)]
pub struct ClusteredCucb {
    cucb: Cucb,
    schedule: Vec<usize>,
}

impl ClusteredCucb {
    pub fn new(arms: usize, scheme: &ClusterScheme) -> Result<Self> {
        Ok(Self {
            cucb: Cucb::new(arms),
            schedule: clustered_init_schedule(scheme)?,
        })
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }
}

impl Policy for ClusteredCucb {
    fn name(&self) -> String {
        "clustered-cucb".into()
    }

    fn select(&mut self, instance: &Instance, oracle: &dyn Oracle, rng: &mut SimRng) -> Result<OracleResult> {
        if (self.cucb.round() as usize) < self.schedule.len() {
            let t = self.cucb.begin_round();
            let id = self.schedule[t as usize - 1];
            return Ok(OracleResult::approx(instance.super_arm(id)?));
        }
        self.cucb.select(instance, oracle, rng)
    }

    fn update(&mut self, feedback: &PlayFeedback) -> Result<()> {
        self.cucb.update(feedback)
    }

    fn round(&self) -> u64 {
        self.cucb.round()
    }

    fn estimates(&self) -> &ArmEstimates {
        self.cucb.estimates()
    }
}
