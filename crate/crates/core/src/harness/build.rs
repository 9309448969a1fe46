//! Turns configuration specs into instances, oracles and policies.

use crate::analysis::GapProfile;
use crate::arm_model::Environment;
use crate::environments::generate::{random_ic, random_linear, random_pmc, ProbabilityRange};
use crate::environments::{ClassicalMab, IcInstance, Instance, LinearInstance, PmcInstance};
use crate::error::{CmabError, Result};
use crate::harness::config::{ClusterSpec, InstanceSpec, OracleKind, OracleSpec, PolicySpec};
use crate::oracles::{BetaFailureWrapper, ExactOracle, GreedyImOracle, GreedyPmcOracle, LinearOracle, Oracle};
use crate::policies::{
    eps_greedy_gamma, ClusterScheme, ClusteredCucb, Cucb, EpsGreedy, ExplorationRule, Policy, Ucb1Improved,
    UniformRandom,
};
use crate::rng;

fn missing(what: &str) -> CmabError {
    CmabError::Config(format!("missing {what}"))
}

pub fn build_instance(spec: &InstanceSpec) -> Result<Instance> {
    Ok(match spec {
        InstanceSpec::Classical { means } => ClassicalMab::new(means.clone()).into(),
        InstanceSpec::Pmc {
            left,
            right,
            budget,
            edges,
            generate,
        } => match generate {
            Some(g) => {
                let range = ProbabilityRange::new(g.p_low, g.p_high)?;
                let density = g.density.unwrap_or(1.0);
                random_pmc(*left, *right, density, range, *budget, &mut rng::seeded(g.seed))?.into()
            }
            None => PmcInstance::new(*left, *right, edges, *budget)?.into(),
        },
        InstanceSpec::Linear {
            means,
            super_arms,
            top_k,
            arms,
            generate,
        } => match (generate, top_k) {
            (Some(g), _) => {
                let range = ProbabilityRange::new(g.p_low, g.p_high)?;
                let m = arms.ok_or_else(|| missing("instance.arms"))?;
                let count = g.count.ok_or_else(|| missing("instance.generate.count"))?;
                let size = g.size.ok_or_else(|| missing("instance.generate.size"))?;
                let weight = g.max_weight.unwrap_or(1.0);
                random_linear(m, count, size, weight, range, &mut rng::seeded(g.seed))?.into()
            }
            (None, Some(k)) => LinearInstance::top_k(means.clone(), *k)?.into(),
            (None, None) => LinearInstance::new(
                means.clone(),
                super_arms
                    .iter()
                    .map(|s| (s.members.clone(), s.weights.clone()))
                    .collect(),
            )?
            .into(),
        },
        InstanceSpec::Ic {
            nodes,
            budget,
            edges,
            exact_cap,
            generate,
        } => {
            let ic = match generate {
                Some(g) => {
                    let range = ProbabilityRange::new(g.p_low, g.p_high)?;
                    let count = g.count.ok_or_else(|| missing("instance.generate.count"))?;
                    random_ic(*nodes, count, range, *budget, &mut rng::seeded(g.seed))?
                }
                None => IcInstance::new(*nodes, edges, *budget)?,
            };
            match exact_cap {
                Some(cap) => ic.with_exact_cap(*cap),
                None => ic,
            }
            .into()
        }
        InstanceSpec::File { path } => {
            return Err(CmabError::Config(format!(
                "instance file {} was not resolved; load the config from disk",
                path.display()
            )))
        }
    })
}

pub fn build_oracle(spec: &OracleSpec, instance: &Instance) -> Result<Box<dyn Oracle>> {
    let kind = match (spec.kind, instance) {
        (OracleKind::Auto, Instance::Classical(_)) => OracleKind::Exact,
        (OracleKind::Auto, Instance::Linear(_)) => OracleKind::Linear,
        (OracleKind::Auto, Instance::Pmc(_)) => OracleKind::GreedyPmc,
        (OracleKind::Auto, Instance::Ic(_)) => OracleKind::GreedyIm,
        (k, _) => k,
    };
    let inner: Box<dyn Oracle> = match kind {
        OracleKind::Exact => Box::new(ExactOracle),
        OracleKind::Linear => Box::new(LinearOracle),
        OracleKind::GreedyPmc => Box::new(GreedyPmcOracle),
        OracleKind::GreedyIm => {
            let Instance::Ic(ic) = instance else {
                return Err(CmabError::UnsupportedInstance {
                    oracle: "greedy_im".into(),
                    instance: instance.kind().into(),
                });
            };
            Box::new(GreedyImOracle::new(ic, spec.sims, spec.epsilon)?)
        }
        OracleKind::Auto => unreachable!("resolved above"),
    };
    Ok(match spec.beta_override {
        Some(beta) => Box::new(BetaFailureWrapper::new(inner, beta, spec.failure_mode)?),
        None => inner,
    })
}

pub fn build_clusters(spec: &ClusterSpec, instance: &Instance) -> Result<ClusterScheme> {
    match (spec, instance) {
        (ClusterSpec::Explicit(c), _) => ClusterScheme::new(c.clone(), instance),
        (ClusterSpec::Named(n), _) if n == "singletons" => ClusterScheme::singletons(instance),
        (ClusterSpec::Named(n), Instance::Pmc(pmc)) if n == "per_left_node" => ClusterScheme::per_left_node(pmc),
        (ClusterSpec::Named(n), Instance::Ic(ic)) if n == "per_source_node" => ClusterScheme::per_source_node(ic),
        (ClusterSpec::Named(n), _) => Err(CmabError::Config(format!(
            "cluster scheme {n:?} does not apply to {} instances",
            instance.kind()
        ))),
    }
}

/// Exploration constant of epsilon-greedy; needs the gap profile unless given.
pub fn eps_gamma(spec: &PolicySpec, instance: &Instance, profile: Option<&GapProfile>) -> Result<Option<f64>> {
    let PolicySpec::EpsGreedy { gamma, c } = spec else {
        return Ok(None);
    };
    if let Some(g) = gamma {
        return Ok(Some(*g));
    }
    let profile = profile.ok_or_else(|| missing("policy.gamma (no gap profile available)"))?;
    if profile.delta_min <= 0.0 {
        return Err(CmabError::Config(
            "policy.gamma cannot be derived without bad super arms".into(),
        ));
    }
    eps_greedy_gamma(*c, instance.num_arms(), &instance.smoothness(), profile.delta_min).map(Some)
}

pub fn build_policy(
    spec: &PolicySpec,
    instance: &Instance,
    clusters: Option<&ClusterScheme>,
    gamma: Option<f64>,
) -> Result<Box<dyn Policy>> {
    let m = instance.num_arms();
    Ok(match spec {
        PolicySpec::Cucb { exploration, loglog } => {
            let rule = if *loglog {
                ExplorationRule::LogLog
            } else {
                ExplorationRule::LogScaled {
                    coefficient: *exploration,
                }
            };
            Box::new(Cucb::with_rule(m, rule))
        }
        PolicySpec::ClusteredCucb { .. } => {
            let scheme = clusters.ok_or_else(|| missing("cluster scheme"))?;
            Box::new(ClusteredCucb::new(m, scheme)?)
        }
        PolicySpec::EpsGreedy { .. } => Box::new(EpsGreedy::new(m, gamma.ok_or_else(|| missing("policy.gamma"))?)?),
        PolicySpec::Ucb1Improved { c } => Box::new(Ucb1Improved::new(m, *c)?),
        PolicySpec::Uniform => Box::new(UniformRandom::new(m)),
    })
}
