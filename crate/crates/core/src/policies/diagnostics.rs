//! Analysis-only bookkeeping: bad-round counters and the nice-run event.
//! These need the true means and a gap profile, so policies never read them.

use serde::Serialize;

use crate::analysis::GapProfile;
use crate::policies::{ArmEstimates, ClusterScheme};

/// Counters `N_i` (and optionally `N_C`) for bad rounds.
///
/// In a bad round exactly one arm counter is incremented: the arm of the
/// played triggering set minimizing `N_j * p_j`, lowest index on ties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub counters: Vec<u64>,
    pub cluster_counters: Vec<u64>,
    pub bad_rounds: u64,
    pub nice_failures: u64,
}

impl Diagnostics {
    pub fn new(arms: usize, clusters: usize) -> Self {
        Self {
            counters: vec![0; arms],
            cluster_counters: vec![0; clusters],
            bad_rounds: 0,
            nice_failures: 0,
        }
    }

    /// Records the super arm played this round. Returns the arm whose counter
    /// moved, if the round was bad.
    pub fn record_play(
        &mut self,
        played: usize,
        profile: &GapProfile,
        clusters: Option<&ClusterScheme>,
    ) -> Option<usize> {
        if !profile.is_bad(played) {
            return None;
        }
        self.bad_rounds += 1;
        let mut best: Option<(usize, f64)> = None;
        for &j in profile.triggering_arms(played) {
            let score = self.counters[j] as f64 * profile.trigger_min(j).unwrap_or(1.0);
            if best.is_none_or(|(_, s)| score < s) {
                best = Some((j, score));
            }
        }
        let (arm, _) = best?;
        self.counters[arm] += 1;
        if let Some(scheme) = clusters {
            if let Some(&c) = scheme
                .groups(played)
                .iter()
                .min_by_key(|&&c| (self.cluster_counters[c], c))
            {
                self.cluster_counters[c] += 1;
            }
        }
        Some(arm)
    }

    pub fn record_nice(&mut self, nice: &NiceRun) {
        if !nice.nice {
            self.nice_failures += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NiceRun {
    pub nice: bool,
    pub deviations: Vec<f64>,
    pub radii: Vec<f64>,
}

/// Nice-run event at round `t`: every `|mean_i - mu_i|` is within
/// `min(sqrt(3 ln t / (2 T_i)), 1)`, using the counts before round `t`.
pub fn nice_run_check(estimates: &ArmEstimates, t: u64, true_means: &[f64]) -> NiceRun {
    let ln_t = (t as f64).ln();
    let mut nice = true;
    let mut deviations = Vec::with_capacity(true_means.len());
    let mut radii = Vec::with_capacity(true_means.len());
    for (i, &mu) in true_means.iter().enumerate() {
        let radius = match estimates.count(i) {
            0 => 1.0,
            c => (3.0 * ln_t / (2.0 * c as f64)).sqrt().min(1.0),
        };
        let dev = (estimates.mean(i) - mu).abs();
        nice &= dev <= radius;
        deviations.push(dev);
        radii.push(radius);
    }
    NiceRun {
        nice,
        deviations,
        radii,
    }
}
