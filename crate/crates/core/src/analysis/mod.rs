//! Ground-truth quantities, regret bounds and tail inequalities.

pub mod bounds;
mod gap;
mod ledger;
pub mod quadrature;
mod tails;
mod zeta;

pub use bounds::{
    classical_bound, classical_gaps, clustered_bound, epsgreedy_bound, im_bound, im_independent_bound, linear_bound,
    linear_independent_bound, pmc_bound, pmc_independent_bound, sampling_threshold, theorem1_bound,
    theorem1_bound_with, theorem2_bound, theorem2_from_profile, ucb1_improved_bound, BoundReport, BoundTerm,
    Integration,
};
pub use gap::{
    compute_cluster_profile, compute_gap_profile, ArmGap, ClusterGap, ClusterProfile, GapProfile, SuperArmGap,
};
pub use ledger::RegretLedger;
pub use tails::{bernstein_tail, chernoff_tail, hoeffding_tail};
pub use zeta::zeta;
