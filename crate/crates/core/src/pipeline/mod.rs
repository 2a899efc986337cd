//! The reduction to trivial-or-cyclic hidden subgroups and the end-to-end solve.

mod oracle;
mod reduction;
mod run;
mod subgroup;

pub use oracle::{CosetOracle, HiddenSpec, HidingFunction, OracleFixture};
pub use reduction::{
    abelian_hsp_solve, check_h1_normal, detect_trivial_vs_order_p, lift_subgroup, quotient_well_defined,
    reduce_to_cyclic, Quotient, QuotientOracle, Reduction, ReductionSummary,
};
pub use run::{default_trials, outcome_distribution, run_pgm_hsp, solve_hsp, HspRun, HspSolution, TrialRecord};
pub use subgroup::{closure, order_p_cyclic_subgroups, SubgroupDescription};
