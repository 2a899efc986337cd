//! The matrix sum problem: find `b in Z_p^k` with `sum_j Phi^(b_j)^(x_j) = w`.

mod dlog;
mod instance;
mod solver;
mod stats;

pub use dlog::discrete_log_bsgs;
pub use instance::{elem_from_json, elem_to_json, MSumInstanceJson};
pub use instance::{MSumInstance, SolutionSet};
pub use solver::{
    solve_auto, solve_bruteforce, solve_heisenberg_closed_form, solve_jordan, solve_metacyclic_dlog, MSumSolver,
    SolverKind,
};
pub use stats::{
    eta_statistics, eta_statistics_filtered, ratio_f64, x_from_index, x_index, EtaStats, EtaTable, Population,
};

/// Default cap on `p^k` for enumeration.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;
/// Default cap on `|A|^(k+1)` for exhaustive statistics.
pub const DEFAULT_POPULATION_CAP: u128 = 100_000_000;
