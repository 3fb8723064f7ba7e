//! Monte Carlo harness, bound arithmetic, count checks, search and the CLI.

mod bounds;
pub mod cli;
mod monte_carlo;
mod search;

pub use bounds::{
    compute_bounds, format_sci, global_bound_exact, rho_lower, verify_counts, BoundsReport, CountsReport,
};
pub use monte_carlo::{monte_carlo, monte_carlo_range, trial_seed, RunRecord, TrialContext, TrialStats};
pub use search::{search_nonoverlapping, SearchBudget, SearchHit, Strategy, SPOKE_WEIGHT};
