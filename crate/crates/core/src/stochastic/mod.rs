//! Monte Carlo for the killed stable process under the inverse stable time change.

mod mc;
mod paths;
mod rng;
mod sampling;

pub use mc::{default_dt, mc_bias, mc_solution, mc_solution_with, McBias, McEstimate, McOptions, PathRecord};
pub use paths::{simulate_coupled_path, simulate_killed_path, CoupledOutcome, PathOutcome};
pub use rng::RngStream;
pub use sampling::{sample_inverse_subordinator, sample_one_sided_stable, sample_stable_increment};
