//! Domains, Dirichlet eigensystems of the killed generator and the series
//! solutions built on them.

pub mod domain;
pub mod eigen;
pub mod solution;

pub use domain::Domain;
pub use eigen::{eigensystem_analytic, eigensystem_numeric_1d, weyl_slope, EigenSystem, Eigenfunctions};
pub use solution::{
    killed_heat_kernel, project, project_with_norm, solve_spectral, solve_subordination, Evaluation, SpectralSolution,
    SubordinationRule,
};
