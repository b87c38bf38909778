//! Supremal and generalized Orlicz energies of grid fields, Dirichlet
//! minimization, and Γ-convergence experiments along exponent ladders.

mod banded;
pub mod energy;
pub mod experiments;
pub mod integrand;
pub mod minimize;

pub use energy::{EnergyFunctional, EnergyKind, DEFAULT_TOL_FEAS};
pub use experiments::{
    a0_check, gamma_experiment_modular, gamma_experiment_norm, ladder_checks, norm_oracle,
    preflight, Framework, GammaOptions, LimitOracle, ModularOptions, ModularVariant,
    PreflightParams,
};
pub use integrand::{check_growth, GrowthReport, Integrand, IntegrandKind};
pub use minimize::{minimize, DirichletProblem, InitialGuess, MinimizeOptions, MinimizeResult};
