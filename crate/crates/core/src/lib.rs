//! Generalized Orlicz (Musielak–Orlicz) norm machinery and supremal
//! functionals on box grids.
//!
//! The crate is `no_std` with `alloc`. Everything here is a pure
//! computation on immutable values; IO, configuration and report files live
//! in the `orlicz` companion crate.
//!
//! Module map:
//!
//! * [`phi`]: catalog of generalized weak Φ-functions and hypothesis checkers.
//! * [`domain`]: grids, nodal fields, forward-difference gradients, quadrature.
//! * [`norms`]: modulars, Luxemburg norms and inequality verifiers.
//! * [`envelope`]: scalar convex envelopes and the limit density `Q∞f`.
//! * [`supremal`]: energies, Dirichlet minimization and Γ-experiments.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod domain;
pub mod envelope;
mod error;
pub(crate) mod math;
pub mod norms;
pub mod phi;
pub mod report;
pub mod supremal;

pub use domain::{GradientField, Grid, GridFunction};
pub use envelope::{EnvelopeResult, SampledDensity};
pub use error::{Error, Result};
pub use norms::{ModularValue, NormValue};
pub use phi::{Coefficient, ExponentSequence, Hypotheses, OrliczPreset, PhiFunction, PhiKind};
pub use report::Assertion;
pub use supremal::{
    DirichletProblem, EnergyFunctional, EnergyKind, Integrand, IntegrandKind, MinimizeOptions,
};

/// Default absolute slack for inequality checks: `1e-12 · (1 + |rhs|)`.
pub fn default_slack(rhs: f64) -> f64 {
    1e-12 * (1.0 + libm::fabs(rhs))
}
