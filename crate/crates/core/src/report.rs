//! Plain result tables returned by the experiment drivers. Serialization
//! lives in the companion crate.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::domain::GridFunction;

/// One named pass/fail line of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Assertion {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

pub fn all_pass(assertions: &[Assertion]) -> bool {
    assertions.iter().all(|a| a.pass)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormRow {
    pub n: usize,
    pub p_minus: f64,
    pub p_plus: f64,
    pub norm: f64,
    /// Bracket width of the norm's root search.
    pub achieved_tol: f64,
    pub sup_norm: f64,
    pub gap: f64,
    pub embedding_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormConvergenceReport {
    pub rows: Vec<NormRow>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaRow {
    pub n: usize,
    pub p_minus: f64,
    pub p_plus: f64,
    pub min_value: f64,
    pub oracle_value: Option<f64>,
    pub value_gap: Option<f64>,
    pub minimizer_l1_gap: Option<f64>,
    /// `|F_n(u_oracle) − m∞|`
    pub recovery_gap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GammaReport {
    pub rows: Vec<GammaRow>,
    pub assertions: Vec<Assertion>,
    /// Free-form observations that are not pass/fail lines.
    pub notes: Vec<String>,
    /// Minimizer of the last ladder entry.
    pub minimizer: Option<GridFunction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularRow {
    pub field: String,
    pub n: usize,
    pub p_minus: f64,
    pub p_plus: f64,
    /// Supremum of the limit density over cells for this field.
    pub sup_density: f64,
    pub log_energy: f64,
    pub closed_form_log: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModularReport {
    pub rows: Vec<ModularRow>,
    pub assertions: Vec<Assertion>,
}
