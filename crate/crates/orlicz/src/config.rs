//! Experiment configuration files (TOML). Unknown keys are rejected at
//! every level.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NormConvergence,
    GammaNorm,
    GammaModular,
    Envelope,
    InequalitySuite,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::NormConvergence => "norm-convergence",
            ExperimentKind::GammaNorm => "gamma-norm",
            ExperimentKind::GammaModular => "gamma-modular",
            ExperimentKind::Envelope => "envelope",
            ExperimentKind::InequalitySuite => "inequality-suite",
        }
    }
}

/// Hypothesis set a Γ-experiment is gated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameworkSpec {
    /// General `φ_n` ladders with (H1)–(H4), or (H5) for modular energies.
    #[default]
    Orlicz,
    /// `t^{p_n(x)}` ladders with a ratio bound and `f = f(x, ξ)`.
    VariableExponent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub framework: FrameworkSpec,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<LadderSpec>,
    #[serde(default)]
    pub hypotheses: HypothesesSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrand: Option<IntegrandSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub minimize: MinimizeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<NamedField>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    /// `start · factor^k`
    #[default]
    Geometric,
    /// `start + k · factor`
    Arithmetic,
}

/// Exponent ladders; entry `k` (from 0) uses the scale `s_k` given by
/// `start`, `factor` and `growth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LadderSpec {
    /// `t^{s_k}`
    Power {
        start: f64,
        factor: f64,
        count: usize,
        #[serde(default)]
        growth: Growth,
    },
    /// `t^{s_k} / s_k`
    ReciprocalPower {
        start: f64,
        factor: f64,
        count: usize,
        #[serde(default)]
        growth: Growth,
    },
    /// `t^{s_k · e(x)}`
    VariableExponent {
        start: f64,
        factor: f64,
        count: usize,
        #[serde(default)]
        growth: Growth,
        exponent: CoefficientSpec,
    },
    /// `t^{s_k} + a(x) t^{q_ratio · s_k}`
    DoublePhase {
        start: f64,
        factor: f64,
        count: usize,
        #[serde(default)]
        growth: Growth,
        q_ratio: f64,
        a: CoefficientSpec,
    },
    /// Plateau functions with exponent `s_k` and width `width · width_growth^k`.
    Plateau {
        start: f64,
        factor: f64,
        count: usize,
        #[serde(default)]
        growth: Growth,
        width: f64,
        #[serde(default = "one")]
        width_growth: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl LadderSpec {
    pub fn count(&self) -> usize {
        match self {
            LadderSpec::Power { count, .. }
            | LadderSpec::ReciprocalPower { count, .. }
            | LadderSpec::VariableExponent { count, .. }
            | LadderSpec::DoublePhase { count, .. }
            | LadderSpec::Plateau { count, .. } => *count,
        }
    }

    pub fn scales(&self) -> Vec<f64> {
        let (start, factor, count, growth) = match self {
            LadderSpec::Power {
                start,
                factor,
                count,
                growth,
            }
            | LadderSpec::ReciprocalPower {
                start,
                factor,
                count,
                growth,
            }
            | LadderSpec::VariableExponent {
                start,
                factor,
                count,
                growth,
                ..
            }
            | LadderSpec::DoublePhase {
                start,
                factor,
                count,
                growth,
                ..
            }
            | LadderSpec::Plateau {
                start,
                factor,
                count,
                growth,
                ..
            } => (*start, *factor, *count, *growth),
        };
        (0..count)
            .map(|k| match growth {
                Growth::Geometric => start * factor.powi(k as i32),
                Growth::Arithmetic => start + k as f64 * factor,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    /// `a + b·x₁`
    Affine {
        a: f64,
        b: f64,
    },
    /// `a + b·sin(2πx₁)`
    Sinusoidal {
        a: f64,
        b: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesesSpec {
    /// (aInc) constant shared by the ladder.
    #[serde(default = "one")]
    pub l: f64,
    /// Two-sided anchor constant.
    #[serde(default = "one")]
    pub c: f64,
    /// (A0) constant; reported, never gating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0_beta: Option<f64>,
    /// Bound on `p_n⁺ / p_n⁻` for variable-exponent ladders.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_bound: Option<f64>,
    #[serde(default = "default_h5_tol")]
    pub h5_tol: f64,
    #[serde(default = "default_growth_samples")]
    pub growth_samples: usize,
    #[serde(default = "default_growth_radius")]
    pub growth_radius: f64,
}

fn default_h5_tol() -> f64 {
    0.05
}

fn default_growth_samples() -> usize {
    16
}

fn default_growth_radius() -> f64 {
    10.0
}

impl Default for HypothesesSpec {
    fn default() -> Self {
        HypothesesSpec {
            l: 1.0,
            c: 1.0,
            a0_beta: None,
            ratio_bound: None,
            h5_tol: default_h5_tol(),
            growth_samples: default_growth_samples(),
            growth_radius: default_growth_radius(),
        }
    }
}

/// Fields on the grid. Per-cell uses (norm experiments) take the magnitude
/// at cell centers; nodal uses sample at nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    /// `x_axis`
    Coordinate {
        #[serde(default)]
        axis: usize,
    },
    Constant {
        value: f64,
    },
    /// `offset + gradient · x` (scalar)
    Affine {
        gradient: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// `|x_axis|^exponent`
    Power {
        #[serde(default)]
        axis: usize,
        exponent: f64,
    },
    /// Nodal field in the grid-function CSV format.
    File {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedField {
    pub name: String,
    pub field: FieldSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IntegrandSpec {
    Abs,
    Weighted {
        weight: CoefficientSpec,
    },
    Power {
        gamma: f64,
    },
    ShiftedWeighted {
        weight: CoefficientSpec,
        shift: CoefficientSpec,
    },
    DoubleWell {
        kappa_minus: f64,
        kappa_plus: f64,
    },
    UWeightedAbs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// `u(x) = A x + b`, `A` row-major `d × N`.
    Affine { matrix: Vec<f64>, offset: Vec<f64> },
    Zero {
        #[serde(default = "one_usize")]
        components: usize,
    },
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Root tolerance of Luxemburg norm searches.
    pub root: f64,
    /// Final gap threshold for norm convergence.
    pub gap: f64,
    pub value: f64,
    pub recovery: f64,
    pub l1: f64,
    pub trend: f64,
    pub discretization_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_margin: Option<f64>,
    pub vanish: f64,
    pub closed_form: f64,
    pub delta: f64,
    pub feasibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root: 1e-6,
            gap: 3e-3,
            value: 5e-3,
            recovery: 5e-3,
            l1: 5e-3,
            trend: 1e-6,
            discretization_slack: 1e-3,
            raw_margin: None,
            vanish: 1e-2,
            closed_form: 1e-9,
            delta: 0.1,
            feasibility: orlicz_core::supremal::DEFAULT_TOL_FEAS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    Interpolant,
    /// Seeded noise of size `amplitude · h` (seed from the top level).
    Perturbed {
        amplitude: f64,
    },
    Alternating {
        amplitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeSpec {
    pub gtol: f64,
    pub max_iterations: usize,
    /// Relative smoothing; `0` disables it.
    pub smoothing: f64,
    pub continuation: bool,
    pub initial: InitialSpec,
}

impl Default for MinimizeSpec {
    fn default() -> Self {
        MinimizeSpec {
            gtol: 1e-12,
            max_iterations: 200,
            smoothing: 1e-6,
            continuation: true,
            initial: InitialSpec::Interpolant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    /// Frozen spatial point.
    #[serde(default)]
    pub x: Vec<f64>,
    pub radius: f64,
    #[serde(default = "default_envelope_points")]
    pub points: usize,
    /// Ladder `1, 2, …, 2^ladder_max`.
    #[serde(default = "default_ladder_max")]
    pub ladder_max: u32,
    #[serde(default = "default_monotone_tol")]
    pub monotone_tol: f64,
}

fn default_envelope_points() -> usize {
    1001
}

fn default_ladder_max() -> u32 {
    31
}

fn default_monotone_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSpec {
    pub pairs: usize,
    pub cells: usize,
    pub tol: f64,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            pairs: 500,
            cells: 64,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: "out".into() }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are representable in TOML")
    }

    /// Cross-field requirements that serde cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        let need = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "{} config: {msg}",
                    self.kind.name()
                )))
            }
        };
        if let Some(ladder) = &self.ladder {
            need(ladder.count() >= 3, "ladder count must be at least 3")?;
        }
        match self.kind {
            ExperimentKind::NormConvergence => {
                need(self.ladder.is_some(), "missing [ladder]")?;
                need(self.field.is_some(), "missing [field]")?;
            }
            ExperimentKind::GammaNorm => {
                need(self.ladder.is_some(), "missing [ladder]")?;
                need(self.integrand.is_some(), "missing [integrand]")?;
                need(self.boundary.is_some(), "missing [boundary]")?;
                if matches!(self.minimize.initial, InitialSpec::Perturbed { .. }) {
                    need(self.seed.is_some(), "perturbed initial guess needs a seed")?;
                }
            }
            ExperimentKind::GammaModular => {
                need(self.ladder.is_some(), "missing [ladder]")?;
                need(self.integrand.is_some(), "missing [integrand]")?;
                need(!self.fields.is_empty(), "missing [[fields]]")?;
            }
            ExperimentKind::Envelope => {
                need(self.integrand.is_some(), "missing [integrand]")?;
                need(self.envelope.is_some(), "missing [envelope]")?;
                need(
                    self.envelope.as_ref().is_some_and(|e| e.ladder_max <= 31),
                    "envelope ladder_max must be at most 31",
                )?;
            }
            ExperimentKind::InequalitySuite => {
                need(
                    self.seed.is_some(),
                    "seed is mandatory for randomized suites",
                )?;
            }
        }
        Ok(())
    }
}
