//! Turning a parsed config into library values.

use std::path::Path;

use orlicz_core::domain::Point;
use orlicz_core::phi::ExponentSequence;
use orlicz_core::supremal::experiments::reciprocal_weighted;
use orlicz_core::supremal::{GammaOptions, InitialGuess, ModularOptions, ModularVariant};
use orlicz_core::{
    Coefficient, DirichletProblem, Grid, GridFunction, Integrand, IntegrandKind, MinimizeOptions,
    OrliczPreset, PhiFunction, PhiKind,
};

use crate::config::*;
use crate::error::CliError;
use crate::gridio;

fn config_err(what: &str) -> impl Fn(orlicz_core::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{what}: {e}"))
}

pub fn coefficient(spec: &CoefficientSpec) -> Coefficient {
    match *spec {
        CoefficientSpec::Constant { value } => Coefficient::Constant(value),
        CoefficientSpec::Affine { a, b } => Coefficient::Affine { a, b },
        CoefficientSpec::Sinusoidal { a, b } => Coefficient::Sinusoidal { a, b },
    }
}

pub fn grid(spec: &GridSpec) -> Result<Grid, CliError> {
    Grid::new(&spec.lower, &spec.upper, &spec.cells).map_err(config_err("[grid]"))
}

pub fn ladder(cfg: &ExperimentConfig, grid: &Grid) -> Result<ExponentSequence, CliError> {
    let spec = cfg
        .ladder
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [ladder]".into()))?;
    let lattice = grid.cell_centers();
    let err = config_err("[ladder]");
    let entries = spec
        .scales()
        .into_iter()
        .enumerate()
        .map(|(k, s)| match spec {
            LadderSpec::Power { .. } => PhiFunction::power(s),
            LadderSpec::ReciprocalPower { .. } => reciprocal_weighted(s),
            LadderSpec::VariableExponent { exponent, .. } => PhiFunction::with_sampled_hypotheses(
                PhiKind::VariableExponent {
                    p: coefficient(exponent).scaled(s),
                },
                &lattice,
            ),
            LadderSpec::DoublePhase { q_ratio, a, .. } => PhiFunction::with_sampled_hypotheses(
                PhiKind::DoublePhase {
                    p: s,
                    q: q_ratio * s,
                    a: coefficient(a),
                },
                &lattice,
            ),
            LadderSpec::Plateau {
                width,
                width_growth,
                ..
            } => PhiFunction::with_sampled_hypotheses(
                PhiKind::Orlicz(OrliczPreset::Plateau {
                    p: s,
                    width: width * width_growth.powi(k as i32),
                }),
                &lattice,
            ),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(&err)?;
    ExponentSequence::new(entries, &lattice, cfg.hypotheses.ratio_bound).map_err(err)
}

pub fn integrand(spec: &IntegrandSpec, grid: &Grid) -> Result<Integrand, CliError> {
    let kind = match spec {
        IntegrandSpec::Abs => IntegrandKind::Abs,
        IntegrandSpec::Weighted { weight } => IntegrandKind::Weighted {
            weight: coefficient(weight),
        },
        IntegrandSpec::Power { gamma } => IntegrandKind::Power { gamma: *gamma },
        IntegrandSpec::ShiftedWeighted { weight, shift } => IntegrandKind::ShiftedWeighted {
            weight: coefficient(weight),
            shift: coefficient(shift),
        },
        IntegrandSpec::DoubleWell {
            kappa_minus,
            kappa_plus,
        } => IntegrandKind::DoubleWell {
            kappa_minus: *kappa_minus,
            kappa_plus: *kappa_plus,
        },
        IntegrandSpec::UWeightedAbs => IntegrandKind::UWeightedAbs,
    };
    Integrand::with_certificate(kind, &grid.cell_centers()).map_err(config_err("[integrand]"))
}

fn check_axis(spec: &FieldSpec, grid: &Grid) -> Result<(), CliError> {
    let axis = match spec {
        FieldSpec::Coordinate { axis } | FieldSpec::Power { axis, .. } => *axis,
        _ => return Ok(()),
    };
    if axis < grid.dim() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "field axis {axis} outside a {}D grid",
            grid.dim()
        )))
    }
}

/// Scalar nodal field; `File` fields are read relative to `base`.
pub fn nodal_field(spec: &FieldSpec, grid: &Grid, base: &Path) -> Result<GridFunction, CliError> {
    let err = config_err("field");
    check_axis(spec, grid)?;
    match spec {
        FieldSpec::Coordinate { axis } => GridFunction::scalar(*grid, |x| x[*axis]).map_err(err),
        FieldSpec::Constant { value } => GridFunction::scalar(*grid, |_| *value).map_err(err),
        FieldSpec::Affine { gradient, offset } => {
            GridFunction::affine(*grid, gradient, &[*offset]).map_err(err)
        }
        FieldSpec::Power { axis, exponent } => {
            GridFunction::scalar(*grid, |x| x[*axis].abs().powf(*exponent)).map_err(err)
        }
        FieldSpec::File { path } => {
            let path = base.join(path);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let u = gridio::read_csv(&text)?;
            if u.grid() != grid {
                return Err(CliError::Config(format!(
                    "{}: field grid does not match [grid]",
                    path.display()
                )));
            }
            Ok(u)
        }
    }
}

/// Per-cell magnitudes `|g|` at cell centers.
pub fn cell_field(spec: &FieldSpec, grid: &Grid, base: &Path) -> Result<Vec<f64>, CliError> {
    check_axis(spec, grid)?;
    Ok(match spec {
        FieldSpec::File { .. } => nodal_field(spec, grid, base)?.cell_magnitudes(),
        FieldSpec::Coordinate { axis } => grid.sample_cells(|x| x[*axis].abs()),
        FieldSpec::Constant { value } => grid.sample_cells(|_| value.abs()),
        FieldSpec::Affine { gradient, offset } => grid.sample_cells(|x| {
            (offset
                + gradient
                    .iter()
                    .zip(x.iter())
                    .map(|(g, c)| g * c)
                    .sum::<f64>())
            .abs()
        }),
        FieldSpec::Power { axis, exponent } => {
            grid.sample_cells(|x| x[*axis].abs().powf(*exponent))
        }
    })
}

pub fn boundary(spec: &BoundarySpec, grid: &Grid) -> Result<GridFunction, CliError> {
    let err = config_err("[boundary]");
    match spec {
        BoundarySpec::Affine { matrix, offset } => {
            GridFunction::affine(*grid, matrix, offset).map_err(err)
        }
        BoundarySpec::Zero { components } => GridFunction::zeros(*grid, *components).map_err(err),
    }
}

pub fn problem(cfg: &ExperimentConfig) -> Result<DirichletProblem, CliError> {
    let grid = grid(&cfg.grid)?;
    let seq = ladder(cfg, &grid)?;
    let integrand = integrand(
        cfg.integrand
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [integrand]".into()))?,
        &grid,
    )?;
    let boundary = match &cfg.boundary {
        Some(b) => boundary(b, &grid)?,
        None => GridFunction::zeros(grid, 1).map_err(config_err("[boundary]"))?,
    };
    DirichletProblem::new(integrand, boundary, seq).map_err(config_err("problem"))
}

pub fn minimize_options(cfg: &ExperimentConfig) -> MinimizeOptions {
    let m = &cfg.minimize;
    MinimizeOptions {
        gtol: m.gtol,
        max_iterations: m.max_iterations,
        smoothing: (m.smoothing > 0.0).then_some(m.smoothing),
        continuation: m.continuation,
        initial: match m.initial {
            InitialSpec::Interpolant => InitialGuess::Interpolant,
            InitialSpec::Perturbed { amplitude } => InitialGuess::Perturbed {
                seed: cfg.seed.unwrap_or(0),
                amplitude,
            },
            InitialSpec::Alternating { amplitude } => InitialGuess::Alternating { amplitude },
        },
        ..MinimizeOptions::default()
    }
}

pub fn gamma_options(cfg: &ExperimentConfig, report_only: bool) -> GammaOptions {
    let t = &cfg.tolerances;
    GammaOptions {
        minimize: minimize_options(cfg),
        value_tol: t.value,
        recovery_tol: t.recovery,
        l1_tol: t.l1,
        discretization_slack: t.discretization_slack,
        trend_tol: t.trend,
        raw_margin: t.raw_margin,
        report_only,
    }
}

pub fn modular_options(cfg: &ExperimentConfig, report_only: bool) -> ModularOptions {
    let t = &cfg.tolerances;
    ModularOptions {
        variant: match cfg.framework {
            FrameworkSpec::Orlicz => ModularVariant::Orlicz,
            FrameworkSpec::VariableExponent => ModularVariant::ExponentWeighted,
        },
        delta: t.delta,
        tol_feas: t.feasibility,
        vanish_tol: t.vanish,
        closed_form_tol: t.closed_form,
        report_only,
    }
}

/// The frozen point of an envelope run, padded to two coordinates.
pub fn envelope_point(spec: &EnvelopeSpec, grid: &Grid) -> Result<Point, CliError> {
    if spec.x.len() > grid.dim() {
        return Err(CliError::Config(format!(
            "[envelope] x has {} coordinates for a {}D grid",
            spec.x.len(),
            grid.dim()
        )));
    }
    let mut x = [0.0; 2];
    x[..spec.x.len()].copy_from_slice(&spec.x);
    Ok(x)
}
