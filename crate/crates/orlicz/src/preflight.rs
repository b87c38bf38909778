//! Hypothesis checks run before an experiment.

use orlicz_core::envelope::level_convexity_check;
use orlicz_core::supremal::{
    a0_check, ladder_checks, preflight as core_preflight, Framework, PreflightParams,
};
use orlicz_core::{Assertion, Grid, SampledDensity};

use crate::config::{ExperimentConfig, ExperimentKind, FrameworkSpec};
use crate::error::CliError;
use crate::setup;

/// Gating checks refuse an assertion-mode run; `info` lines are reported
/// only.
#[derive(Debug, Clone, Default)]
pub struct PreflightReport {
    pub checks: Vec<Assertion>,
    pub info: Vec<Assertion>,
}

impl PreflightReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.checks.iter().filter(|a| !a.pass).collect()
    }

    /// `PASS name: detail` lines, gating checks first.
    pub fn lines(&self) -> Vec<String> {
        let line = |tag: &str, a: &Assertion| {
            let status = if a.pass { "PASS" } else { "FAIL" };
            format!("{status} {tag}{}: {}", a.name, a.detail)
        };
        self.checks
            .iter()
            .map(|a| line("", a))
            .chain(self.info.iter().map(|a| line("(info) ", a)))
            .collect()
    }
}

fn params(cfg: &ExperimentConfig) -> PreflightParams {
    let h = &cfg.hypotheses;
    PreflightParams {
        l: h.l,
        c: h.c,
        h5_tol: h.h5_tol,
        growth_samples: h.growth_samples,
        growth_radius: h.growth_radius,
        seed: cfg.seed.unwrap_or(0),
    }
}

fn a0_info(cfg: &ExperimentConfig, grid: &Grid) -> Result<Vec<Assertion>, CliError> {
    let Some(beta) = cfg.hypotheses.a0_beta else {
        return Ok(Vec::new());
    };
    let seq = setup::ladder(cfg, grid)?;
    Ok(vec![a0_check(&seq, &grid.cell_centers(), beta)?])
}

pub fn run(cfg: &ExperimentConfig) -> Result<PreflightReport, CliError> {
    let grid = setup::grid(&cfg.grid)?;
    let params = params(cfg);
    let mut report = PreflightReport::default();
    match cfg.kind {
        ExperimentKind::NormConvergence => {
            let seq = setup::ladder(cfg, &grid)?;
            report.checks = ladder_checks(&seq, &grid.cell_centers(), &params, false)?;
            report.info = a0_info(cfg, &grid)?;
        }
        ExperimentKind::GammaNorm | ExperimentKind::GammaModular => {
            let problem = setup::problem(cfg)?;
            let framework = match cfg.framework {
                FrameworkSpec::Orlicz => Framework::Orlicz {
                    modular: cfg.kind == ExperimentKind::GammaModular,
                },
                FrameworkSpec::VariableExponent => Framework::VariableExponent,
            };
            report.checks = core_preflight(&problem, framework, &params)?;
            report.info = a0_info(cfg, &grid)?;
        }
        ExperimentKind::Envelope => {
            let spec = cfg.envelope.as_ref().expect("validated");
            let integrand = setup::integrand(cfg.integrand.as_ref().expect("validated"), &grid)?;
            let x = setup::envelope_point(spec, &grid)?;
            let d = SampledDensity::uniform(spec.radius, spec.points, x, |xi| {
                integrand.eval(&x, &[0.0], &[xi])
            })?;
            let lc = level_convexity_check(&d);
            report.info.push(Assertion::new(
                "H1",
                lc.pass,
                format!(
                    "level convexity of f(x, .) on the lattice, worst excess {}",
                    lc.worst_excess
                ),
            ));
        }
        ExperimentKind::InequalitySuite => {}
    }
    Ok(report)
}
