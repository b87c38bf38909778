use alloc::format;
use alloc::vec::Vec;

use crate::domain::{forward_differences, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::math::{exp, log, log_sum_exp};
use crate::norms::{log_modular, luxemburg_norm};
use crate::phi::PhiFunction;

use super::integrand::Integrand;

/// Default feasibility slack of the indicator energy.
pub const DEFAULT_TOL_FEAS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum EnergyKind {
    /// `‖f(·, u, Du)‖_φ`
    Norm(PhiFunction),
    /// `ρ_φ(f(·, u, Du))`
    Modular(PhiFunction),
    /// `∫ φ(x, f(x, u, Du)) / p(x) dx`, with `p(x)` the lower exponent of `φ`.
    ExponentWeightedModular(PhiFunction),
    /// `ess sup f(·, u, Du)`
    Sup,
    /// `0` if `ess sup f ≤ 1 + tol_feas`, else `+∞`.
    SupIndicator { tol_feas: f64 },
}

impl EnergyKind {
    pub fn phi(&self) -> Option<&PhiFunction> {
        match self {
            EnergyKind::Norm(phi)
            | EnergyKind::Modular(phi)
            | EnergyKind::ExponentWeightedModular(phi) => Some(phi),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnergyKind::Norm(_) => "norm",
            EnergyKind::Modular(_) => "modular",
            EnergyKind::ExponentWeightedModular(_) => "exponent-weighted-modular",
            EnergyKind::Sup => "sup",
            EnergyKind::SupIndicator { .. } => "sup-indicator",
        }
    }
}

/// An energy bound to a density and a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFunctional {
    kind: EnergyKind,
    integrand: Integrand,
    grid: Grid,
    norm_tol: f64,
}

impl EnergyFunctional {
    pub fn new(kind: EnergyKind, integrand: Integrand, grid: Grid) -> Result<Self> {
        if let EnergyKind::SupIndicator { tol_feas } = kind {
            if !(tol_feas >= 0.0) {
                return Err(Error::Domain {
                    what: "feasibility tolerance",
                    value: tol_feas,
                });
            }
        }
        if let Some(phi) = kind.phi() {
            phi.validate_on(&grid.cell_centers())?;
        }
        Ok(EnergyFunctional {
            kind,
            integrand,
            grid,
            norm_tol: 1e-10,
        })
    }

    /// Root tolerance used for norm energies (default `1e-10`).
    pub fn with_norm_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain {
                what: "norm tolerance",
                value: tol,
            });
        }
        self.norm_tol = tol;
        Ok(self)
    }

    pub fn kind(&self) -> &EnergyKind {
        &self.kind
    }

    pub fn integrand(&self) -> &Integrand {
        &self.integrand
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn norm_tol(&self) -> f64 {
        self.norm_tol
    }

    fn check(&self, u: &GridFunction) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        self.integrand
            .check_shape(self.grid.dim(), u.codomain_dim())
    }

    /// `f(x_c, u(x_c), Du(cell))` per cell, unsmoothed.
    pub fn density(&self, u: &GridFunction) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(density_field(&self.integrand, u))
    }

    pub fn energy(&self, u: &GridFunction) -> Result<f64> {
        let g = self.density(u)?;
        self.energy_of_density(&g)
    }

    /// The energy as a function of a precomputed per-cell density.
    pub fn energy_of_density(&self, g: &[f64]) -> Result<f64> {
        match &self.kind {
            EnergyKind::Norm(phi) => Ok(luxemburg_norm(phi, &self.grid, g, self.norm_tol)?.value),
            EnergyKind::Sup => self.grid.sup_cellwise(g),
            EnergyKind::SupIndicator { tol_feas } => {
                let sup = self.grid.sup_cellwise(g)?;
                Ok(if sup <= 1.0 + tol_feas {
                    0.0
                } else {
                    f64::INFINITY
                })
            }
            _ => Ok(exp(self.log_energy_of_density(g)?)),
        }
    }

    /// `ln` of the energy; modular energies never overflow here.
    pub fn log_energy(&self, u: &GridFunction) -> Result<f64> {
        let g = self.density(u)?;
        self.log_energy_of_density(&g)
    }

    pub fn log_energy_of_density(&self, g: &[f64]) -> Result<f64> {
        match &self.kind {
            EnergyKind::Modular(phi) => log_modular(phi, &self.grid, g, 1.0),
            EnergyKind::ExponentWeightedModular(phi) => {
                if g.len() != self.grid.cell_count() {
                    return Err(Error::GridMismatch);
                }
                let mut logs = Vec::with_capacity(g.len());
                for (c, &v) in g.iter().enumerate() {
                    let x = self.grid.cell_center(c);
                    let p = phi.lower_exponent(&x);
                    if !p.is_finite() {
                        return Err(Error::Unsupported(format!(
                            "exponent weight needs a finite exponent, got {p}"
                        )));
                    }
                    logs.push(phi.log_evaluate(&x, v)? - log(p));
                }
                Ok(log_sum_exp(&logs) + log(self.grid.cell_measure()))
            }
            _ => Ok(log(self.energy_of_density(g)?)),
        }
    }
}

pub(crate) fn density_field(integrand: &Integrand, u: &GridFunction) -> Vec<f64> {
    let grid = u.grid();
    let d = u.codomain_dim();
    let n = grid.dim();
    let mut xi = [0.0; 4];
    (0..grid.cell_count())
        .map(|c| {
            forward_differences(
                grid,
                d,
                c,
                |node, k| u.values()[node * d + k],
                &mut xi[..n * d],
            );
            let uc = u.cell_value(c);
            integrand.eval(&grid.cell_center(c), &uc[..d], &xi[..n * d])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supremal::integrand::IntegrandKind;

    fn abs(grid: &Grid) -> Integrand {
        Integrand::with_certificate(IntegrandKind::Abs, &grid.cell_centers()).unwrap()
    }

    #[test]
    fn energies_of_identity() {
        let grid = Grid::interval(0.0, 1.0, 50).unwrap();
        let u = GridFunction::scalar(grid, |x| x[0]).unwrap();
        let sup = EnergyFunctional::new(EnergyKind::Sup, abs(&grid), grid).unwrap();
        assert!((sup.energy(&u).unwrap() - 1.0).abs() < 1e-12);
        for p in [2.0, 16.0, 1024.0] {
            let e = EnergyFunctional::new(
                EnergyKind::Norm(PhiFunction::power(p).unwrap()),
                abs(&grid),
                grid,
            )
            .unwrap();
            assert!((e.energy(&u).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn indicator_of_square() {
        let grid = Grid::interval(0.0, 1.0, 100).unwrap();
        let u = GridFunction::scalar(grid, |x| x[0] * x[0]).unwrap();
        let e = EnergyFunctional::new(
            EnergyKind::SupIndicator {
                tol_feas: DEFAULT_TOL_FEAS,
            },
            abs(&grid),
            grid,
        )
        .unwrap();
        assert_eq!(e.energy(&u).unwrap(), f64::INFINITY);
        let half = GridFunction::scalar(grid, |x| 0.5 * x[0] * x[0]).unwrap();
        assert_eq!(e.energy(&half).unwrap(), 0.0);
    }

    #[test]
    fn exponent_weighted_modular_closed_form() {
        let grid = Grid::interval(0.0, 1.0, 10).unwrap();
        for p in [2.0, 64.0, 4096.0] {
            let e = EnergyFunctional::new(
                EnergyKind::ExponentWeightedModular(PhiFunction::power(p).unwrap()),
                abs(&grid),
                grid,
            )
            .unwrap();
            let u = GridFunction::scalar(grid, |x| 1.5 * x[0]).unwrap();
            let expect = p * 1.5f64.ln() - p.ln();
            assert!((e.log_energy(&u).unwrap() - expect).abs() < 1e-9 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let grid = Grid::interval(0.0, 1.0, 10).unwrap();
        let other = Grid::interval(0.0, 1.0, 11).unwrap();
        let e = EnergyFunctional::new(EnergyKind::Sup, abs(&grid), grid).unwrap();
        let u = GridFunction::scalar(other, |x| x[0]).unwrap();
        assert!(matches!(e.energy(&u), Err(Error::GridMismatch)));
    }
}
