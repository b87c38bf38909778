//! Damped Newton descent for modular and norm energies with frozen
//! boundary nodes.
//!
//! The unknowns are all nodal values; boundary rows of the Hessian are the
//! identity with zero gradient. Each cell contributes through its corner
//! values, mapped linearly to the cell-center value and the forward
//! difference gradient. Objectives are scaled by `e^{-M}` with `M` the log
//! of the current objective, so `t^p` with `p` near `2^{10}` never
//! overflows. Norm energies are minimized through a sequence of modular
//! problems `min ρ(f/s_k)` with `s_k` the current norm.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{forward_differences, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, log_sum_exp, sqrt, unit_symmetric};
use crate::norms::luxemburg_norm;
use crate::phi::{ExponentSequence, PhiFunction};

use super::banded::BandMatrix;
use super::energy::{EnergyFunctional, EnergyKind};
use super::integrand::{Integrand, IntegrandKind, MAX_VARS};

/// Boundary data, a density and an exponent ladder on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletProblem {
    grid: Grid,
    integrand: Integrand,
    boundary: GridFunction,
    seq: ExponentSequence,
}

impl DirichletProblem {
    /// `boundary` supplies the frozen values on boundary nodes; its
    /// interior values serve as the default initial guess.
    pub fn new(
        integrand: Integrand,
        boundary: GridFunction,
        seq: ExponentSequence,
    ) -> Result<Self> {
        let grid = *boundary.grid();
        integrand.check_shape(grid.dim(), boundary.codomain_dim())?;
        Ok(DirichletProblem {
            grid,
            integrand,
            boundary,
            seq,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn integrand(&self) -> &Integrand {
        &self.integrand
    }

    pub fn boundary(&self) -> &GridFunction {
        &self.boundary
    }

    pub fn seq(&self) -> &ExponentSequence {
        &self.seq
    }

    pub fn codomain_dim(&self) -> usize {
        self.boundary.codomain_dim()
    }

    /// Diameter of the range of the boundary data.
    pub fn data_range_diameter(&self) -> f64 {
        let d = self.codomain_dim();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for node in 0..self.grid.node_count() {
            if self.grid.is_boundary_node(node) {
                for (k, v) in self.boundary.node_value(node).iter().enumerate() {
                    lo[k] = lo[k].min(*v);
                    hi[k] = hi[k].max(*v);
                }
            }
        }
        sqrt((0..d).map(|k| (hi[k] - lo[k]) * (hi[k] - lo[k])).sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// The boundary field's own interior values.
    Interpolant,
    /// Interpolant plus seeded noise of size `amplitude · h₁` on interior
    /// nodes.
    Perturbed {
        seed: u64,
        amplitude: f64,
    },
    /// Interpolant plus `amplitude · h₁` on every other interior node, which
    /// seeds alternating-slope microstructure.
    Alternating {
        amplitude: f64,
    },
    Given(GridFunction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    /// Stop when the Newton decrement `λ²/2` falls below `gtol` relative to
    /// the objective.
    pub gtol: f64,
    /// Newton iterations per modular solve.
    pub max_iterations: usize,
    /// Relative smoothing `ε / max(diam data range, 1)`; `None` disables
    /// smoothing, which only the smooth power preset tolerates.
    pub smoothing: Option<f64>,
    /// Walk the exponents up through `s, 2s, 4s, …` before the target,
    /// with `s = continuation_start`.
    pub continuation: bool,
    pub continuation_start: f64,
    /// Outer norm-to-modular rounds for norm energies.
    pub max_outer: usize,
    pub initial: InitialGuess,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            gtol: 1e-12,
            max_iterations: 200,
            smoothing: Some(1e-6),
            continuation: true,
            continuation_start: 2.0,
            max_outer: 30,
            initial: InitialGuess::Interpolant,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub u: GridFunction,
    /// Unsmoothed energy of `u`.
    pub value: f64,
    /// Newton iterations over all stages and rounds.
    pub iterations: usize,
    /// Euclidean norm of the scaled gradient at the last iterate.
    pub grad_norm: f64,
    /// Last Newton decrement `λ²/2`, relative to the objective.
    pub decrement: f64,
    pub converged: bool,
    pub hit_iteration_cap: bool,
    pub smoothing_eps: f64,
}

#[derive(Clone, Copy)]
enum Weighting {
    One,
    InverseExponent,
}

struct Objective<'a> {
    grid: &'a Grid,
    integrand: &'a Integrand,
    phi: &'a PhiFunction,
    weighting: Weighting,
    scale: f64,
    eps: f64,
    d: usize,
    frozen: &'a [bool],
}

struct CellLocal {
    vars: [usize; 8],
    count: usize,
}

impl Objective<'_> {
    fn cell_local(&self, cell: usize) -> CellLocal {
        let corners = self.grid.cell_corners(cell);
        let kc = self.grid.corners_per_cell();
        let mut vars = [0usize; 8];
        for (a, &node) in corners[..kc].iter().enumerate() {
            for k in 0..self.d {
                vars[a * self.d + k] = node * self.d + k;
            }
        }
        CellLocal {
            vars,
            count: kc * self.d,
        }
    }

    /// `B`: corner values to `(u_c, ξ)`, as a dense `MAX_VARS × 8` array.
    fn map_matrix(&self) -> [[f64; 8]; MAX_VARS] {
        let n = self.grid.dim();
        let kc = self.grid.corners_per_cell();
        let d = self.d;
        let mut b = [[0.0; 8]; MAX_VARS];
        for k in 0..d {
            for a in 0..kc {
                b[k][a * d + k] = 1.0 / kc as f64;
            }
            for axis in 0..n {
                let h = self.grid.spacing(axis);
                let row = d + k * n + axis;
                b[row][k] -= 1.0 / h;
                b[row][(axis + 1) * d + k] += 1.0 / h;
            }
        }
        b
    }

    fn ln_weight(&self, x: &[f64; 2]) -> f64 {
        match self.weighting {
            Weighting::One => 0.0,
            Weighting::InverseExponent => -log(self.phi.lower_exponent(x)),
        }
    }

    fn smoothed_density(&self, u: &[f64], cell: usize) -> super::integrand::Smoothed {
        let n = self.grid.dim();
        let d = self.d;
        let mut xi = [0.0; 4];
        forward_differences(
            self.grid,
            d,
            cell,
            |node, k| u[node * d + k],
            &mut xi[..n * d],
        );
        let corners = self.grid.cell_corners(cell);
        let kc = self.grid.corners_per_cell();
        let mut uc = [0.0; 2];
        for &node in &corners[..kc] {
            for k in 0..d {
                uc[k] += u[node * d + k] / kc as f64;
            }
        }
        self.integrand.smoothed(
            &self.grid.cell_center(cell),
            &uc[..d],
            &xi[..n * d],
            self.eps,
        )
    }

    /// `ln` of each cell term `|cell| · w(x) · φ(x, f_ε/s)`.
    fn log_terms(&self, u: &[f64]) -> Vec<f64> {
        let ln_h = log(self.grid.cell_measure());
        (0..self.grid.cell_count())
            .map(|c| {
                let x = self.grid.cell_center(c);
                let f = self.smoothed_density(u, c).value;
                ln_h + self.ln_weight(&x) + self.phi.log_evaluate_unchecked(&x, f / self.scale)
            })
            .collect()
    }

    fn log_value(&self, u: &[f64]) -> f64 {
        log_sum_exp(&self.log_terms(u))
    }

    /// Gradient and banded Hessian of `e^{-shift}·J` at `u`.
    fn assemble(&self, u: &[f64], shift: f64, grad: &mut [f64], hess: &mut BandMatrix) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        hess.clear();
        let b = self.map_matrix();
        let nv = self.d + self.grid.dim() * self.d;
        let ln_h = log(self.grid.cell_measure());
        for cell in 0..self.grid.cell_count() {
            let x = self.grid.cell_center(cell);
            let sm = self.smoothed_density(u, cell);
            let cell_shift = shift - ln_h - self.ln_weight(&x);
            let Some([_, d1, d2]) =
                self.phi
                    .scaled_derivatives(&x, sm.value / self.scale, cell_shift)
            else {
                continue;
            };
            let s = self.scale;
            let local = self.cell_local(cell);
            // gradient and Hessian over (u_c, ξ)
            let mut gv = [0.0; MAX_VARS];
            let mut hv = [[0.0; MAX_VARS]; MAX_VARS];
            for i in 0..nv {
                gv[i] = d1 / s * sm.grad[i];
                for j in 0..nv {
                    hv[i][j] = d2 / (s * s) * sm.grad[i] * sm.grad[j] + d1 / s * sm.hess[i][j];
                }
            }
            // pull back through B
            let mut gc = [0.0; 8];
            let mut bh = [[0.0; 8]; MAX_VARS];
            for a in 0..local.count {
                for i in 0..nv {
                    gc[a] += b[i][a] * gv[i];
                    for j in 0..nv {
                        bh[i][a] += hv[i][j] * b[j][a];
                    }
                }
            }
            for a in 0..local.count {
                let ga = local.vars[a];
                if self.frozen[ga] {
                    continue;
                }
                grad[ga] += gc[a];
                for c in 0..local.count {
                    let gb = local.vars[c];
                    if self.frozen[gb] || gb > ga {
                        continue;
                    }
                    let v: f64 = (0..nv).map(|i| b[i][a] * bh[i][c]).sum();
                    hess.add_lower(ga, gb, v);
                }
            }
        }
        for (i, &f) in self.frozen.iter().enumerate() {
            if f {
                hess.set_lower(i, i, 1.0);
            }
        }
    }
}

struct NewtonOutcome {
    iterations: usize,
    grad_norm: f64,
    decrement: f64,
    converged: bool,
    hit_cap: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

fn newton(obj: &Objective<'_>, u: &mut [f64], opts: &MinimizeOptions) -> NewtonOutcome {
    let n = u.len();
    let dim = obj.grid.dim();
    let max_node_gap = if dim == 1 {
        1
    } else {
        obj.grid.nodes_per_axis(0) + 1
    };
    let bw = max_node_gap * obj.d + obj.d - 1;
    let mut grad = vec![0.0; n];
    let mut hess = BandMatrix::zeros(n, bw);
    let mut out = NewtonOutcome {
        iterations: 0,
        grad_norm: f64::INFINITY,
        decrement: f64::INFINITY,
        converged: false,
        hit_cap: false,
    };
    let mut trial = vec![0.0; n];
    loop {
        let m = obj.log_value(u);
        if !m.is_finite() {
            // zero objective: nothing left to decrease
            out.converged = m == f64::NEG_INFINITY;
            out.grad_norm = 0.0;
            out.decrement = 0.0;
            return out;
        }
        obj.assemble(u, m, &mut grad, &mut hess);
        out.grad_norm = sqrt(grad.iter().map(|g| g * g).sum());
        let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut shift = 0.0;
        let scale = hess.max_diagonal().max(f64::MIN_POSITIVE);
        let factor = loop {
            if let Some(l) = hess.cholesky(shift) {
                break Some(l);
            }
            shift = if shift == 0.0 {
                1e-10 * scale
            } else {
                shift * 10.0
            };
            if shift > 1e10 * scale {
                break None;
            }
        };
        match &factor {
            Some(l) => l.cholesky_solve(&mut dir),
            None => dir.iter_mut().for_each(|v| *v /= scale),
        }
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        out.decrement = -slope / 2.0;
        if out.decrement <= opts.gtol {
            out.converged = true;
            return out;
        }
        if out.iterations >= opts.max_iterations {
            out.hit_cap = true;
            return out;
        }
        out.iterations += 1;
        if !accept_step(obj, u, &dir, slope, m, &mut trial) {
            // retry along the scaled gradient before giving up
            let sd: Vec<f64> = grad.iter().map(|g| -g / scale).collect();
            let sd_slope: f64 = grad.iter().zip(&sd).map(|(g, d)| g * d).sum();
            if !accept_step(obj, u, &sd, sd_slope, m, &mut trial) {
                // stalled at rounding level
                out.converged = out.decrement <= 1e3 * f64::EPSILON;
                return out;
            }
        }
    }
}

/// Armijo backtracking on `e^{-m}·J`, which equals `1` at `u`.
fn accept_step(
    obj: &Objective<'_>,
    u: &mut [f64],
    dir: &[f64],
    slope: f64,
    m: f64,
    trial: &mut [f64],
) -> bool {
    if !(slope < 0.0) {
        return false;
    }
    let mut alpha = 1.0;
    for _ in 0..MAX_HALVINGS {
        for i in 0..u.len() {
            trial[i] = u[i] + alpha * dir[i];
        }
        let value = exp(obj.log_value(trial) - m);
        if value.is_finite() && value <= 1.0 + ARMIJO_C1 * alpha * slope {
            u.copy_from_slice(trial);
            return true;
        }
        alpha /= 2.0;
    }
    false
}

fn has_kink(integrand: &Integrand) -> bool {
    !matches!(integrand.kind(), IntegrandKind::Power { gamma } if *gamma >= 2.0)
}

fn initial_guess(problem: &DirichletProblem, guess: &InitialGuess) -> Result<GridFunction> {
    let grid = problem.grid;
    let mut u = problem.boundary.clone();
    let d = u.codomain_dim();
    let h = grid.spacing(0);
    match guess {
        InitialGuess::Interpolant => {}
        InitialGuess::Perturbed { seed, amplitude } => {
            let mut state = *seed;
            for node in 0..grid.node_count() {
                if !grid.is_boundary_node(node) {
                    for k in 0..d {
                        u.values_mut()[node * d + k] += amplitude * h * unit_symmetric(&mut state);
                    }
                }
            }
        }
        InitialGuess::Alternating { amplitude } => {
            let n0 = grid.nodes_per_axis(0);
            for node in 0..grid.node_count() {
                if !grid.is_boundary_node(node) && (node % n0 + node / n0) % 2 == 1 {
                    for k in 0..d {
                        u.values_mut()[node * d + k] += amplitude * h;
                    }
                }
            }
        }
        InitialGuess::Given(v) => {
            if v.grid() != &grid || v.codomain_dim() != d {
                return Err(Error::GridMismatch);
            }
            let mut w = v.clone();
            for node in 0..grid.node_count() {
                if grid.is_boundary_node(node) {
                    for k in 0..d {
                        w.values_mut()[node * d + k] = u.values()[node * d + k];
                    }
                }
            }
            u = w;
        }
    }
    Ok(u)
}

/// Exponent scale factors for the continuation: `s/p⁻, 2s/p⁻, …, 1`.
fn continuation_factors(p_minus: f64, enabled: bool, start: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if enabled {
        let mut p = start.max(2.0);
        while p < p_minus {
            out.push(p / p_minus);
            p *= 2.0;
        }
    }
    out.push(1.0);
    out
}

/// Minimize a modular or norm energy over fields with the problem's
/// boundary values.
pub fn minimize(
    problem: &DirichletProblem,
    energy: &EnergyFunctional,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    if energy.grid() != problem.grid() {
        return Err(Error::GridMismatch);
    }
    if energy.integrand() != problem.integrand() {
        return Err(Error::InvalidArgument(
            "energy and problem use different integrands".into(),
        ));
    }
    let (phi, weighting, is_norm) = match energy.kind() {
        EnergyKind::Modular(phi) => (phi, Weighting::One, false),
        EnergyKind::ExponentWeightedModular(phi) => (phi, Weighting::InverseExponent, false),
        EnergyKind::Norm(phi) => (phi, Weighting::One, true),
        other => {
            return Err(Error::Unsupported(format!(
                "minimize handles modular and norm energies, got {}",
                other.name()
            )))
        }
    };
    if !phi.is_smooth() {
        return Err(Error::Unsupported(format!(
            "minimize needs a smooth phi, got {}",
            phi.kind().name()
        )));
    }
    let lattice = problem.grid.cell_centers();
    let p_minus = lattice
        .iter()
        .map(|x| phi.lower_exponent(x))
        .fold(f64::INFINITY, f64::min);
    if !(p_minus >= 2.0) {
        return Err(Error::Unsupported(format!(
            "minimize needs p_minus >= 2 for a twice differentiable objective, got {p_minus}"
        )));
    }
    let eps = match opts.smoothing {
        Some(rel) if rel > 0.0 => rel * problem.data_range_diameter().max(1.0),
        _ if has_kink(problem.integrand()) => {
            return Err(Error::Unsupported(format!(
                "{} integrand has kinks and needs smoothing",
                problem.integrand().kind().name()
            )))
        }
        _ => 0.0,
    };
    let mut u = initial_guess(problem, &opts.initial)?;
    let d = u.codomain_dim();
    let grid = problem.grid;
    let frozen: Vec<bool> = (0..grid.node_count() * d)
        .map(|i| grid.is_boundary_node(i / d))
        .collect();
    let mut total_iterations = 0;
    let mut last = NewtonOutcome {
        iterations: 0,
        grad_norm: 0.0,
        decrement: 0.0,
        converged: true,
        hit_cap: false,
    };
    let mut hit_cap = false;
    for factor in continuation_factors(p_minus, opts.continuation, opts.continuation_start) {
        let stage_phi = if factor == 1.0 {
            phi.clone()
        } else {
            phi.scale_exponents(factor)
        };
        let mut obj = Objective {
            grid: &grid,
            integrand: problem.integrand(),
            phi: &stage_phi,
            weighting,
            scale: 1.0,
            eps,
            d,
            frozen: &frozen,
        };
        let rounds = if is_norm { opts.max_outer.max(1) } else { 1 };
        let mut previous = f64::INFINITY;
        for _ in 0..rounds {
            if is_norm {
                let s = smoothed_norm(&obj, u.values(), energy.norm_tol())?;
                if s == 0.0 || s >= previous * (1.0 - 1e-13) {
                    break;
                }
                previous = s;
                obj.scale = s;
            }
            last = newton(&obj, u.values_mut(), opts);
            total_iterations += last.iterations;
            hit_cap |= last.hit_cap;
        }
    }
    let value = energy.energy(&u)?;
    Ok(MinimizeResult {
        u,
        value,
        iterations: total_iterations,
        grad_norm: last.grad_norm,
        decrement: last.decrement,
        converged: last.converged && !hit_cap,
        hit_iteration_cap: hit_cap,
        smoothing_eps: eps,
    })
}

fn smoothed_norm(obj: &Objective<'_>, u: &[f64], tol: f64) -> Result<f64> {
    let g: Vec<f64> = (0..obj.grid.cell_count())
        .map(|c| fabs(obj.smoothed_density(u, c).value))
        .collect();
    Ok(luxemburg_norm(obj.phi, obj.grid, &g, tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::{Coefficient, PhiKind};

    fn problem_1d(
        kind: IntegrandKind,
        m: usize,
        a: f64,
        b: f64,
        ladder: &[f64],
    ) -> DirichletProblem {
        let grid = Grid::interval(0.0, 1.0, m).unwrap();
        let lattice = grid.cell_centers();
        let integrand = Integrand::with_certificate(kind, &lattice).unwrap();
        let boundary = GridFunction::scalar(grid, |x| a + (b - a) * x[0]).unwrap();
        let entries = ladder
            .iter()
            .map(|&p| PhiFunction::power(p).unwrap())
            .collect();
        let seq = ExponentSequence::new(entries, &lattice, None).unwrap();
        DirichletProblem::new(integrand, boundary, seq).unwrap()
    }

    #[test]
    fn affine_data_is_optimal_for_abs() {
        for p in [2.0, 8.0, 64.0] {
            let pr = problem_1d(IntegrandKind::Abs, 40, 0.0, 1.0, &[p]);
            let e = EnergyFunctional::new(
                EnergyKind::Modular(PhiFunction::power(p).unwrap()),
                pr.integrand().clone(),
                *pr.grid(),
            )
            .unwrap();
            let opts = MinimizeOptions {
                initial: InitialGuess::Perturbed {
                    seed: 3,
                    amplitude: 0.3,
                },
                ..MinimizeOptions::default()
            };
            let r = minimize(&pr, &e, &opts).unwrap();
            assert!(r.converged, "p = {p}");
            let diff = r.u.max_abs_difference(pr.boundary()).unwrap();
            assert!(diff < 1e-6, "p = {p}: {diff}");
            assert!((r.value - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn weighted_minimizer_matches_euler_lagrange() {
        let p = 4.0;
        let weight = Coefficient::Affine { a: 1.0, b: 1.0 };
        let pr = problem_1d(IntegrandKind::Weighted { weight }, 400, 0.0, 1.0, &[p]);
        let e = EnergyFunctional::new(
            EnergyKind::Modular(PhiFunction::power(p).unwrap()),
            pr.integrand().clone(),
            *pr.grid(),
        )
        .unwrap();
        let r = minimize(&pr, &e, &MinimizeOptions::default()).unwrap();
        assert!(r.converged);
        // u' = C w^{-p'} with C fixed by ∫u' = 1; here p' = 4/3
        let q = p / (p - 1.0);
        let grid = pr.grid();
        let h = grid.spacing(0);
        let integral: f64 = grid
            .cell_centers()
            .iter()
            .map(|x| (1.0 + x[0]).powf(-q) * h)
            .sum();
        let c = 1.0 / integral;
        for (cell, x) in grid.cell_centers().iter().enumerate() {
            let slope = (r.u.values()[cell + 1] - r.u.values()[cell]) / h;
            let expect = c * (1.0 + x[0]).powf(-q);
            assert!(
                (slope - expect).abs() < 1e-6,
                "cell {cell}: {slope} vs {expect}"
            );
        }
    }

    #[test]
    fn affine_trace_is_optimal_in_2d() {
        let grid = Grid::rectangle([0.0, 0.0], [1.0, 1.0], [8, 8]).unwrap();
        let lattice = grid.cell_centers();
        let integrand = Integrand::with_certificate(IntegrandKind::Abs, &lattice).unwrap();
        let boundary = GridFunction::scalar(grid, |x| x[0]).unwrap();
        let seq = ExponentSequence::power_ladder(2.0, 2.0, 3, &lattice).unwrap();
        let pr = DirichletProblem::new(integrand.clone(), boundary, seq).unwrap();
        for p in [2.0, 4.0, 8.0] {
            let e = EnergyFunctional::new(
                EnergyKind::Norm(PhiFunction::power(p).unwrap()),
                integrand.clone(),
                grid,
            )
            .unwrap();
            let opts = MinimizeOptions {
                initial: InitialGuess::Perturbed {
                    seed: 11,
                    amplitude: 0.5,
                },
                ..MinimizeOptions::default()
            };
            let r = minimize(&pr, &e, &opts).unwrap();
            assert!(
                r.u.max_abs_difference(pr.boundary()).unwrap() < 1e-5,
                "p = {p}"
            );
            assert!((r.value - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn objective_never_increases() {
        let pr = problem_1d(
            IntegrandKind::DoubleWell {
                kappa_minus: 0.1,
                kappa_plus: 0.1,
            },
            20,
            0.0,
            0.0,
            &[8.0],
        );
        let e = EnergyFunctional::new(
            EnergyKind::Modular(PhiFunction::power(8.0).unwrap()),
            pr.integrand().clone(),
            *pr.grid(),
        )
        .unwrap();
        let mut previous = f64::INFINITY;
        for iterations in 0..8 {
            let opts = MinimizeOptions {
                max_iterations: iterations,
                continuation: false,
                initial: InitialGuess::Alternating { amplitude: 0.4 },
                ..MinimizeOptions::default()
            };
            let r = minimize(&pr, &e, &opts).unwrap();
            assert!(r.value <= previous * (1.0 + 1e-12));
            previous = r.value;
        }
    }

    #[test]
    fn rejects_unsupported_setups() {
        let pr = problem_1d(IntegrandKind::Abs, 10, 0.0, 1.0, &[4.0]);
        let integrand = pr.integrand().clone();
        let grid = *pr.grid();
        let sup = EnergyFunctional::new(EnergyKind::Sup, integrand.clone(), grid).unwrap();
        assert!(matches!(
            minimize(&pr, &sup, &MinimizeOptions::default()),
            Err(Error::Unsupported(_))
        ));
        let modular = EnergyFunctional::new(
            EnergyKind::Modular(PhiFunction::power(4.0).unwrap()),
            integrand.clone(),
            grid,
        )
        .unwrap();
        let no_smoothing = MinimizeOptions {
            smoothing: None,
            ..MinimizeOptions::default()
        };
        assert!(matches!(
            minimize(&pr, &modular, &no_smoothing),
            Err(Error::Unsupported(_))
        ));
        let low = EnergyFunctional::new(
            EnergyKind::Modular(PhiFunction::power(1.5).unwrap()),
            integrand.clone(),
            grid,
        )
        .unwrap();
        assert!(minimize(&pr, &low, &MinimizeOptions::default()).is_err());
        let plateau = PhiFunction::with_sampled_hypotheses(
            PhiKind::Orlicz(crate::phi::OrliczPreset::Plateau { p: 3.0, width: 2.0 }),
            &grid.cell_centers(),
        )
        .unwrap();
        let e = EnergyFunctional::new(EnergyKind::Modular(plateau), integrand, grid).unwrap();
        assert!(minimize(&pr, &e, &MinimizeOptions::default()).is_err());
    }
}
