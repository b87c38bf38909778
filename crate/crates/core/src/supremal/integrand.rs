//! Densities `f(x, u, ξ)` with growth certificates, and their smoothed
//! value/gradient/Hessian for the minimizer.

use crate::domain::{Point, MAX_CODOMAIN};
use crate::error::{Error, Result};
use crate::math::{fabs, pow, sqrt, unit_symmetric};
use crate::phi::Coefficient;
use alloc::format;

/// Largest local variable count: `d` values plus `N·d` gradient entries.
pub(crate) const MAX_VARS: usize = MAX_CODOMAIN + 2 * MAX_CODOMAIN;

#[derive(Debug, Clone, PartialEq)]
pub enum IntegrandKind {
    /// `|ξ|`
    Abs,
    /// `w(x)|ξ|`
    Weighted { weight: Coefficient },
    /// `|ξ|^γ`
    Power { gamma: f64 },
    /// `w(x)|ξ − b(x)e₁|`, shifting the first gradient entry.
    ShiftedWeighted {
        weight: Coefficient,
        shift: Coefficient,
    },
    /// `min(|ξ − 1| + κ₊, |ξ + 1| + κ₋)` for scalar `ξ`.
    DoubleWell { kappa_minus: f64, kappa_plus: f64 },
    /// `√(1 + |u|²)·|ξ|`
    UWeightedAbs,
}

impl IntegrandKind {
    pub fn name(&self) -> &'static str {
        match self {
            IntegrandKind::Abs => "abs",
            IntegrandKind::Weighted { .. } => "weighted",
            IntegrandKind::Power { .. } => "power",
            IntegrandKind::ShiftedWeighted { .. } => "shifted-weighted",
            IntegrandKind::DoubleWell { .. } => "double-well",
            IntegrandKind::UWeightedAbs => "u-weighted-abs",
        }
    }
}

/// A density with its claimed growth certificate `α|ξ|^γ ≤ f` and optional
/// upper bound `f ≤ C(|ξ|^γ + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrand {
    kind: IntegrandKind,
    alpha: f64,
    gamma: f64,
    upper_c: Option<f64>,
}

/// Smoothed density at one cell, over the local variables `(u, ξ)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Smoothed {
    pub(crate) value: f64,
    pub(crate) grad: [f64; MAX_VARS],
    pub(crate) hess: [[f64; MAX_VARS]; MAX_VARS],
}

impl Smoothed {
    fn zero() -> Self {
        Smoothed {
            value: 0.0,
            grad: [0.0; MAX_VARS],
            hess: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }
}

/// `√(|v|² + ε²)` with gradient and Hessian, over `v = ξ − shift`.
fn soft_norm(v: &[f64], eps: f64) -> (f64, [f64; 4], [[f64; 4]; 4]) {
    let s = sqrt(v.iter().map(|x| x * x).sum::<f64>() + eps * eps);
    let mut g = [0.0; 4];
    let mut h = [[0.0; 4]; 4];
    for i in 0..v.len() {
        g[i] = v[i] / s;
        for j in 0..v.len() {
            h[i][j] = -v[i] * v[j] / (s * s * s);
        }
        h[i][i] += 1.0 / s;
    }
    (s, g, h)
}

impl Integrand {
    pub fn new(kind: IntegrandKind, alpha: f64, gamma: f64, upper_c: Option<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "growth certificate needs alpha, gamma > 0, got {alpha}, {gamma}"
            )));
        }
        if let Some(c) = upper_c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Domain {
                    what: "upper growth constant",
                    value: c,
                });
            }
        }
        match &kind {
            IntegrandKind::Power { gamma: g } if !(*g >= 1.0) => {
                return Err(Error::Domain {
                    what: "power integrand exponent",
                    value: *g,
                })
            }
            IntegrandKind::DoubleWell {
                kappa_minus,
                kappa_plus,
            } if !(*kappa_minus > 0.0 && *kappa_plus > 0.0) => {
                return Err(Error::InvalidArgument(format!(
                    "double well needs positive offsets, got {kappa_minus}, {kappa_plus}"
                )))
            }
            _ => {}
        }
        Ok(Integrand {
            kind,
            alpha,
            gamma,
            upper_c,
        })
    }

    /// Certificates read off the preset, with weight extremes taken on the
    /// lattice.
    pub fn with_certificate(kind: IntegrandKind, lattice: &[Point]) -> Result<Self> {
        let (alpha, gamma, upper) = match &kind {
            IntegrandKind::Abs => (1.0, 1.0, Some(1.0)),
            IntegrandKind::Weighted { weight } => {
                let (lo, hi) = weight.range_on(lattice);
                (lo, 1.0, Some(hi))
            }
            IntegrandKind::Power { gamma } => (1.0, *gamma, Some(1.0)),
            IntegrandKind::ShiftedWeighted { weight, shift } => {
                let (lo, hi) = weight.range_on(lattice);
                let (b_lo, b_hi) = shift.range_on(lattice);
                (lo, 1.0, Some(hi * fabs(b_lo).max(fabs(b_hi)).max(1.0)))
            }
            IntegrandKind::DoubleWell {
                kappa_minus,
                kappa_plus,
            } => (
                kappa_minus.min(*kappa_plus),
                1.0,
                Some(1.0 + kappa_minus.max(*kappa_plus)),
            ),
            IntegrandKind::UWeightedAbs => (1.0, 1.0, None),
        };
        Self::new(kind, alpha, gamma, upper)
    }

    pub fn kind(&self) -> &IntegrandKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn upper_c(&self) -> Option<f64> {
        self.upper_c
    }

    pub fn depends_on_u(&self) -> bool {
        matches!(self.kind, IntegrandKind::UWeightedAbs)
    }

    /// Scalar-only presets (`ξ ∈ R`).
    pub fn is_scalar_only(&self) -> bool {
        matches!(self.kind, IntegrandKind::DoubleWell { .. })
    }

    /// Whether `ξ ↦ f(x, u, ξ)` is level convex for every `x, u`.
    pub fn is_level_convex(&self) -> bool {
        !matches!(self.kind, IntegrandKind::DoubleWell { .. })
    }

    /// Whether the smoothed density is jointly convex in `(u, ξ)`.
    fn smoothed_is_convex(&self) -> bool {
        !matches!(
            self.kind,
            IntegrandKind::DoubleWell { .. } | IntegrandKind::UWeightedAbs
        )
    }

    pub fn check_shape(&self, dim: usize, codomain_dim: usize) -> Result<()> {
        if self.is_scalar_only() && dim * codomain_dim != 1 {
            return Err(Error::Unsupported(format!(
                "{} integrand needs N = d = 1, got N = {dim}, d = {codomain_dim}",
                self.kind.name()
            )));
        }
        Ok(())
    }

    /// `f(x, u, ξ)`; `xi` is the `d × N` gradient, row-major.
    pub fn eval(&self, x: &Point, u: &[f64], xi: &[f64]) -> f64 {
        let norm = |v: &[f64]| sqrt(v.iter().map(|a| a * a).sum());
        match &self.kind {
            IntegrandKind::Abs => norm(xi),
            IntegrandKind::Weighted { weight } => weight.eval(x) * norm(xi),
            IntegrandKind::Power { gamma } => pow(norm(xi), *gamma),
            IntegrandKind::ShiftedWeighted { weight, shift } => {
                let mut v = [0.0; 4];
                v[..xi.len()].copy_from_slice(xi);
                v[0] -= shift.eval(x);
                weight.eval(x) * norm(&v[..xi.len()])
            }
            IntegrandKind::DoubleWell {
                kappa_minus,
                kappa_plus,
            } => (fabs(xi[0] - 1.0) + kappa_plus).min(fabs(xi[0] + 1.0) + kappa_minus),
            IntegrandKind::UWeightedAbs => {
                sqrt(1.0 + u.iter().map(|a| a * a).sum::<f64>()) * norm(xi)
            }
        }
    }

    /// Smoothed density over `(u, ξ)`: kinks `|v|` become `√(|v|² + ε²)` and
    /// the well minimum becomes `(a + b − √((a − b)² + ε²))/2`. When the
    /// smoothed density is not convex, its Hessian is made diagonally
    /// dominant (Gershgorin) so every cell contributes a PSD block.
    pub(crate) fn smoothed(&self, x: &Point, u: &[f64], xi: &[f64], eps: f64) -> Smoothed {
        let d = u.len();
        let k = xi.len();
        let mut out = Smoothed::zero();
        match &self.kind {
            IntegrandKind::Abs
            | IntegrandKind::Weighted { .. }
            | IntegrandKind::ShiftedWeighted { .. } => {
                let (w, b) = match &self.kind {
                    IntegrandKind::Weighted { weight } => (weight.eval(x), 0.0),
                    IntegrandKind::ShiftedWeighted { weight, shift } => {
                        (weight.eval(x), shift.eval(x))
                    }
                    _ => (1.0, 0.0),
                };
                let mut v = [0.0; 4];
                v[..k].copy_from_slice(xi);
                v[0] -= b;
                let (s, g, h) = soft_norm(&v[..k], eps);
                out.value = w * s;
                for i in 0..k {
                    out.grad[d + i] = w * g[i];
                    for j in 0..k {
                        out.hess[d + i][d + j] = w * h[i][j];
                    }
                }
            }
            IntegrandKind::Power { gamma } => {
                let s2 = xi.iter().map(|a| a * a).sum::<f64>() + eps * eps;
                let s = sqrt(s2);
                let gm = *gamma;
                out.value = pow(s, gm);
                let c1 = gm * pow(s, gm - 2.0);
                let c2 = gm * (gm - 2.0) * pow(s, gm - 4.0);
                for i in 0..k {
                    out.grad[d + i] = c1 * xi[i];
                    for j in 0..k {
                        out.hess[d + i][d + j] = c2 * xi[i] * xi[j];
                    }
                    out.hess[d + i][d + i] += c1;
                }
            }
            IntegrandKind::DoubleWell {
                kappa_minus,
                kappa_plus,
            } => {
                let sa = sqrt((xi[0] - 1.0) * (xi[0] - 1.0) + eps * eps);
                let sb = sqrt((xi[0] + 1.0) * (xi[0] + 1.0) + eps * eps);
                let (a, a1, a2) = (
                    sa + kappa_plus,
                    (xi[0] - 1.0) / sa,
                    eps * eps / (sa * sa * sa),
                );
                let (b, b1, b2) = (
                    sb + kappa_minus,
                    (xi[0] + 1.0) / sb,
                    eps * eps / (sb * sb * sb),
                );
                let diff = a - b;
                let r = sqrt(diff * diff + eps * eps);
                out.value = (a + b - r) / 2.0;
                let dd = a1 - b1;
                out.grad[d] = (a1 + b1 - diff * dd / r) / 2.0;
                out.hess[d][d] =
                    (a2 + b2 - dd * dd * eps * eps / (r * r * r) - diff * (a2 - b2) / r) / 2.0;
            }
            IntegrandKind::UWeightedAbs => {
                let gu = sqrt(1.0 + u.iter().map(|a| a * a).sum::<f64>());
                let (s, g, h) = soft_norm(xi, eps);
                out.value = gu * s;
                for i in 0..d {
                    out.grad[i] = u[i] / gu * s;
                    for j in 0..d {
                        out.hess[i][j] = -u[i] * u[j] / (gu * gu * gu) * s;
                    }
                    out.hess[i][i] += s / gu;
                    for j in 0..k {
                        out.hess[i][d + j] = u[i] / gu * g[j];
                        out.hess[d + j][i] = out.hess[i][d + j];
                    }
                }
                for i in 0..k {
                    out.grad[d + i] = gu * g[i];
                    for j in 0..k {
                        out.hess[d + i][d + j] = gu * h[i][j];
                    }
                }
            }
        }
        if !self.smoothed_is_convex() {
            gershgorin_fix(&mut out.hess, d + k);
        }
        out
    }
}

/// Raise each diagonal entry to at least the off-diagonal row sum, which
/// makes the symmetric block positive semidefinite.
pub(crate) fn gershgorin_fix(h: &mut [[f64; MAX_VARS]; MAX_VARS], n: usize) {
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| fabs(h[i][j])).sum();
        if h[i][i] < off {
            h[i][i] = off;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub lower_pass: bool,
    pub upper_pass: Option<bool>,
    /// Sample `(x, u, ξ)` with the worst violation, first gradient entries only.
    pub witness: Option<(Point, f64, f64)>,
    pub samples: usize,
}

/// Sampled (H2) `f ≥ α|ξ|^γ` and, if certified, `f ≤ C(|ξ|^γ + 1)` on a
/// seeded lattice of `(x, u, ξ)` with `|ξ|` spread over `[0, radius]`.
pub fn check_growth(
    integrand: &Integrand,
    lattice: &[Point],
    dim: usize,
    codomain_dim: usize,
    samples_per_point: usize,
    radius: f64,
    seed: u64,
) -> Result<GrowthReport> {
    if lattice.is_empty() || samples_per_point == 0 {
        return Err(Error::InvalidArgument("empty growth sample plan".into()));
    }
    integrand.check_shape(dim, codomain_dim)?;
    let k = dim * codomain_dim;
    let mut state = seed;
    let mut report = GrowthReport {
        lower_pass: true,
        upper_pass: integrand.upper_c.map(|_| true),
        witness: None,
        samples: 0,
    };
    let mut xi = [0.0; 4];
    let mut u = [0.0; MAX_CODOMAIN];
    for x in lattice {
        for s in 0..samples_per_point {
            for v in u.iter_mut().take(codomain_dim) {
                *v = radius * unit_symmetric(&mut state);
            }
            // every other sample is aligned with e₁ so shifted kinks are hit
            let aligned = s % 2 == 0;
            for (i, v) in xi.iter_mut().enumerate().take(k) {
                *v = if aligned && i > 0 {
                    0.0
                } else {
                    radius * unit_symmetric(&mut state)
                };
            }
            if let IntegrandKind::ShiftedWeighted { shift, .. } = &integrand.kind {
                if s == 1 {
                    xi[..k].iter_mut().for_each(|v| *v = 0.0);
                    xi[0] = shift.eval(x);
                }
            }
            let f = integrand.eval(x, &u[..codomain_dim], &xi[..k]);
            let mag = pow(sqrt(xi[..k].iter().map(|a| a * a).sum()), integrand.gamma);
            let low = integrand.alpha * mag;
            if f < low - crate::default_slack(low) {
                report.lower_pass = false;
                report.witness.get_or_insert((*x, u[0], xi[0]));
            }
            if let Some(c) = integrand.upper_c {
                let hi = c * (mag + 1.0);
                if f > hi + crate::default_slack(hi) {
                    report.upper_pass = Some(false);
                    report.witness.get_or_insert((*x, u[0], xi[0]));
                }
            }
            report.samples += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    const X: Point = [0.25, 0.0];

    fn finite_difference_check(f: &Integrand, u: &[f64], xi: &[f64], eps: f64) {
        let d = u.len();
        let sm = f.smoothed(&X, u, xi, eps);
        let mut vars: Vec<f64> = u.iter().chain(xi).copied().collect();
        let n = vars.len();
        let h = 1e-6;
        let value = |v: &[f64]| f.smoothed(&X, &v[..d], &v[d..], eps).value;
        for i in 0..n {
            let orig = vars[i];
            vars[i] = orig + h;
            let up = value(&vars);
            vars[i] = orig - h;
            let down = value(&vars);
            vars[i] = orig;
            let fd = (up - down) / (2.0 * h);
            assert!(
                (fd - sm.grad[i]).abs() < 1e-6,
                "grad {i}: {fd} vs {}",
                sm.grad[i]
            );
        }
    }

    #[test]
    fn examples_evaluate() {
        let abs = Integrand::with_certificate(IntegrandKind::Abs, &[X]).unwrap();
        assert_eq!(abs.eval(&X, &[0.0], &[3.0, -4.0]), 5.0);
        let well = Integrand::with_certificate(
            IntegrandKind::DoubleWell {
                kappa_minus: 0.1,
                kappa_plus: 0.1,
            },
            &[X],
        )
        .unwrap();
        assert!((well.eval(&X, &[0.0], &[1.0]) - 0.1).abs() < 1e-15);
        assert!((well.eval(&X, &[0.0], &[0.0]) - 1.1).abs() < 1e-15);
        assert_eq!(well.alpha(), 0.1);
    }

    #[test]
    fn smoothed_gradients_match_differences() {
        let lat = [X];
        let kinds = [
            IntegrandKind::Abs,
            IntegrandKind::Weighted {
                weight: Coefficient::Affine { a: 1.0, b: 1.0 },
            },
            IntegrandKind::Power { gamma: 2.5 },
            IntegrandKind::ShiftedWeighted {
                weight: Coefficient::Constant(2.0),
                shift: Coefficient::Constant(0.3),
            },
            IntegrandKind::UWeightedAbs,
        ];
        for kind in kinds {
            let f = Integrand::with_certificate(kind, &lat).unwrap();
            finite_difference_check(&f, &[0.4, -0.2], &[0.7, -0.3, 0.2, 1.1], 1e-2);
        }
        let well = Integrand::with_certificate(
            IntegrandKind::DoubleWell {
                kappa_minus: 0.1,
                kappa_plus: 0.2,
            },
            &lat,
        )
        .unwrap();
        for xi in [-1.3, -0.2, 0.0, 0.4, 0.99, 2.0] {
            finite_difference_check(&well, &[0.0], &[xi], 1e-2);
        }
    }

    #[test]
    fn smoothing_error_is_small() {
        let f = Integrand::with_certificate(IntegrandKind::Abs, &[X]).unwrap();
        let eps = 1e-6;
        let s = f.smoothed(&X, &[0.0], &[0.3], eps);
        assert!((s.value - 0.3).abs() < eps);
    }

    #[test]
    fn growth_certificates() {
        let lattice: Vec<Point> = (0..10).map(|i| [(i as f64 + 0.5) / 10.0, 0.0]).collect();
        let good = [
            IntegrandKind::Abs,
            IntegrandKind::Weighted {
                weight: Coefficient::Affine { a: 1.0, b: 1.0 },
            },
            IntegrandKind::Power { gamma: 3.0 },
            IntegrandKind::DoubleWell {
                kappa_minus: 0.1,
                kappa_plus: 0.3,
            },
        ];
        for kind in good {
            let f = Integrand::with_certificate(kind, &lattice).unwrap();
            let r = check_growth(&f, &lattice, 1, 1, 64, 3.0, 7).unwrap();
            assert!(r.lower_pass && r.upper_pass == Some(true), "{:?}", f.kind());
        }
        let shifted = Integrand::with_certificate(
            IntegrandKind::ShiftedWeighted {
                weight: Coefficient::Constant(1.0),
                shift: Coefficient::Constant(0.5),
            },
            &lattice,
        )
        .unwrap();
        let r = check_growth(&shifted, &lattice, 1, 1, 8, 3.0, 7).unwrap();
        assert!(!r.lower_pass);
        assert!((r.witness.unwrap().2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn double_well_is_scalar_only() {
        let well = Integrand::with_certificate(
            IntegrandKind::DoubleWell {
                kappa_minus: 0.1,
                kappa_plus: 0.1,
            },
            &[X],
        )
        .unwrap();
        assert!(well.check_shape(2, 1).is_err());
        assert!(well.check_shape(1, 1).is_ok());
    }
}
