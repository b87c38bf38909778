//! Modulars, Luxemburg norms and executable checks of the basic norm
//! inequalities on a grid.
//!
//! Fields are per-cell samples `g ≥ 0` on a [`Grid`]; modulars use the
//! midpoint rule at cell centers. All modular evaluations inside the root
//! search run in log space, so `ρ(g/λ)` for exponents in the thousands is
//! compared against `1` without overflow.

use alloc::format;
use alloc::vec::Vec;

use crate::domain::{Grid, Point};
use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, log_sum_exp};
use crate::phi::{
    check_ainc, check_anchor, Coefficient, ExponentSequence, PhiFunction, PhiKind, Sampler,
};
use crate::report::{Assertion, NormConvergenceReport, NormRow};

/// `ρ_φ(g)`; may be `+∞`, never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularValue {
    pub value: f64,
}

/// A computed Luxemburg norm; `achieved_tol` is the final bracket width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub achieved_tol: f64,
}

const BRACKET_STEPS: usize = 60;
const MAX_BISECTIONS: usize = 200;

fn check_field(grid: &Grid, g: &[f64]) -> Result<()> {
    if g.len() != grid.cell_count() {
        return Err(Error::GridMismatch);
    }
    for &v in g {
        if v.is_nan() {
            return Err(Error::NonFinite { what: "field" });
        }
        if v < 0.0 {
            return Err(Error::Domain {
                what: "field value (negative)",
                value: v,
            });
        }
    }
    Ok(())
}

/// `ρ_φ(g) = ∫ φ(x, g(x)) dx`.
pub fn modular(phi: &PhiFunction, grid: &Grid, g: &[f64]) -> Result<ModularValue> {
    check_field(grid, g)?;
    let dens: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(c, &v)| phi.evaluate_unchecked(&grid.cell_center(c), v))
        .collect();
    Ok(ModularValue {
        value: grid.integrate(&dens)?,
    })
}

/// `ln ρ_φ(g/λ)` for `λ > 0`.
pub fn log_modular(phi: &PhiFunction, grid: &Grid, g: &[f64], lambda: f64) -> Result<f64> {
    check_field(grid, g)?;
    if !(lambda > 0.0) {
        return Err(Error::Domain {
            what: "lambda",
            value: lambda,
        });
    }
    Ok(log_modular_unchecked(phi, grid, g, lambda))
}

pub(crate) fn log_modular_unchecked(phi: &PhiFunction, grid: &Grid, g: &[f64], lambda: f64) -> f64 {
    let logs: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(c, &v)| phi.log_evaluate_unchecked(&grid.cell_center(c), v / lambda))
        .collect();
    log_sum_exp(&logs) + log(grid.cell_measure())
}

/// `inf{λ > 0 : ρ_φ(g/λ) ≤ 1}` by bisection to bracket width `tol`.
///
/// The zero field has norm `0`; for `φ∞` the result is exactly the
/// cellwise supremum.
pub fn luxemburg_norm(phi: &PhiFunction, grid: &Grid, g: &[f64], tol: f64) -> Result<NormValue> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            what: "norm tolerance",
            value: tol,
        });
    }
    check_field(grid, g)?;
    let gmax = grid.sup_cellwise(g)?;
    if phi.is_infinity() {
        return Ok(NormValue {
            value: gmax,
            achieved_tol: 0.0,
        });
    }
    if gmax == 0.0 {
        return Ok(NormValue {
            value: 0.0,
            achieved_tol: 0.0,
        });
    }
    if gmax == f64::INFINITY {
        return Ok(NormValue {
            value: f64::INFINITY,
            achieved_tol: 0.0,
        });
    }
    // ρ(g/λ) ≤ 1 ⟺ ln ρ(g/λ) ≤ 0; +∞ counts as "> 1"
    let fits = |lambda: f64| log_modular_unchecked(phi, grid, g, lambda) <= 0.0;
    let mut lo = gmax / 2.0;
    let mut hi = gmax * 2.0;
    let mut steps = 0;
    while !fits(hi) {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > BRACKET_STEPS || !hi.is_finite() {
            return Err(bracket_error(phi, grid, g, lo, hi));
        }
    }
    steps = 0;
    while fits(lo) {
        hi = lo;
        lo /= 2.0;
        steps += 1;
        if steps > BRACKET_STEPS || lo == 0.0 {
            return Err(bracket_error(phi, grid, g, lo, hi));
        }
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(NormValue {
        value: lo + (hi - lo) / 2.0,
        achieved_tol: hi - lo,
    })
}

fn bracket_error(phi: &PhiFunction, grid: &Grid, g: &[f64], lo: f64, hi: f64) -> Error {
    Error::Bracket {
        lo,
        hi,
        log_modular_lo: log_modular_unchecked(phi, grid, g, lo),
        log_modular_hi: log_modular_unchecked(phi, grid, g, hi),
    }
}

/// Discrete `‖g‖_{L^p}` computed as `exp((ln ∫ g^p)/p)`.
pub fn lp_norm(grid: &Grid, g: &[f64], p: f64) -> Result<f64> {
    check_field(grid, g)?;
    if !(p >= 1.0) {
        return Err(Error::Domain {
            what: "Lebesgue exponent",
            value: p,
        });
    }
    if p == f64::INFINITY {
        return grid.sup_cellwise(g);
    }
    let logs: Vec<f64> = g
        .iter()
        .map(|&v| {
            if v == 0.0 {
                f64::NEG_INFINITY
            } else {
                p * log(v)
            }
        })
        .collect();
    Ok(exp((log_sum_exp(&logs) + log(grid.cell_measure())) / p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitBallReport {
    pub norm: NormValue,
    pub modular: f64,
    /// `‖g‖ < 1 ⇒ ρ(g) ≤ 1`, checked when the bracket certifies `‖g‖ < 1`.
    pub small_norm_implies_small_modular: bool,
    /// `ρ(g) ≤ 1 ⇒ ‖g‖ ≤ 1`, with slack `2·tol`.
    pub small_modular_implies_small_norm: bool,
    pub pass: bool,
}

pub fn unit_ball_check(
    phi: &PhiFunction,
    grid: &Grid,
    g: &[f64],
    tol: f64,
) -> Result<UnitBallReport> {
    let norm = luxemburg_norm(phi, grid, g, tol)?;
    let modular = modular(phi, grid, g)?.value;
    let first =
        !(norm.value + norm.achieved_tol < 1.0) || modular <= 1.0 + crate::default_slack(1.0);
    let second = !(modular <= 1.0) || norm.value <= 1.0 + 2.0 * tol;
    Ok(UnitBallReport {
        norm,
        modular,
        small_norm_implies_small_modular: first,
        small_modular_implies_small_norm: second,
        pass: first && second,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub lp_norm: f64,
    pub phi_norm: NormValue,
    pub constant: f64,
    pub pass: bool,
}

/// `‖g‖_{L^p} ≤ (2L(|Ω|+c))^{1/p} ‖g‖_φ` with the hypotheses verified once.
#[derive(Debug, Clone)]
pub struct EmbeddingCheck<'a> {
    phi: &'a PhiFunction,
    grid: Grid,
    p: f64,
    constant: f64,
}

impl<'a> EmbeddingCheck<'a> {
    /// Verify (aInc)_p with constant `L` and the anchor `1/c ≤ φ(·,1) ≤ c`
    /// on the grid's cell centers; either failure is a named
    /// [`Error::Hypothesis`].
    pub fn prepare(phi: &'a PhiFunction, grid: &Grid, p: f64, l: f64, c: f64) -> Result<Self> {
        let centers = grid.cell_centers();
        let anchor = check_anchor(phi, c, &centers)?;
        if !anchor.pass() {
            return Err(Error::Hypothesis {
                name: "H4",
                detail: format!(
                    "phi(x, 1) ranges over [{}, {}], outside [1/{c}, {c}]",
                    anchor.phi_minus_1, anchor.phi_plus_1
                ),
            });
        }
        let ainc = check_ainc(phi, p, l, &Sampler::for_phi(phi, &centers))?;
        if !ainc.pass {
            return Err(Error::Hypothesis {
                name: "aInc",
                detail: format!(
                    "rate {p} with L = {l} violated; smallest admissible L is {}",
                    ainc.required_constant
                ),
            });
        }
        Ok(EmbeddingCheck {
            phi,
            grid: *grid,
            p,
            constant: embedding_constant(p, l, grid.measure(), c),
        })
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn check(&self, g: &[f64], tol: f64) -> Result<EmbeddingReport> {
        let lp = lp_norm(&self.grid, g, self.p)?;
        let phi_norm = luxemburg_norm(self.phi, &self.grid, g, tol)?;
        let bound = self.constant * (phi_norm.value + phi_norm.achieved_tol) * (1.0 + 1e-12);
        Ok(EmbeddingReport {
            lp_norm: lp,
            phi_norm,
            constant: self.constant,
            pass: lp <= bound + crate::default_slack(bound),
        })
    }
}

/// `(2L(|Ω| + c))^{1/p}`.
pub fn embedding_constant(p: f64, l: f64, measure: f64, c: f64) -> f64 {
    exp(log(2.0 * l * (measure + c)) / p)
}

pub fn embedding_check(
    phi: &PhiFunction,
    grid: &Grid,
    g: &[f64],
    p: f64,
    l: f64,
    c: f64,
    tol: f64,
) -> Result<EmbeddingReport> {
    EmbeddingCheck::prepare(phi, grid, p, l, c)?.check(g, tol)
}

fn exponent_phi(p: &Coefficient, lattice: &[Point]) -> Result<PhiFunction> {
    PhiFunction::with_sampled_hypotheses(PhiKind::VariableExponent { p: p.clone() }, lattice)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    /// `|∫ f g|`
    pub integral: f64,
    /// `∫ |f| |g|`
    pub integral_abs: f64,
    pub norm_f: NormValue,
    pub norm_g: NormValue,
    /// `1/p⁻ + 1/p'⁻`
    pub constant: f64,
    pub pass: bool,
}

/// Variable-exponent Hölder inequality
/// `∫|f||g| ≤ (1/p⁻ + 1/p'⁻)‖f‖_{p(·)}‖g‖_{p'(·)}` for signed cell fields.
pub fn holder_check(
    grid: &Grid,
    f: &[f64],
    g: &[f64],
    p: &Coefficient,
    tol: f64,
) -> Result<HolderReport> {
    if f.len() != grid.cell_count() || g.len() != grid.cell_count() {
        return Err(Error::GridMismatch);
    }
    let lattice = grid.cell_centers();
    let (p_minus, p_plus) = p.range_on(&lattice);
    if !(p_minus > 1.0) {
        return Err(Error::Domain {
            what: "Hoelder exponent p_minus (must exceed 1)",
            value: p_minus,
        });
    }
    let conjugate = p.clone().conjugate();
    let phi_p = exponent_phi(p, &lattice)?;
    let phi_q = exponent_phi(&conjugate, &lattice)?;
    let abs_f: Vec<f64> = f.iter().map(|v| fabs(*v)).collect();
    let abs_g: Vec<f64> = g.iter().map(|v| fabs(*v)).collect();
    let products: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
    let abs_products: Vec<f64> = products.iter().map(|v| fabs(*v)).collect();
    let integral = fabs(grid.integrate(&products)?);
    let integral_abs = grid.integrate(&abs_products)?;
    let norm_f = luxemburg_norm(&phi_p, grid, &abs_f, tol)?;
    let norm_g = luxemburg_norm(&phi_q, grid, &abs_g, tol)?;
    let q_minus = if p_plus == f64::INFINITY {
        1.0
    } else {
        p_plus / (p_plus - 1.0)
    };
    let constant = 1.0 / p_minus + 1.0 / q_minus;
    let rhs = constant * (norm_f.value + 2.0 * tol) * (norm_g.value + 2.0 * tol);
    let pass = integral <= integral_abs + crate::default_slack(integral_abs)
        && integral_abs <= rhs + crate::default_slack(rhs);
    Ok(HolderReport {
        integral,
        integral_abs,
        norm_f,
        norm_g,
        constant,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub modular: f64,
    pub norm: NormValue,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

/// `min(ρ^{1/p⁻}, ρ^{1/p⁺}) ≤ ‖u‖_{p(·)} ≤ max(ρ^{1/p⁻}, ρ^{1/p⁺})` with
/// `ρ` and both bounds evaluated in log space.
pub fn sandwich_check(grid: &Grid, u: &[f64], p: &Coefficient, tol: f64) -> Result<SandwichReport> {
    let abs_u: Vec<f64> = u.iter().map(|v| fabs(*v)).collect();
    let lattice = grid.cell_centers();
    let (p_minus, p_plus) = p.range_on(&lattice);
    if !p_plus.is_finite() {
        return Err(Error::Domain {
            what: "sandwich needs finite p_plus",
            value: p_plus,
        });
    }
    let phi = exponent_phi(p, &lattice)?;
    let ln_rho = log_modular(&phi, grid, &abs_u, 1.0)?;
    let norm = luxemburg_norm(&phi, grid, &abs_u, tol)?;
    let (a, b) = (exp(ln_rho / p_minus), exp(ln_rho / p_plus));
    let (lower, upper) = (a.min(b), a.max(b));
    let slack = 2.0 * tol;
    let pass = lower <= norm.value + slack + crate::default_slack(lower)
        && norm.value <= upper + slack + crate::default_slack(upper);
    Ok(SandwichReport {
        modular: exp(ln_rho),
        norm,
        lower,
        upper,
        pass,
    })
}

/// Verify the per-entry hypotheses of a norm-convergence ladder: (aInc) at
/// rate `p_n⁻` with the shared `L`, the shared anchor `c`, and strictly
/// increasing `p_n⁻`.
pub fn check_norm_ladder(seq: &ExponentSequence, grid: &Grid, l: f64, c: f64) -> Result<()> {
    seq.check_divergent()?;
    let centers = grid.cell_centers();
    for (n, phi) in seq.entries().iter().enumerate() {
        let anchor = check_anchor(phi, c, &centers)?;
        if !anchor.pass() {
            return Err(Error::Hypothesis {
                name: "H4",
                detail: format!(
                    "entry {}: phi(x, 1) ranges over [{}, {}], outside [1/{c}, {c}]",
                    n + 1,
                    anchor.phi_minus_1,
                    anchor.phi_plus_1
                ),
            });
        }
        let rate = seq.p_minus()[n];
        let ainc = check_ainc(phi, rate, l, &Sampler::for_phi(phi, &centers))?;
        if !ainc.pass {
            return Err(Error::Hypothesis {
                name: "H3",
                detail: format!(
                    "entry {}: (aInc) at rate {rate} needs L >= {}, declared {l}",
                    n + 1,
                    ainc.required_constant
                ),
            });
        }
    }
    Ok(())
}

/// One row of the norm-convergence table for ladder entry `n` (1-based).
pub fn norm_convergence_row(
    seq: &ExponentSequence,
    n: usize,
    grid: &Grid,
    g: &[f64],
    tol: f64,
    l: f64,
    c: f64,
) -> Result<NormRow> {
    let phi = seq
        .entries()
        .get(n - 1)
        .ok_or_else(|| Error::InvalidArgument(format!("ladder has no entry {n}")))?;
    let norm = luxemburg_norm(phi, grid, g, tol)?;
    let sup = grid.sup_cellwise(g)?;
    let p_minus = seq.p_minus()[n - 1];
    Ok(NormRow {
        n,
        p_minus,
        p_plus: seq.p_plus()[n - 1],
        norm: norm.value,
        achieved_tol: norm.achieved_tol,
        sup_norm: sup,
        gap: fabs(sup - norm.value),
        embedding_constant: embedding_constant(p_minus, l, grid.measure(), c),
    })
}

/// Assertions over finished rows: the final gap is below `gap_threshold`
/// and the embedding constants are non-increasing.
pub fn norm_convergence_assertions(rows: &[NormRow], gap_threshold: f64) -> Vec<Assertion> {
    let mut out = Vec::new();
    if let Some(last) = rows.last() {
        out.push(Assertion::new(
            "final-gap",
            last.gap <= gap_threshold,
            format!(
                "gap {} at n = {} vs threshold {gap_threshold}",
                last.gap, last.n
            ),
        ));
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].embedding_constant <= w[0].embedding_constant * (1.0 + 1e-15));
    let last_constant = rows.last().map_or(f64::NAN, |r| r.embedding_constant);
    out.push(Assertion::new(
        "embedding-constant-monotone",
        monotone,
        format!("final constant {last_constant}"),
    ));
    out
}

/// `‖g‖_{φ_n}` against `‖g‖_∞` along a ladder.
pub fn norm_convergence_experiment(
    seq: &ExponentSequence,
    grid: &Grid,
    g: &[f64],
    tol: f64,
    l: f64,
    c: f64,
    gap_threshold: f64,
) -> Result<NormConvergenceReport> {
    check_norm_ladder(seq, grid, l, c)?;
    let rows = (1..=seq.len())
        .map(|n| norm_convergence_row(seq, n, grid, g, tol, l, c))
        .collect::<Result<Vec<_>>>()?;
    let assertions = norm_convergence_assertions(&rows, gap_threshold);
    Ok(NormConvergenceReport { rows, assertions })
}

/// `ρ_φ(g)` by direct summation of `φ(x, g)`; used by tests as a second
/// path next to the log-space evaluation.
#[cfg(test)]
fn modular_direct(phi: &PhiFunction, grid: &Grid, g: &[f64]) -> f64 {
    g.iter()
        .enumerate()
        .map(|(c, &v)| phi.evaluate(&grid.cell_center(c), v).unwrap())
        .sum::<f64>()
        * grid.cell_measure()
}
