//! Generalized weak Φ-functions `φ(x, t)` and sampled checkers for the
//! structural hypotheses used by the convergence results.
//!
//! Every finite catalog member is a sum of at most two power terms
//! `c(x)·t^{r(x)}` (piecewise in `t` for the plateau preset), which lets the
//! crate evaluate `ln φ` without overflow for exponents in the thousands.
//! The ∞-indicator `φ∞(x, t) = ∞·χ_{(1,∞)}(t)` is handled exactly: it returns
//! `0.0` or `f64::INFINITY`, never a large finite surrogate.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, log1p, log_add_exp, pow, powr, sin};

/// Symbolic coefficient functions of `x₁`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// `a + b·x₁`
    Affine {
        a: f64,
        b: f64,
    },
    /// `a + b·sin(2π x₁)`
    Sinusoidal {
        a: f64,
        b: f64,
    },
    /// `factor · inner(x)`
    Scaled {
        factor: f64,
        inner: Box<Coefficient>,
    },
    /// Hölder conjugate `p/(p-1)` of the inner exponent.
    Conjugate(Box<Coefficient>),
}

impl Coefficient {
    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Affine { a, b } => a + b * x[0],
            Coefficient::Sinusoidal { a, b } => a + b * sin(2.0 * core::f64::consts::PI * x[0]),
            Coefficient::Scaled { factor, inner } => factor * inner.eval(x),
            Coefficient::Conjugate(inner) => {
                let p = inner.eval(x);
                p / (p - 1.0)
            }
        }
    }

    pub fn scaled(self, factor: f64) -> Coefficient {
        match self {
            Coefficient::Constant(c) => Coefficient::Constant(c * factor),
            Coefficient::Scaled { factor: f, inner } => Coefficient::Scaled {
                factor: f * factor,
                inner,
            },
            other => Coefficient::Scaled {
                factor,
                inner: Box::new(other),
            },
        }
    }

    pub fn conjugate(self) -> Coefficient {
        Coefficient::Conjugate(Box::new(self))
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Coefficient::Constant(_) => true,
            Coefficient::Affine { b, .. } | Coefficient::Sinusoidal { b, .. } => *b == 0.0,
            Coefficient::Scaled { inner, .. } | Coefficient::Conjugate(inner) => {
                inner.is_constant()
            }
        }
    }

    /// Lattice minimum and maximum.
    pub fn range_on(&self, lattice: &[Point]) -> (f64, f64) {
        lattice
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                let v = self.eval(x);
                (lo.min(v), hi.max(v))
            })
    }
}

/// x-independent Orlicz presets.
#[derive(Debug, Clone, PartialEq)]
pub enum OrliczPreset {
    /// `t^p` on `[0, 1]`, `1` on `[1, w]`, `(t/w)^p` beyond `w`. Satisfies
    /// (aInc)_p only with constant `w^p`.
    Plateau { p: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhiKind {
    ConstantPower {
        p: f64,
    },
    VariableExponent {
        p: Coefficient,
    },
    /// `t^p + a(x) t^q`
    DoublePhase {
        p: f64,
        q: f64,
        a: Coefficient,
    },
    /// `t^{p(x)} + a(x) t^{q(x)}`
    VariableDoublePhase {
        p: Coefficient,
        q: Coefficient,
        a: Coefficient,
    },
    /// `w(x) t^p`
    WeightedPower {
        weight: Coefficient,
        p: f64,
    },
    Orlicz(OrliczPreset),
    InfinityIndicator,
}

impl PhiKind {
    pub fn name(&self) -> &'static str {
        match self {
            PhiKind::ConstantPower { .. } => "constant-power",
            PhiKind::VariableExponent { .. } => "variable-exponent",
            PhiKind::DoublePhase { .. } => "double-phase",
            PhiKind::VariableDoublePhase { .. } => "variable-double-phase",
            PhiKind::WeightedPower { .. } => "weighted-power",
            PhiKind::Orlicz(OrliczPreset::Plateau { .. }) => "plateau",
            PhiKind::InfinityIndicator => "infinity",
        }
    }
}

/// Declared structural constants: the rate `p` and constant `L` of
/// (aInc)_p, and `c` in `1/c ≤ φ(x, 1) ≤ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypotheses {
    pub ainc_rate: f64,
    pub ainc_constant: f64,
    pub anchor_c: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerTerm {
    pub(crate) ln_coef: f64,
    pub(crate) exponent: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Terms {
    items: [PowerTerm; 2],
    len: usize,
}

impl Terms {
    fn one(ln_coef: f64, exponent: f64) -> Self {
        let t = PowerTerm { ln_coef, exponent };
        Terms {
            items: [t, t],
            len: 1,
        }
    }

    fn two(a: PowerTerm, b: PowerTerm) -> Self {
        Terms {
            items: [a, b],
            len: 2,
        }
    }

    pub(crate) fn as_slice(&self) -> &[PowerTerm] {
        &self.items[..self.len]
    }
}

fn ln_nonneg(c: f64) -> f64 {
    if c == 0.0 {
        f64::NEG_INFINITY
    } else {
        log(c)
    }
}

/// A Φ-function together with its declared hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiFunction {
    kind: PhiKind,
    hypotheses: Hypotheses,
}

impl PhiFunction {
    pub fn new(kind: PhiKind, hypotheses: Hypotheses) -> Result<Self> {
        match &kind {
            PhiKind::ConstantPower { p } | PhiKind::WeightedPower { p, .. } if !(*p >= 1.0) => {
                return Err(Error::Domain {
                    what: "exponent p",
                    value: *p,
                })
            }
            PhiKind::DoublePhase { p, q, .. } if !(*p >= 1.0 && q >= p) => {
                return Err(Error::InvalidArgument(format!(
                    "double phase needs 1 <= p <= q, got p = {p}, q = {q}"
                )))
            }
            PhiKind::Orlicz(OrliczPreset::Plateau { p, width })
                if !(*p >= 1.0 && *width >= 1.0) =>
            {
                return Err(Error::InvalidArgument(format!(
                    "plateau needs p >= 1 and width >= 1, got p = {p}, width = {width}"
                )))
            }
            _ => {}
        }
        let h = hypotheses;
        if !(h.ainc_rate >= 1.0) || !(h.ainc_constant >= 1.0) || !(h.anchor_c >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "declared hypotheses need rate, L, c >= 1, got {h:?}"
            )));
        }
        Ok(PhiFunction { kind, hypotheses })
    }

    /// `t^p` with rate `p`, `L = 1`, `c = 1`.
    pub fn power(p: f64) -> Result<Self> {
        Self::new(
            PhiKind::ConstantPower { p },
            Hypotheses {
                ainc_rate: p,
                ainc_constant: 1.0,
                anchor_c: 1.0,
            },
        )
    }

    pub fn infinity() -> Self {
        PhiFunction {
            kind: PhiKind::InfinityIndicator,
            hypotheses: Hypotheses {
                ainc_rate: f64::INFINITY,
                ainc_constant: 1.0,
                anchor_c: f64::INFINITY,
            },
        }
    }

    /// Build with hypotheses read off the sample lattice: rate `p⁻`, the
    /// sharp constant `L` of the preset and the smallest admissible `c`.
    pub fn with_sampled_hypotheses(kind: PhiKind, lattice: &[Point]) -> Result<Self> {
        if lattice.is_empty() {
            return Err(Error::InvalidArgument("empty lattice".into()));
        }
        if kind == PhiKind::InfinityIndicator {
            return Ok(Self::infinity());
        }
        let probe = PhiFunction {
            kind,
            hypotheses: Hypotheses {
                ainc_rate: 1.0,
                ainc_constant: 1.0,
                anchor_c: 1.0,
            },
        };
        probe.validate_on(lattice)?;
        let rate = lattice
            .iter()
            .map(|x| probe.lower_exponent(x))
            .fold(f64::INFINITY, f64::min);
        let constant = match &probe.kind {
            PhiKind::Orlicz(OrliczPreset::Plateau { p, width }) => pow(*width, *p),
            _ => 1.0,
        };
        let (lo, hi) = anchor_range(&probe, lattice);
        let c = if lo > 0.0 {
            hi.max(1.0 / lo).max(1.0)
        } else {
            f64::INFINITY
        };
        if !c.is_finite() {
            return Err(Error::Hypothesis {
                name: "H4",
                detail: format!("phi(x, 1) vanishes on the lattice (min {lo})"),
            });
        }
        Self::new(
            probe.kind,
            Hypotheses {
                ainc_rate: rate,
                ainc_constant: constant,
                anchor_c: c,
            },
        )
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn hypotheses(&self) -> &Hypotheses {
        &self.hypotheses
    }

    pub fn is_infinity(&self) -> bool {
        self.kind == PhiKind::InfinityIndicator
    }

    pub fn is_x_independent(&self) -> bool {
        match &self.kind {
            PhiKind::ConstantPower { .. } | PhiKind::Orlicz(_) | PhiKind::InfinityIndicator => true,
            PhiKind::VariableExponent { p } => p.is_constant(),
            PhiKind::DoublePhase { a, .. } => a.is_constant(),
            PhiKind::VariableDoublePhase { p, q, a } => {
                p.is_constant() && q.is_constant() && a.is_constant()
            }
            PhiKind::WeightedPower { weight, .. } => weight.is_constant(),
        }
    }

    /// Check coefficient ranges on a lattice: exponents ≥ 1, `q ≥ p`,
    /// weights ≥ 0.
    pub fn validate_on(&self, lattice: &[Point]) -> Result<()> {
        for x in lattice {
            let bad = match &self.kind {
                PhiKind::VariableExponent { p } => !(p.eval(x) >= 1.0),
                PhiKind::DoublePhase { a, .. } => !(a.eval(x) >= 0.0),
                PhiKind::VariableDoublePhase { p, q, a } => {
                    let (pv, qv) = (p.eval(x), q.eval(x));
                    !(pv >= 1.0 && qv >= pv && a.eval(x) >= 0.0)
                }
                PhiKind::WeightedPower { weight, .. } => !(weight.eval(x) >= 0.0),
                _ => false,
            };
            if bad {
                return Err(Error::InvalidArgument(format!(
                    "{} coefficients out of range at x = {:?}",
                    self.kind.name(),
                    x
                )));
            }
        }
        Ok(())
    }

    /// Multiply every exponent by `factor`; coefficients are unchanged.
    pub fn scale_exponents(&self, factor: f64) -> PhiFunction {
        let kind = match &self.kind {
            PhiKind::ConstantPower { p } => PhiKind::ConstantPower { p: p * factor },
            PhiKind::VariableExponent { p } => PhiKind::VariableExponent {
                p: p.clone().scaled(factor),
            },
            PhiKind::DoublePhase { p, q, a } => PhiKind::DoublePhase {
                p: p * factor,
                q: q * factor,
                a: a.clone(),
            },
            PhiKind::VariableDoublePhase { p, q, a } => PhiKind::VariableDoublePhase {
                p: p.clone().scaled(factor),
                q: q.clone().scaled(factor),
                a: a.clone(),
            },
            PhiKind::WeightedPower { weight, p } => PhiKind::WeightedPower {
                weight: weight.clone(),
                p: p * factor,
            },
            PhiKind::Orlicz(OrliczPreset::Plateau { p, width }) => {
                PhiKind::Orlicz(OrliczPreset::Plateau {
                    p: p * factor,
                    width: *width,
                })
            }
            PhiKind::InfinityIndicator => PhiKind::InfinityIndicator,
        };
        PhiFunction {
            kind,
            hypotheses: Hypotheses {
                ainc_rate: (self.hypotheses.ainc_rate * factor).max(1.0),
                ..self.hypotheses
            },
        }
    }

    /// The exponent governing lower growth at `x`: `p`, or `p(x)`.
    pub fn lower_exponent(&self, x: &Point) -> f64 {
        match &self.kind {
            PhiKind::ConstantPower { p }
            | PhiKind::DoublePhase { p, .. }
            | PhiKind::WeightedPower { p, .. }
            | PhiKind::Orlicz(OrliczPreset::Plateau { p, .. }) => *p,
            PhiKind::VariableExponent { p } | PhiKind::VariableDoublePhase { p, .. } => p.eval(x),
            PhiKind::InfinityIndicator => f64::INFINITY,
        }
    }

    /// The largest exponent present at `x` (`q` for double phase).
    pub fn upper_exponent(&self, x: &Point) -> f64 {
        match &self.kind {
            PhiKind::DoublePhase { q, .. } => *q,
            PhiKind::VariableDoublePhase { q, .. } => q.eval(x),
            _ => self.lower_exponent(x),
        }
    }

    /// Power-term decomposition at `(x, t)`; `None` for the ∞-indicator.
    pub(crate) fn terms(&self, x: &Point, t: f64) -> Option<Terms> {
        Some(match &self.kind {
            PhiKind::ConstantPower { p } => Terms::one(0.0, *p),
            PhiKind::VariableExponent { p } => Terms::one(0.0, p.eval(x)),
            PhiKind::DoublePhase { p, q, a } => Terms::two(
                PowerTerm {
                    ln_coef: 0.0,
                    exponent: *p,
                },
                PowerTerm {
                    ln_coef: ln_nonneg(a.eval(x)),
                    exponent: *q,
                },
            ),
            PhiKind::VariableDoublePhase { p, q, a } => Terms::two(
                PowerTerm {
                    ln_coef: 0.0,
                    exponent: p.eval(x),
                },
                PowerTerm {
                    ln_coef: ln_nonneg(a.eval(x)),
                    exponent: q.eval(x),
                },
            ),
            PhiKind::WeightedPower { weight, p } => Terms::one(ln_nonneg(weight.eval(x)), *p),
            PhiKind::Orlicz(OrliczPreset::Plateau { p, width }) => {
                if t <= 1.0 {
                    Terms::one(0.0, *p)
                } else if t <= *width {
                    Terms::one(0.0, 0.0)
                } else {
                    Terms::one(-p * log(*width), *p)
                }
            }
            PhiKind::InfinityIndicator => return None,
        })
    }

    fn check_t(t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::Domain {
                what: "phi argument t (non-finite)",
                value: t,
            });
        }
        if t < 0.0 {
            return Err(Error::Domain {
                what: "phi argument t (negative)",
                value: t,
            });
        }
        Ok(())
    }

    /// `φ(x, t)` for finite `t ≥ 0`.
    pub fn evaluate(&self, x: &Point, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        let v = self.evaluate_unchecked(x, t);
        if v.is_nan() {
            return Err(Error::NonFinite {
                what: "phi evaluation",
            });
        }
        Ok(v)
    }

    pub(crate) fn evaluate_unchecked(&self, x: &Point, t: f64) -> f64 {
        match self.terms(x, t) {
            None => {
                if t <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Some(terms) => terms
                .as_slice()
                .iter()
                .map(|term| {
                    if term.ln_coef == f64::NEG_INFINITY {
                        0.0
                    } else {
                        exp(term.ln_coef) * powr(t, term.exponent)
                    }
                })
                .sum(),
        }
    }

    /// `ln φ(x, t)`; `-∞` where `φ = 0`, `+∞` where `φ = ∞`.
    pub fn log_evaluate(&self, x: &Point, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        let v = self.log_evaluate_unchecked(x, t);
        if v.is_nan() {
            return Err(Error::NonFinite {
                what: "phi evaluation",
            });
        }
        Ok(v)
    }

    pub(crate) fn log_evaluate_unchecked(&self, x: &Point, t: f64) -> f64 {
        match self.terms(x, t) {
            None => {
                if t <= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            Some(terms) => {
                let ln_t = if t == 0.0 { f64::NEG_INFINITY } else { log(t) };
                terms
                    .as_slice()
                    .iter()
                    .map(|term| term_log(term, ln_t))
                    .fold(f64::NEG_INFINITY, log_add_exp)
            }
        }
    }

    /// `(φ, φ', φ'') · e^{-shift}` at `(x, t)`; `None` for non-smooth kinds.
    pub(crate) fn scaled_derivatives(&self, x: &Point, t: f64, shift: f64) -> Option<[f64; 3]> {
        if !self.is_smooth() {
            return None;
        }
        let terms = self.terms(x, t)?;
        let ln_t = if t == 0.0 { f64::NEG_INFINITY } else { log(t) };
        let mut out = [0.0; 3];
        for term in terms.as_slice() {
            if term.ln_coef == f64::NEG_INFINITY {
                continue;
            }
            let r = term.exponent;
            out[0] += exp(term_log(term, ln_t) - shift);
            if r != 0.0 {
                let lp = term.ln_coef + log(r) + power_log(r - 1.0, ln_t) - shift;
                out[1] += exp(lp);
                if r != 1.0 {
                    let lpp = term.ln_coef + log(r) + log(fabs(r - 1.0)) + power_log(r - 2.0, ln_t)
                        - shift;
                    out[2] += (r - 1.0).signum() * exp(lpp);
                }
            }
        }
        Some(out)
    }

    /// Kinds whose `t ↦ φ(x, t)` is twice continuously differentiable for
    /// the exponents used by the minimizer.
    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, PhiKind::InfinityIndicator | PhiKind::Orlicz(_))
    }
}

fn power_log(r: f64, ln_t: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r * ln_t
    }
}

fn term_log(term: &PowerTerm, ln_t: f64) -> f64 {
    if term.ln_coef == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        term.ln_coef + power_log(term.exponent, ln_t)
    }
}

fn anchor_range(phi: &PhiFunction, lattice: &[Point]) -> (f64, f64) {
    lattice
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            let v = phi.evaluate_unchecked(x, 1.0);
            (lo.min(v), hi.max(v))
        })
}

/// A finite plan of `(x, t, λ)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    pub points: Vec<Point>,
    pub ts: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl Sampler {
    /// `t` log-spaced on `[1e-6, 1e6]`, four per decade.
    pub fn default_ts() -> Vec<f64> {
        (0..=48).map(|k| pow(10.0, -6.0 + k as f64 / 4.0)).collect()
    }

    /// `λ = 2^{-k}`, `k = 0..=20`.
    pub fn default_lambdas() -> Vec<f64> {
        (0..=20).map(|k| pow(2.0, -(k as f64))).collect()
    }

    /// Default plan on a lattice; x-independent φ only needs one point.
    pub fn for_phi(phi: &PhiFunction, lattice: &[Point]) -> Self {
        let points = if phi.is_x_independent() {
            lattice.iter().take(1).copied().collect()
        } else {
            lattice.to_vec()
        };
        Sampler {
            points,
            ts: Self::default_ts(),
            lambdas: Self::default_lambdas(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len() * self.ts.len() * self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AincWitness {
    pub x: Point,
    pub t: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AincReport {
    pub pass: bool,
    /// Largest `ln φ(x,λt) − ln(Lλ^pφ(x,t) + slack)`; positive on violation.
    pub worst_violation: f64,
    pub witness: Option<AincWitness>,
    /// Smallest `L` that would make the sampled inequality hold.
    pub required_constant: f64,
    pub samples: usize,
}

/// Sampled (aInc)_p: `φ(x, λt) ≤ L λ^p φ(x, t)` for `λ ∈ (0, 1]`.
///
/// The comparison runs in log space with the slack `1e-12·(1 + rhs)`, so
/// exponents in the thousands neither overflow nor underflow.
pub fn check_ainc(phi: &PhiFunction, p: f64, l: f64, sampler: &Sampler) -> Result<AincReport> {
    if sampler.is_empty() {
        return Err(Error::InvalidArgument("empty (aInc) sample plan".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain {
            what: "aInc rate p",
            value: p,
        });
    }
    if !(l >= 1.0) {
        return Err(Error::Domain {
            what: "aInc constant L",
            value: l,
        });
    }
    if let Some(&bad) = sampler.lambdas.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
        return Err(Error::Domain {
            what: "lambda outside (0, 1]",
            value: bad,
        });
    }
    if let Some(&bad) = sampler.ts.iter().find(|&&v| !(v.is_finite() && v >= 0.0)) {
        return Err(Error::Domain {
            what: "sample t",
            value: bad,
        });
    }
    let mut report = AincReport {
        pass: true,
        worst_violation: f64::NEG_INFINITY,
        witness: None,
        required_constant: 0.0,
        samples: sampler.len(),
    };
    // φ∞ satisfies every finite rate: both sides vanish for t ≤ 1 and the
    // right side is infinite for t > 1.
    if phi.is_infinity() {
        report.required_constant = 1.0;
        return Ok(report);
    }
    let ln_l = log(l);
    let ln_slack = log(1e-12);
    let ln_one_plus = log1p(1e-12);
    let mut worst_ratio = f64::NEG_INFINITY;
    for x in &sampler.points {
        for &t in &sampler.ts {
            let rhs_phi = phi.log_evaluate_unchecked(x, t);
            for &lambda in &sampler.lambdas {
                let lhs = phi.log_evaluate_unchecked(x, lambda * t);
                if lhs.is_nan() || rhs_phi.is_nan() {
                    return Err(Error::NonFinite {
                        what: "phi evaluation",
                    });
                }
                let scale = p * log(lambda);
                let rhs = ln_l + scale + rhs_phi;
                // t^r carries a relative rounding error of order r·|ln t|·ε
                let rounding = 8.0
                    * f64::EPSILON
                    * phi.upper_exponent(x)
                    * (fabs(log(t.max(f64::MIN_POSITIVE))) + fabs(log(lambda)) + 1.0);
                let bound = log_add_exp(rhs + ln_one_plus.max(rounding), ln_slack);
                let excess = lhs - bound;
                if excess > report.worst_violation {
                    report.worst_violation = excess;
                    if excess > 0.0 {
                        report.witness = Some(AincWitness { x: *x, t, lambda });
                    }
                }
                if excess > 0.0 {
                    report.pass = false;
                }
                if lhs > f64::NEG_INFINITY {
                    let ratio = if rhs_phi == f64::NEG_INFINITY {
                        f64::INFINITY
                    } else if rhs_phi == f64::INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        lhs - scale - rhs_phi
                    };
                    worst_ratio = worst_ratio.max(ratio);
                }
            }
        }
    }
    report.required_constant = exp(worst_ratio);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorStatus {
    Pass,
    Fail,
    /// φ∞ vanishes at `t = 1`; no finite `c` can anchor it.
    Unsupported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorReport {
    pub status: AnchorStatus,
    pub phi_minus_1: f64,
    pub phi_plus_1: f64,
    pub c: f64,
}

impl AnchorReport {
    pub fn pass(&self) -> bool {
        self.status == AnchorStatus::Pass
    }
}

/// Sampled essential bounds of `φ(·, 1)` against `[1/c, c]`.
pub fn check_anchor(phi: &PhiFunction, c: f64, lattice: &[Point]) -> Result<AnchorReport> {
    if !(c >= 1.0) {
        return Err(Error::Domain {
            what: "anchor constant c",
            value: c,
        });
    }
    if lattice.is_empty() {
        return Err(Error::InvalidArgument("empty lattice".into()));
    }
    let (lo, hi) = anchor_range(phi, lattice);
    let status = if phi.is_infinity() {
        AnchorStatus::Unsupported
    } else if lo + crate::default_slack(1.0 / c) >= 1.0 / c && hi <= c + crate::default_slack(c) {
        AnchorStatus::Pass
    } else {
        AnchorStatus::Fail
    };
    Ok(AnchorReport {
        status,
        phi_minus_1: lo,
        phi_plus_1: hi,
        c,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct A0Report {
    pub pass: bool,
    pub beta: f64,
    /// `max_x φ(x, β)`, must be ≤ 1.
    pub phi_at_beta_max: f64,
    /// `min_x φ(x, 1/β)`, must be ≥ 1.
    pub phi_at_inverse_min: f64,
}

/// Sampled (A0): `φ(x, β) ≤ 1 ≤ φ(x, 1/β)`.
pub fn check_a0(phi: &PhiFunction, beta: f64, lattice: &[Point]) -> Result<A0Report> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain {
            what: "A0 constant beta",
            value: beta,
        });
    }
    if lattice.is_empty() {
        return Err(Error::InvalidArgument("empty lattice".into()));
    }
    let mut at_beta = f64::NEG_INFINITY;
    let mut at_inverse = f64::INFINITY;
    for x in lattice {
        at_beta = at_beta.max(phi.evaluate_unchecked(x, beta));
        at_inverse = at_inverse.min(phi.evaluate_unchecked(x, 1.0 / beta));
    }
    Ok(A0Report {
        pass: at_beta <= 1.0 + crate::default_slack(1.0)
            && at_inverse + crate::default_slack(1.0) >= 1.0,
        beta,
        phi_at_beta_max: at_beta,
        phi_at_inverse_min: at_inverse,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub pass: bool,
    pub vanishes_at_zero: bool,
    pub monotone: bool,
    pub diverges: bool,
    pub witness: Option<(Point, f64)>,
}

/// Sampled membership in Φ_w: `φ(x, 0) = 0`, nondecreasing along the
/// sampler's `t` ladder, and divergence at the largest sampled `t` in the
/// sense `φ(x, T) ≥ (T/L)·φ(x, 1)`.
pub fn check_structure(phi: &PhiFunction, sampler: &Sampler) -> Result<StructureReport> {
    if sampler.points.is_empty() || sampler.ts.is_empty() {
        return Err(Error::InvalidArgument("empty sample plan".into()));
    }
    let mut ts = sampler.ts.clone();
    ts.sort_by(f64::total_cmp);
    let t_max = *ts.last().unwrap_or(&1.0);
    let mut report = StructureReport {
        pass: true,
        vanishes_at_zero: true,
        monotone: true,
        diverges: true,
        witness: None,
    };
    let ln_l = log(phi.hypotheses.ainc_constant);
    for x in &sampler.points {
        if phi.evaluate_unchecked(x, 0.0) != 0.0 {
            report.vanishes_at_zero = false;
            report.witness.get_or_insert((*x, 0.0));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &ts {
            let v = phi.log_evaluate_unchecked(x, t);
            if v.is_nan() {
                return Err(Error::NonFinite {
                    what: "phi evaluation",
                });
            }
            if v < prev - 1e-12 * (1.0 + fabs(prev)) {
                report.monotone = false;
                report.witness.get_or_insert((*x, t));
            }
            prev = prev.max(v);
        }
        if t_max > 1.0 {
            let top = phi.log_evaluate_unchecked(x, t_max);
            let anchor = phi.log_evaluate_unchecked(x, 1.0);
            let needed = log(t_max) + anchor - ln_l;
            if !(top > f64::NEG_INFINITY && top + 1e-12 >= needed) {
                report.diverges = false;
                report.witness.get_or_insert((*x, t_max));
            }
        }
    }
    report.pass = report.vanishes_at_zero && report.monotone && report.diverges;
    Ok(report)
}

/// A ladder `φ₁, φ₂, …` with sampled exponent extremes `p_n^±`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSequence {
    entries: Vec<PhiFunction>,
    p_minus: Vec<f64>,
    p_plus: Vec<f64>,
    ratio_bound: Option<f64>,
}

impl ExponentSequence {
    pub fn new(
        entries: Vec<PhiFunction>,
        lattice: &[Point],
        ratio_bound: Option<f64>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty exponent sequence".into()));
        }
        if lattice.is_empty() {
            return Err(Error::InvalidArgument("empty lattice".into()));
        }
        if let Some(beta) = ratio_bound {
            if !(beta >= 1.0) {
                return Err(Error::Domain {
                    what: "ratio bound beta",
                    value: beta,
                });
            }
        }
        let mut p_minus = Vec::with_capacity(entries.len());
        let mut p_plus = Vec::with_capacity(entries.len());
        for phi in &entries {
            phi.validate_on(lattice)?;
            let (lo, hi) =
                lattice
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                        let p = phi.lower_exponent(x);
                        (lo.min(p), hi.max(p))
                    });
            p_minus.push(lo);
            p_plus.push(hi);
        }
        Ok(ExponentSequence {
            entries,
            p_minus,
            p_plus,
            ratio_bound,
        })
    }

    /// `t^{p_k}` with `p_k = start · factor^k`, `k < count`.
    pub fn power_ladder(start: f64, factor: f64, count: usize, lattice: &[Point]) -> Result<Self> {
        let entries = (0..count)
            .map(|k| PhiFunction::power(start * pow(factor, k as f64)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries, lattice, None)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PhiFunction] {
        &self.entries
    }

    pub fn p_minus(&self) -> &[f64] {
        &self.p_minus
    }

    pub fn p_plus(&self) -> &[f64] {
        &self.p_plus
    }

    pub fn ratio_bound(&self) -> Option<f64> {
        self.ratio_bound
    }

    /// Finite-prefix surrogate for `p_n⁻ → ∞`: strictly increasing entries.
    pub fn check_divergent(&self) -> Result<()> {
        for (n, w) in self.p_minus.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::Hypothesis {
                    name: "p-divergence",
                    detail: format!(
                        "p_minus not strictly increasing at entry {}: {} -> {}",
                        n + 2,
                        w[0],
                        w[1]
                    ),
                });
            }
        }
        Ok(())
    }

    /// `p_n⁺ / p_n⁻ ≤ β` for every entry; passes when no bound is set.
    pub fn check_ratio(&self) -> Result<()> {
        let Some(beta) = self.ratio_bound else {
            return Ok(());
        };
        for n in 0..self.len() {
            let ratio = self.p_plus[n] / self.p_minus[n];
            if ratio > beta * (1.0 + 1e-12) {
                return Err(Error::Hypothesis {
                    name: "ratio-bound",
                    detail: format!("entry {}: p+/p- = {ratio} exceeds beta = {beta}", n + 1),
                });
            }
        }
        Ok(())
    }

    /// Largest sampled `p_n⁺ / p_n⁻`.
    pub fn max_ratio(&self) -> f64 {
        self.p_plus
            .iter()
            .zip(&self.p_minus)
            .map(|(hi, lo)| hi / lo)
            .fold(1.0, f64::max)
    }
}
