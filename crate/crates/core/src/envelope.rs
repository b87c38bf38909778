//! Scalar convex envelopes on a uniform `ξ`-lattice and the limit density
//! `Q∞f = sup_n (conv f^n)^{1/n}`.
//!
//! In the scalar case the quasiconvex envelope is the convex envelope, so
//! everything here reduces to lower hulls of point sets in the plane. The
//! hull of `f^n` is built directly on `(ξ, n·ln f)`: orientation tests
//! compare `ln` of chord values, which keeps `n` in the thousands exact
//! enough and lets zeros of `f` in as `-∞` without a floor.

use alloc::format;
use alloc::vec::Vec;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, log1p, log_add_exp};

/// `f(x_fixed, ·)` sampled on `ξ_i = -R + i·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    xi: Vec<f64>,
    values: Vec<f64>,
    radius: f64,
    step: f64,
    x_fixed: Point,
}

impl SampledDensity {
    /// `points` lattice points on `[-radius, radius]`.
    pub fn uniform(
        radius: f64,
        points: usize,
        x_fixed: Point,
        mut f: impl FnMut(f64) -> f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain {
                what: "lattice radius",
                value: radius,
            });
        }
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "lattice needs at least 2 points, got {points}"
            )));
        }
        let step = 2.0 * radius / (points - 1) as f64;
        let xi: Vec<f64> = (0..points)
            .map(|i| {
                if i + 1 == points {
                    radius
                } else {
                    -radius + i as f64 * step
                }
            })
            .collect();
        let values = xi.iter().map(|&s| f(s)).collect();
        Self::from_values(xi, values, x_fixed)
    }

    /// Arbitrary strictly increasing lattice; `radius` and `step` record the
    /// half-width and the largest spacing.
    pub fn from_values(xi: Vec<f64>, values: Vec<f64>, x_fixed: Point) -> Result<Self> {
        if xi.len() != values.len() || xi.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "lattice/value length mismatch or too short: {} vs {}",
                xi.len(),
                values.len()
            )));
        }
        if xi.windows(2).any(|w| !(w[1] > w[0])) || xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "lattice must be finite and strictly increasing".into(),
            ));
        }
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain {
                what: "density value (must be finite and >= 0)",
                value: bad,
            });
        }
        let step = xi.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let radius = fabs(xi[0]).max(fabs(xi[xi.len() - 1]));
        Ok(SampledDensity {
            xi,
            values,
            radius,
            step,
            x_fixed,
        })
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn x_fixed(&self) -> Point {
        self.x_fixed
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Same lattice, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::from_values(self.xi.clone(), values, self.x_fixed)
    }

    /// Linear interpolation of the sampled values; constant extension
    /// outside the lattice is refused.
    pub fn interpolate(&self, s: f64) -> Result<f64> {
        interpolate(&self.xi, &self.values, s)
    }
}

pub(crate) fn interpolate(xi: &[f64], values: &[f64], s: f64) -> Result<f64> {
    let n = xi.len();
    if !(s >= xi[0] && s <= xi[n - 1]) {
        return Err(Error::Domain {
            what: "argument outside the envelope lattice",
            value: s,
        });
    }
    let k = match xi.binary_search_by(|v| v.total_cmp(&s)) {
        Ok(k) => return Ok(values[k]),
        Err(k) => k,
    };
    let (a, b) = (k - 1, k);
    let theta = (s - xi[a]) / (xi[b] - xi[a]);
    Ok(values[a] + theta * (values[b] - values[a]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub values: Vec<f64>,
    /// `max_i (f_i − envelope_i)`; zero when the input is already convex.
    pub certified_gap: f64,
    /// Last ladder entry evaluated (`1` for a plain convex envelope).
    pub reached_n: u32,
    /// Sup-norm increment contributed by the last ladder entry.
    pub last_increment: f64,
}

fn cross(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Vertices of the lower convex hull by a monotone-chain pass.
fn lower_hull(xi: &[f64], f: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xi.len());
    for i in 0..xi.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if cross((xi[a], f[a]), (xi[b], f[b]), (xi[i], f[i])) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Chord of `(ξ_a, f_a)`–`(ξ_b, f_b)` evaluated at `s`.
pub(crate) fn chord(xa: f64, fa: f64, xb: f64, fb: f64, s: f64) -> f64 {
    fa + (fb - fa) * (s - xa) / (xb - xa)
}

fn fill_from_hull(xi: &[f64], f: &[f64], hull: &[usize]) -> Vec<f64> {
    let mut out = f.to_vec();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for i in a + 1..b {
            out[i] = chord(xi[a], f[a], xi[b], f[b], xi[i]).min(f[i]);
        }
    }
    out
}

/// Lower convex envelope of the sampled graph, exact on the lattice.
pub fn convex_envelope(d: &SampledDensity) -> Result<EnvelopeResult> {
    if d.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "convex envelope needs at least 3 lattice points, got {}",
            d.len()
        )));
    }
    let hull = lower_hull(&d.xi, &d.values);
    let values = fill_from_hull(&d.xi, &d.values, &hull);
    let certified_gap = d
        .values
        .iter()
        .zip(&values)
        .map(|(f, e)| f - e)
        .fold(0.0, f64::max);
    Ok(EnvelopeResult {
        values,
        certified_gap,
        reached_n: 1,
        last_increment: 0.0,
    })
}

/// `ln` of the chord between `(ξ_a, e^{la})` and `(ξ_b, e^{lb})` at `s`.
fn log_chord(xa: f64, la: f64, xb: f64, lb: f64, s: f64) -> f64 {
    let theta = (s - xa) / (xb - xa);
    let wa = if theta >= 1.0 {
        f64::NEG_INFINITY
    } else {
        log1p(-theta)
    };
    let wb = if theta <= 0.0 {
        f64::NEG_INFINITY
    } else {
        log(theta)
    };
    log_add_exp(wa + la, wb + lb)
}

/// `ln conv(e^{y})` on the lattice, for `y` possibly `-∞`.
fn log_envelope(xi: &[f64], y: &[f64]) -> Vec<f64> {
    let mut hull: Vec<usize> = Vec::with_capacity(xi.len());
    for i in 0..xi.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or above the chord a–i
            if y[b] >= log_chord(xi[a], y[a], xi[i], y[i], xi[b]) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = y.to_vec();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for i in a + 1..b {
            out[i] = log_chord(xi[a], y[a], xi[b], y[b], xi[i]).min(y[i]);
        }
    }
    out
}

/// `e_n = (conv f^n)^{1/n}` on the lattice.
pub fn root_envelope(d: &SampledDensity, n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "ladder entries must be positive".into(),
        ));
    }
    if d.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "convex envelope needs at least 3 lattice points, got {}",
            d.len()
        )));
    }
    let nf = n as f64;
    let y: Vec<f64> = d
        .values
        .iter()
        .map(|&v| {
            if v == 0.0 {
                f64::NEG_INFINITY
            } else {
                nf * log(v)
            }
        })
        .collect();
    Ok(log_envelope(&d.xi, &y)
        .into_iter()
        .zip(&d.values)
        .map(|(l, &f)| {
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                exp(l / nf).min(f)
            }
        })
        .collect())
}

fn check_ladder(ladder: &[u32]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("empty ladder".into()));
    }
    if ladder[0] == 0 || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "ladder must be positive and strictly increasing, got {ladder:?}"
        )));
    }
    Ok(())
}

/// Increment below which a ladder step counts as stalled.
pub const TRUNCATION_INCREMENT: f64 = 1e-8;

/// `max_n e_n` over the ladder, stopping once two consecutive steps raise
/// the running maximum by less than [`TRUNCATION_INCREMENT`].
pub fn q_infinity(d: &SampledDensity, ladder: &[u32]) -> Result<EnvelopeResult> {
    check_ladder(ladder)?;
    let mut best = root_envelope(d, ladder[0])?;
    let mut reached = ladder[0];
    let mut last_increment = f64::INFINITY;
    let mut quiet = 0;
    for &n in &ladder[1..] {
        let e = root_envelope(d, n)?;
        let mut inc = 0.0f64;
        for (b, v) in best.iter_mut().zip(e) {
            if v > *b {
                inc = inc.max(v - *b);
                *b = v;
            }
        }
        reached = n;
        last_increment = inc;
        if inc < TRUNCATION_INCREMENT {
            quiet += 1;
            if quiet == 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if ladder.len() == 1 {
        last_increment = 0.0;
    }
    let certified_gap = d
        .values
        .iter()
        .zip(&best)
        .map(|(f, e)| f - e)
        .fold(0.0, f64::max);
    Ok(EnvelopeResult {
        values: best,
        certified_gap,
        reached_n: reached,
        last_increment,
    })
}

/// The doubling ladder `1, 2, 4, …, 2^k`.
pub fn doubling_ladder(max_exponent: u32) -> Vec<u32> {
    (0..=max_exponent).map(|k| 1u32 << k).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelConvexityReport {
    pub pass: bool,
    /// `max_m f(m) − max(min_{a<m} f(a), min_{b>m} f(b))`.
    pub worst_excess: f64,
    /// Lattice indices `(a, m, b)` of the worst violation.
    pub witness: Option<(usize, usize, usize)>,
}

/// `f(m) ≤ max(f(a), f(b))` for all `a < m < b`, in one pass using prefix
/// and suffix minima.
pub fn level_convexity_check(d: &SampledDensity) -> LevelConvexityReport {
    let f = &d.values;
    let n = f.len();
    let mut suffix_arg = alloc::vec![0usize; n];
    if n > 0 {
        suffix_arg[n - 1] = n - 1;
        for i in (0..n - 1).rev() {
            let next = suffix_arg[i + 1];
            suffix_arg[i] = if f[i] <= f[next] { i } else { next };
        }
    }
    let mut report = LevelConvexityReport {
        pass: true,
        worst_excess: f64::NEG_INFINITY,
        witness: None,
    };
    let mut prefix_arg = 0usize;
    for m in 1..n.saturating_sub(1) {
        if f[m - 1] < f[prefix_arg] {
            prefix_arg = m - 1;
        }
        let b = suffix_arg[m + 1];
        let rhs = f[prefix_arg].max(f[b]);
        let excess = f[m] - rhs;
        if excess > report.worst_excess {
            report.worst_excess = excess;
            if excess > crate::default_slack(rhs) {
                report.witness = Some((prefix_arg, m, b));
                report.pass = false;
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport {
    pub pass: bool,
    /// Largest `e_{n₁}(ξ) − e_{n₂}(ξ)` over consecutive ladder entries.
    pub worst_decrease: f64,
    /// `(n₁, n₂, lattice index)` of the worst decrease, if it fails.
    pub witness: Option<(u32, u32, usize)>,
    /// `(n₁, n₂, lattice index, amount)` of the largest strict increase.
    pub largest_increase: Option<(u32, u32, usize, f64)>,
    /// `e_n` for every ladder entry.
    pub envelopes: Vec<Vec<f64>>,
}

/// `e_{n₁} ≤ e_{n₂} + tol` for consecutive `n₁ < n₂` of the ladder.
pub fn monotone_ladder_check(d: &SampledDensity, ladder: &[u32], tol: f64) -> Result<LadderReport> {
    check_ladder(ladder)?;
    let envelopes = ladder
        .iter()
        .map(|&n| root_envelope(d, n))
        .collect::<Result<Vec<_>>>()?;
    let mut report = LadderReport {
        pass: true,
        worst_decrease: f64::NEG_INFINITY,
        witness: None,
        largest_increase: None,
        envelopes: Vec::new(),
    };
    let mut best_inc = 0.0;
    for k in 1..ladder.len() {
        for (i, (lo, hi)) in envelopes[k - 1].iter().zip(&envelopes[k]).enumerate() {
            let dec = lo - hi;
            if dec > report.worst_decrease {
                report.worst_decrease = dec;
                if dec > tol {
                    report.pass = false;
                    report.witness = Some((ladder[k - 1], ladder[k], i));
                }
            }
            if -dec > best_inc {
                best_inc = -dec;
                report.largest_increase = Some((ladder[k - 1], ladder[k], i, -dec));
            }
        }
    }
    report.envelopes = envelopes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    const X: Point = [0.0, 0.0];

    /// `min f(ξ_i)` over all chords `(a, b)` with `a ≤ i ≤ b`, including the
    /// degenerate chord `a = b = i`.
    fn brute_chords(xi: &[f64], f: &[f64]) -> Vec<f64> {
        let n = xi.len();
        let mut out = f.to_vec();
        for a in 0..n {
            for b in a + 2..n {
                for i in a + 1..b {
                    let c = chord(xi[a], f[a], xi[b], f[b], xi[i]);
                    if c < out[i] {
                        out[i] = c;
                    }
                }
            }
        }
        out
    }

    fn wells(kappa_minus: f64, kappa_plus: f64) -> impl Fn(f64) -> f64 {
        move |s: f64| (fabs(s - 1.0) + kappa_plus).min(fabs(s + 1.0) + kappa_minus)
    }

    /// Level-set convexification: `Q(ξ) = min{t : ξ ∈ conv{f ≤ t}}`, with
    /// `t` ranging over the sampled values.
    fn level_set_hull(f: &[f64]) -> Vec<f64> {
        let n = f.len();
        let mut levels = f.to_vec();
        levels.sort_by(f64::total_cmp);
        let mut out = vec![f64::INFINITY; n];
        for &t in &levels {
            let first = f.iter().position(|&v| v <= t);
            let last = f.iter().rposition(|&v| v <= t);
            if let (Some(a), Some(b)) = (first, last) {
                for o in &mut out[a..=b] {
                    if t < *o {
                        *o = t;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn convex_input_is_unchanged() {
        let d = SampledDensity::uniform(2.0, 101, X, |s| s * s).unwrap();
        let e = convex_envelope(&d).unwrap();
        assert_eq!(e.values, d.values());
        assert_eq!(e.certified_gap, 0.0);
    }

    #[test]
    fn quadratic_wells_envelope() {
        let d = SampledDensity::uniform(2.0, 401, X, |s| {
            ((s - 1.0) * (s - 1.0)).min((s + 1.0) * (s + 1.0))
        })
        .unwrap();
        let e = convex_envelope(&d).unwrap();
        for (s, v) in d.xi().iter().zip(&e.values) {
            let expect = if fabs(*s) <= 1.0 {
                0.0
            } else {
                (fabs(*s) - 1.0).powi(2)
            };
            assert!((v - expect).abs() < 1e-12, "xi = {s}: {v} vs {expect}");
        }
        assert_eq!(e.values, brute_chords(d.xi(), d.values()));
    }

    #[test]
    fn spike_above_hull_is_ignored() {
        let base = SampledDensity::uniform(1.0, 21, X, fabs).unwrap();
        let mut spiked = base.values().to_vec();
        spiked[7] += 5.0;
        let spiked = base.with_values(spiked).unwrap();
        assert_eq!(
            convex_envelope(&base).unwrap().values,
            convex_envelope(&spiked).unwrap().values
        );
    }

    #[test]
    fn too_few_points_is_rejected() {
        let d = SampledDensity::from_values(vec![0.0, 1.0], vec![1.0, 2.0], X).unwrap();
        assert!(convex_envelope(&d).is_err());
    }

    #[test]
    fn q_infinity_of_level_convex_density_is_itself() {
        let d = SampledDensity::uniform(2.0, 201, X, fabs).unwrap();
        let q = q_infinity(&d, &doubling_ladder(10)).unwrap();
        for (a, b) in q.values.iter().zip(d.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(q.last_increment < 1e-6);
    }

    #[test]
    fn q_infinity_of_constant() {
        let d = SampledDensity::uniform(3.0, 31, X, |_| 0.7).unwrap();
        let q = q_infinity(&d, &doubling_ladder(10)).unwrap();
        assert!(q.values.iter().all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn q_infinity_double_well_matches_level_sets() {
        let kappa = 0.1;
        let d = SampledDensity::uniform(3.0, 601, X, wells(kappa, kappa)).unwrap();
        let q = q_infinity(&d, &doubling_ladder(10)).unwrap();
        let oracle = level_set_hull(d.values());
        for ((s, a), b) in d.xi().iter().zip(&q.values).zip(&oracle) {
            assert!((a - b).abs() < 1e-6, "xi = {s}: {a} vs {b}");
            assert!((b - ((fabs(*s) - 1.0).max(0.0) + kappa)).abs() < 1e-12);
        }
        assert!(level_convexity_check(&d.with_values(q.values).unwrap()).pass);
    }

    #[test]
    fn asymmetric_wells_increase_strictly() {
        let d = SampledDensity::uniform(2.0, 401, X, wells(0.1, 0.3)).unwrap();
        let ladder = doubling_ladder(8);
        let r = monotone_ladder_check(&d, &ladder, 1e-12).unwrap();
        assert!(r.pass);
        let (_, _, i, amount) = r.largest_increase.unwrap();
        assert!(amount > 1e-2 && fabs(d.xi()[i]) < 1.0);
        // e_n of the symmetric well is already its limit at every n
        let sym = SampledDensity::uniform(2.0, 401, X, wells(0.1, 0.1)).unwrap();
        let r = monotone_ladder_check(&sym, &ladder, 1e-12).unwrap();
        assert!(r.largest_increase.map_or(0.0, |t| t.3) < 1e-12);
    }

    #[test]
    fn zeros_survive_large_powers() {
        let d = SampledDensity::uniform(1.0, 41, X, |s| (fabs(s) - 0.5).max(0.0)).unwrap();
        let e = root_envelope(&d, 1 << 12).unwrap();
        for (a, b) in e.iter().zip(d.values()) {
            assert!(a.is_finite() && *a <= *b);
        }
        assert_eq!(e[20], 0.0);
    }

    #[test]
    fn level_convexity_examples() {
        let d = SampledDensity::uniform(2.0, 41, X, fabs).unwrap();
        assert!(level_convexity_check(&d).pass);
        let w = SampledDensity::uniform(2.0, 41, X, wells(0.0, 0.0)).unwrap();
        let r = level_convexity_check(&w);
        assert!(!r.pass);
        let (a, m, b) = r.witness.unwrap();
        assert!(a < m && m < b);
        assert!(fabs(w.xi()[m]) < 1e-12);
    }

    #[test]
    fn ladder_must_increase() {
        let d = SampledDensity::uniform(1.0, 5, X, fabs).unwrap();
        assert!(q_infinity(&d, &[2, 2]).is_err());
        assert!(q_infinity(&d, &[]).is_err());
        assert!(monotone_ladder_check(&d, &[0, 1], 0.0).is_err());
    }

    fn density_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..5.0, 3..60)
    }

    proptest! {
        #[test]
        fn envelope_matches_chords(values in density_strategy()) {
            let n = values.len();
            let d = SampledDensity::uniform(1.0, n, X, |_| 0.0).unwrap().with_values(values).unwrap();
            let e = convex_envelope(&d).unwrap();
            let brute = brute_chords(d.xi(), d.values());
            for (a, b) in e.values.iter().zip(&brute) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
            for w in e.values.windows(3) {
                prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-10 * (1.0 + w[1].abs()));
            }
        }

        #[test]
        fn q_infinity_is_level_convex_and_below(values in density_strategy()) {
            let n = values.len();
            let d = SampledDensity::uniform(1.0, n, X, |_| 0.0).unwrap().with_values(values).unwrap();
            let q = q_infinity(&d, &doubling_ladder(10)).unwrap();
            for (a, b) in q.values.iter().zip(d.values()) {
                prop_assert!(*a <= *b);
            }
            let qd = d.with_values(q.values.clone()).unwrap();
            prop_assert!(level_convexity_check(&qd).pass);
        }

        #[test]
        fn q_infinity_is_idempotent(values in density_strategy()) {
            let n = values.len();
            let d = SampledDensity::uniform(1.0, n, X, |_| 0.0).unwrap().with_values(values).unwrap();
            let ladder = doubling_ladder(10);
            let q = q_infinity(&d, &ladder).unwrap();
            let again = q_infinity(&d.with_values(q.values.clone()).unwrap(), &ladder).unwrap();
            for (a, b) in q.values.iter().zip(&again.values) {
                prop_assert!((a - b).abs() <= 1e-6);
            }
        }

        #[test]
        fn growth_bounds_survive(alpha in 0.1f64..2.0, c in 2.0f64..4.0, gamma in 1.0f64..3.0, seed in any::<u64>()) {
            let mut s = seed;
            let d = SampledDensity::uniform(2.0, 81, X, |x| {
                let lo = alpha * fabs(x).powf(gamma);
                let hi = c * (fabs(x).powf(gamma) + 1.0);
                let u = (crate::math::unit_symmetric(&mut s) + 1.0) / 2.0;
                lo + u * (hi - lo)
            }).unwrap();
            let q = q_infinity(&d, &doubling_ladder(8)).unwrap();
            for (x, v) in d.xi().iter().zip(&q.values) {
                prop_assert!(*v >= alpha * fabs(*x).powf(gamma) - 1e-9);
                prop_assert!(*v <= c * (fabs(*x).powf(gamma) + 1.0) + 1e-9);
            }
        }
    }
}
