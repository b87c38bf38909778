//! Acceptance criteria 1-9. Runs as a plain binary (no libtest harness) and
//! prints one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use orlicz::format::as_f64;
use orlicz::runner::{self, RunOptions};
use orlicz::{gridio, CliError, ExperimentConfig};
use orlicz_core::envelope::{
    convex_envelope, doubling_ladder, level_convexity_check, monotone_ladder_check, q_infinity,
};
use orlicz_core::norms::{luxemburg_norm, modular, EmbeddingCheck};
use orlicz_core::supremal::{EnergyFunctional, EnergyKind};
use orlicz_core::{
    Coefficient, Grid, GridFunction, Integrand, IntegrandKind, OrliczPreset, PhiFunction, PhiKind,
    SampledDensity,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn config(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&configs().join(name)).expect("sample config parses")
}

/// Runs a sample config into a fresh directory and returns the report JSON.
fn run_config(name: &str, stem: &str) -> Result<(Value, tempfile::TempDir), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let opts = RunOptions {
        out: Some(dir.path().to_path_buf()),
        ..RunOptions::default()
    };
    let outcome = runner::run(&config(name), &configs(), &opts).map_err(|e| e.to_string())?;
    if outcome.failures() > 0 {
        return Err(format!("run assertions failed:\n{}", outcome.summary));
    }
    let text = std::fs::read_to_string(dir.path().join(format!("{stem}.json")))
        .map_err(|e| e.to_string())?;
    let report = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((report, dir))
}

fn rows(report: &Value) -> &[Value] {
    report["rows"].as_array().map_or(&[], Vec::as_slice)
}

fn num(row: &Value, key: &str) -> f64 {
    as_f64(&row[key]).unwrap_or(f64::NAN)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_field(rng: &mut ChaCha8Rng, cells: usize) -> Vec<f64> {
    let scale = rng.gen_range(0.2..2.0);
    (0..cells).map(|_| scale * rng.gen::<f64>()).collect()
}

fn phi_infinity_recovery() -> Outcome {
    let phi = PhiFunction::infinity();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grids = [
        Grid::interval(0.0, 1.0, 128).unwrap(),
        Grid::rectangle([0.0, 0.0], [2.0, 1.0], [16, 8]).unwrap(),
    ];
    let (mut zeros, mut infinities) = (0, 0);
    for k in 0..100 {
        let grid = &grids[k % 2];
        let mut g = random_field(&mut rng, grid.cell_count());
        if k % 10 == 0 {
            let i = rng.gen_range(0..g.len());
            g.iter_mut().for_each(|v| *v = v.min(1.0));
            g[i] = 1.0;
        }
        let sup = g.iter().copied().fold(0.0, f64::max);
        let norm = luxemburg_norm(&phi, grid, &g, 1e-12).map_err(|e| e.to_string())?;
        ensure(norm.value.to_bits() == sup.to_bits(), || {
            format!("field {k}: norm {} vs sup {sup}", norm.value)
        })?;
        let rho = modular(&phi, grid, &g).map_err(|e| e.to_string())?.value;
        let expect = if sup <= 1.0 { 0.0 } else { f64::INFINITY };
        ensure(rho == expect, || format!("field {k}: rho {rho}, sup {sup}"))?;
        if expect == 0.0 {
            zeros += 1;
        } else {
            infinities += 1;
        }
    }
    Ok(format!(
        "100 fields, norm == sup bitwise, rho = 0 on {zeros} and +inf on {infinities}"
    ))
}

fn norm_convergence() -> Outcome {
    let (report, _dir) = run_config("norm-convergence.toml", "norms")?;
    let rows = rows(&report);
    ensure(rows.len() == 12, || format!("{} rows", rows.len()))?;
    let mut worst = 0.0f64;
    for row in rows {
        let p = num(row, "p_minus");
        let exact = (1.0 + p).powf(-1.0 / p);
        worst = worst.max((num(row, "norm") - exact).abs());
    }
    ensure(worst <= 1e-3, || {
        format!("max |norm - (1+p)^(-1/p)| = {worst}")
    })?;
    let last = rows.last().unwrap();
    let gap = 1.0 - num(last, "norm");
    ensure(gap < 3e-3, || format!("gap to 1 at p = 4096 is {gap}"))?;
    Ok(format!(
        "max deviation from (1+p)^(-1/p) {worst:.2e}, gap at p = 4096 {gap:.3e}"
    ))
}

fn catalog(lattice: &[[f64; 2]]) -> Vec<PhiFunction> {
    let kinds = vec![
        PhiKind::ConstantPower { p: 3.0 },
        PhiKind::VariableExponent {
            p: Coefficient::Sinusoidal { a: 3.0, b: 1.0 },
        },
        PhiKind::DoublePhase {
            p: 2.0,
            q: 4.0,
            a: Coefficient::Affine { a: 0.5, b: 1.0 },
        },
        PhiKind::VariableDoublePhase {
            p: Coefficient::Affine { a: 2.0, b: 1.0 },
            q: Coefficient::Affine { a: 4.0, b: 1.0 },
            a: Coefficient::Sinusoidal { a: 1.0, b: 0.5 },
        },
        PhiKind::WeightedPower {
            weight: Coefficient::Affine { a: 0.5, b: 2.0 },
            p: 2.5,
        },
        PhiKind::Orlicz(OrliczPreset::Plateau { p: 2.0, width: 1.5 }),
    ];
    kinds
        .into_iter()
        .map(|k| PhiFunction::with_sampled_hypotheses(k, lattice).unwrap())
        .collect()
}

fn embedding_constant() -> Outcome {
    let grid = Grid::interval(0.0, 1.0, 200).unwrap();
    let lattice = grid.cell_centers();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fields: Vec<Vec<f64>> = (0..50)
        .map(|_| random_field(&mut rng, grid.cell_count()))
        .collect();
    let mut checks = 0;
    for phi in catalog(&lattice) {
        let h = *phi.hypotheses();
        let check = EmbeddingCheck::prepare(&phi, &grid, h.ainc_rate, h.ainc_constant, h.anchor_c)
            .map_err(|e| format!("{}: {e}", phi.kind().name()))?;
        let expect = (2.0 * h.ainc_constant * (1.0 + h.anchor_c)).powf(1.0 / h.ainc_rate);
        ensure((check.constant() - expect).abs() <= 1e-12 * expect, || {
            format!(
                "{}: constant {} vs {expect}",
                phi.kind().name(),
                check.constant()
            )
        })?;
        for (i, g) in fields.iter().enumerate() {
            let r = check.check(g, 1e-10).map_err(|e| e.to_string())?;
            ensure(r.pass, || format!("{} field {i}: {r:?}", phi.kind().name()))?;
            checks += 1;
        }
    }
    let mut previous = f64::INFINITY;
    let mut last = f64::NAN;
    for k in 1..=12 {
        let p = f64::from(1u32 << k);
        let phi = PhiFunction::power(p).unwrap();
        let check = EmbeddingCheck::prepare(&phi, &grid, p, 1.0, 1.0).map_err(|e| e.to_string())?;
        let expect = 4f64.powf(1.0 / p);
        ensure((check.constant() - expect).abs() <= 1e-12, || {
            format!("p = {p}: {}", check.constant())
        })?;
        ensure(check.constant() < previous, || {
            format!("constant not decreasing at p = {p}")
        })?;
        for g in &fields[..5] {
            ensure(
                check.check(g, 1e-10).map_err(|e| e.to_string())?.pass,
                || format!("p = {p}"),
            )?;
        }
        previous = check.constant();
        last = previous;
    }
    ensure((last - 1.0).abs() <= 1e-2, || {
        format!("constant at p = 4096 is {last}")
    })?;
    Ok(format!(
        "{checks} catalog checks, constant at p = 4096 is {last:.6}"
    ))
}

fn inequality_suite() -> Outcome {
    let (report, _dir) = run_config("inequality-suite.toml", "suite")?;
    let rows = rows(&report);
    ensure(rows.len() == 2000, || format!("{} rows", rows.len()))?;
    let tol = 1e-10;
    let mut violations = 0;
    for row in rows {
        let (lhs, rhs) = (num(row, "lhs"), num(row, "rhs"));
        let slack = 2.0 * tol + 1e-12 * rhs.abs().max(1.0);
        let ok = match row["check"].as_str().unwrap_or("") {
            "unit-ball" => lhs >= 1.0 - 2.0 * tol || rhs <= 1.0 + slack,
            "sandwich" => {
                let v = num(row, "value");
                lhs <= v + slack && v <= rhs + slack
            }
            "embedding" | "holder" => lhs <= rhs * (1.0 + 1e-9) + slack,
            other => return Err(format!("unknown check {other}")),
        };
        if !ok || row["pass"] != Value::Bool(true) {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("500 pairs x 4 inequalities, zero violations".into())
}

fn weighted_gamma() -> Outcome {
    let (report, dir) = run_config("gamma-weighted.toml", "gamma")?;
    let oracle = 1.0 / LN_2;
    let last = rows(&report).last().ok_or("no rows")?;
    let value_gap = (num(last, "min_value") - oracle).abs();
    ensure(value_gap <= 5e-3, || {
        format!("|m_n - 1/ln 2| = {value_gap}")
    })?;

    let text =
        std::fs::read_to_string(dir.path().join("minimizer.csv")).map_err(|e| e.to_string())?;
    let u = gridio::read_csv(&text).map_err(|e| e.to_string())?;
    let grid = *u.grid();
    let exact = GridFunction::scalar(grid, |x| (1.0 + x[0]).log2()).unwrap();
    let h = grid.spacing(0);
    let d: Vec<f64> = u
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let l1 = h * (d.iter().sum::<f64>() - 0.5 * (d[0] + d[d.len() - 1]));
    ensure(l1 < 5e-3, || format!("L1 distance to log2(1 + x) is {l1}"))?;

    let lattice = grid.cell_centers();
    let integrand = Integrand::with_certificate(
        IntegrandKind::Weighted {
            weight: Coefficient::Affine { a: 1.0, b: 1.0 },
        },
        &lattice,
    )
    .unwrap();
    let p = num(last, "p_minus");
    let energy = EnergyFunctional::new(
        EnergyKind::Norm(PhiFunction::power(p).unwrap()),
        integrand,
        grid,
    )
    .unwrap();
    let recovery = (energy.energy(&exact).map_err(|e| e.to_string())? - oracle).abs();
    ensure(recovery <= 5e-3, || {
        format!("|F_n(u_oracle) - 1/ln 2| = {recovery}")
    })?;
    Ok(format!(
        "value gap {value_gap:.2e}, recovery gap {recovery:.2e}, L1 gap {l1:.2e} at p = {p}"
    ))
}

fn modular_dichotomy() -> Outcome {
    let (report, _dir) = run_config("gamma-modular.toml", "modular")?;
    let mut worst = 0.0f64;
    let mut finals = Vec::new();
    for (name, s) in [
        ("slope-0.5", 0.5f64),
        ("slope-1.0", 1.0),
        ("slope-1.5", 1.5),
    ] {
        let series: Vec<&Value> = rows(&report)
            .iter()
            .filter(|r| r["field"] == name)
            .collect();
        ensure(series.len() == 7, || {
            format!("{name}: {} rows", series.len())
        })?;
        for row in &series {
            let p = num(row, "p_minus");
            let closed = p * s.ln() - p.ln();
            worst = worst.max((num(row, "log_energy") - closed).abs());
        }
        let logs: Vec<f64> = series.iter().map(|r| num(r, "log_energy")).collect();
        let monotone = if s > 1.0 {
            logs.windows(2).all(|w| w[1] > w[0]) && *logs.last().unwrap() > 0.0
        } else {
            logs.windows(2).all(|w| w[1] < w[0]) && *logs.last().unwrap() < (1e-2f64).ln()
        };
        ensure(monotone, || format!("{name}: ln E_n = {logs:?}"))?;
        finals.push(format!("{name}: ln E = {:.3}", logs.last().unwrap()));
    }
    ensure(worst <= 1e-9, || format!("log-space deviation {worst}"))?;
    Ok(format!(
        "closed forms within {worst:.1e}; {}",
        finals.join(", ")
    ))
}

fn presets() -> Vec<(&'static str, IntegrandKind)> {
    vec![
        ("abs", IntegrandKind::Abs),
        (
            "weighted",
            IntegrandKind::Weighted {
                weight: Coefficient::Affine { a: 1.0, b: 1.0 },
            },
        ),
        ("power", IntegrandKind::Power { gamma: 3.0 }),
        (
            "shifted-weighted",
            IntegrandKind::ShiftedWeighted {
                weight: Coefficient::Constant(1.5),
                shift: Coefficient::Constant(0.5),
            },
        ),
        (
            "double-well",
            IntegrandKind::DoubleWell {
                kappa_minus: 0.1,
                kappa_plus: 0.1,
            },
        ),
        (
            "asymmetric-double-well",
            IntegrandKind::DoubleWell {
                kappa_minus: 0.1,
                kappa_plus: 0.6,
            },
        ),
        ("u-weighted-abs", IntegrandKind::UWeightedAbs),
    ]
}

/// `min` over all chords through lattice points `a ≤ i ≤ b`.
fn chord_oracle(xi: &[f64], f: &[f64]) -> Vec<f64> {
    let n = xi.len();
    (0..n)
        .map(|i| {
            let mut best = f[i];
            for a in 0..i {
                for b in i + 1..n {
                    let c = f[a] + (f[b] - f[a]) * (xi[i] - xi[a]) / (xi[b] - xi[a]);
                    best = best.min(c);
                }
            }
            best
        })
        .collect()
}

/// Level-set convexification: the value at `i` is the least sampled level
/// `t` whose sublevel set has `i` inside its convex hull.
fn level_set_oracle(f: &[f64]) -> Vec<f64> {
    let mut levels = f.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut out = vec![f64::INFINITY; f.len()];
    for t in levels.iter().rev() {
        let inside: Vec<usize> = (0..f.len()).filter(|&j| f[j] <= *t).collect();
        let (lo, hi) = (inside[0], inside[inside.len() - 1]);
        for v in &mut out[lo..=hi] {
            *v = *t;
        }
    }
    out
}

fn envelope_correctness() -> Outcome {
    let x = [0.3, 0.0];
    let lattice = [x];
    let ladder = doubling_ladder(12);
    let mut worst_q = 0.0f64;
    let mut reached = Vec::new();
    for (name, kind) in presets() {
        let integrand = Integrand::with_certificate(kind.clone(), &lattice).unwrap();
        let d =
            SampledDensity::uniform(3.0, 1000, x, |s| integrand.eval(&x, &[0.0], &[s])).unwrap();
        let env = convex_envelope(&d).map_err(|e| e.to_string())?;
        let oracle = chord_oracle(d.xi(), d.values());
        // both sides evaluate chords in floating point; collinear lattice
        // points give several chords whose roundings differ by an ulp
        let fmax = d.values().iter().copied().fold(0.0, f64::max);
        let rounding = 4.0 * f64::EPSILON * fmax;
        let mismatch = env
            .values
            .iter()
            .zip(&oracle)
            .filter(|(a, b)| (*a - *b).abs() > rounding)
            .count();
        ensure(mismatch == 0, || {
            format!("{name}: convex envelope differs from the chord oracle at {mismatch} points")
        })?;
        let mono = monotone_ladder_check(&d, &ladder, 1e-9).map_err(|e| e.to_string())?;
        ensure(mono.pass, || {
            format!("{name}: ladder decrease {}", mono.worst_decrease)
        })?;
        if matches!(kind, IntegrandKind::DoubleWell { .. }) {
            let q = q_infinity(&d, &doubling_ladder(31)).map_err(|e| e.to_string())?;
            reached.push(format!("{name} stopped at n = {}", q.reached_n));
            let oracle = level_set_oracle(d.values());
            let err = q
                .values
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            ensure(err <= 1e-6, || {
                format!("{name}: |Q_inf f - level-set oracle| = {err}")
            })?;
            let lc = level_convexity_check(&d.with_values(q.values).unwrap());
            ensure(lc.pass, || {
                format!("{name}: output not level convex ({})", lc.worst_excess)
            })?;
            worst_q = worst_q.max(err);
        }
    }
    Ok(format!(
        "{} presets match the chord oracle to rounding; Q_inf f within {worst_q:.1e} of the level-set oracle ({})",
        presets().len(),
        reached.join(", ")
    ))
}

fn double_well_gamma() -> Outcome {
    let (report, dir) = run_config("gamma-double-well.toml", "gamma")?;
    let kappa = 0.1;
    let last = rows(&report).last().ok_or("no rows")?;
    let gap = (num(last, "min_value") - kappa).abs();
    ensure(gap <= 2e-2, || format!("|m_n - kappa| = {gap}"))?;

    let text =
        std::fs::read_to_string(dir.path().join("minimizer.csv")).map_err(|e| e.to_string())?;
    let u = gridio::read_csv(&text).map_err(|e| e.to_string())?;
    let raw = |s: f64| ((s - 1.0).abs() + kappa).min((s + 1.0).abs() + kappa);
    let v = u.values();
    let h = u.grid().spacing(0);
    let fine = (0..v.len() - 1)
        .map(|i| raw((v[i + 1] - v[i]) / h))
        .fold(0.0, f64::max);
    // the same minimizer seen on a 20-cell coarse grid
    let stride = (v.len() - 1) / 20;
    let coarse = (0..20)
        .map(|i| raw((v[(i + 1) * stride] - v[i * stride]) / (stride as f64 * h)))
        .fold(0.0, f64::max);
    ensure(coarse >= kappa + 0.9, || {
        format!("raw sup energy {coarse} on the coarse representative")
    })?;
    Ok(format!(
        "m_n gap {gap:.1e}; raw sup f: {fine:.3} at the minimizer, {coarse:.3} on its coarse representative"
    ))
}

fn hypothesis_falsification() -> Outcome {
    let anchor = config("anchor-a0-only.toml");
    let pre = runner::check(&anchor, None).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = pre.failures().iter().map(|a| a.name.as_str()).collect();
    ensure(failed == ["H4"], || {
        format!("anchor ladder: failures {failed:?}")
    })?;
    let a0 = pre
        .info
        .iter()
        .find(|a| a.name == "A0")
        .ok_or("A0 not reported")?;
    ensure(a0.pass, || format!("A0 should hold: {}", a0.detail))?;

    let plateau = config("plateau-growing-l.toml");
    let pre = runner::check(&plateau, None).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = pre.failures().iter().map(|a| a.name.as_str()).collect();
    ensure(failed == ["H3"], || {
        format!("plateau ladder: failures {failed:?}")
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let opts = RunOptions {
        out: Some(dir.path().join("out")),
        ..RunOptions::default()
    };
    for cfg in [&anchor, &plateau] {
        match runner::run(cfg, &configs(), &opts) {
            Err(e @ CliError::Preflight(_)) => ensure(e.exit_code() == 3, || "exit code".into())?,
            other => return Err(format!("run was not refused: {other:?}")),
        }
    }
    Ok("H4 refusal with A0 passing; H3 refusal for L_n -> infinity".into())
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("phi_inf recovery", phi_infinity_recovery, 1),
        ("norm convergence", norm_convergence, 5),
        ("embedding constant", embedding_constant, 10),
        ("inequality suite", inequality_suite, 30),
        ("weighted Gamma limit", weighted_gamma, 120),
        ("modular dichotomy", modular_dichotomy, 1),
        ("envelope correctness", envelope_correctness, 30),
        ("non-convex Gamma limit", double_well_gamma, 180),
        ("hypothesis falsification", hypothesis_falsification, 1),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed < Duration::from_secs(*budget) {
                Ok(msg)
            } else {
                Err(format!("{msg}; runtime {elapsed:.2?} exceeds {budget} s"))
            }
        });
        match result {
            Ok(msg) => println!("PASS criterion {} ({name}, {elapsed:.2?}): {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}, {elapsed:.2?}): {msg}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
