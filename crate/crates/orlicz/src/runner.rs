//! The `check`, `run` and `report` verbs.
//!
//! A run writes into the output directory:
//!
//! | file | content |
//! |---|---|
//! | `<stem>.json` | `{"kind", "rows", "assertions", "notes", "report_only"}` |
//! | `<stem>.csv` | the rows in the per-kind column layout |
//! | `minimizer.csv`, `minimizer.json` | last Γ minimizer (gamma-norm only) |
//! | `manifest.json` | config echo, versions, seed, wall time, threads, preflight |
//! | `summary.txt` | one `PASS`/`FAIL` line per assertion |
//!
//! with `<stem>` one of `norms`, `gamma`, `modular`, `envelope`, `suite`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use orlicz_core::envelope::{
    doubling_ladder, level_convexity_check, monotone_ladder_check, q_infinity,
};
use orlicz_core::norms::{norm_convergence_assertions, norm_convergence_row};
use orlicz_core::report::{GammaReport, ModularReport};
use orlicz_core::supremal::{gamma_experiment_modular, gamma_experiment_norm};
use orlicz_core::{Assertion, SampledDensity};
use serde_json::Value;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::CliError;
use crate::format::{csv_from_report, jnum, jopt, object};
use crate::preflight::{self, PreflightReport};
use crate::{gridio, setup, suite};

pub const OUT_DIR_ENV: &str = "ORLICZ_OUT_DIR";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub report_only: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub preflight: PreflightReport,
    pub assertions: Vec<Assertion>,
    pub summary: String,
}

impl RunOutcome {
    pub fn failures(&self) -> usize {
        self.assertions.iter().filter(|a| !a.pass).count()
    }
}

pub fn stem(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::NormConvergence => "norms",
        ExperimentKind::GammaNorm => "gamma",
        ExperimentKind::GammaModular => "modular",
        ExperimentKind::Envelope => "envelope",
        ExperimentKind::InequalitySuite => "suite",
    }
}

/// `--out`, then the environment override, then `[output] dir`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: Option<&ExperimentConfig>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    PathBuf::from(cfg.map_or("out", |c| c.output.dir.as_str()))
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("--threads: {e}")))
}

pub fn check(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<PreflightReport, CliError> {
    pool(threads)?.install(|| preflight::run(cfg))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn assertions_json(a: &[Assertion]) -> Value {
    Value::Array(
        a.iter()
            .map(|a| {
                object(vec![
                    ("name", a.name.clone().into()),
                    ("pass", a.pass.into()),
                    ("detail", a.detail.clone().into()),
                ])
            })
            .collect(),
    )
}

/// Rows, assertions and notes of one experiment plus extra files.
struct Outcome {
    rows: Vec<Value>,
    assertions: Vec<Assertion>,
    notes: Vec<String>,
    extra: Vec<(&'static str, String)>,
}

fn norm_convergence(
    cfg: &ExperimentConfig,
    base: &Path,
    report_only: bool,
) -> Result<Outcome, CliError> {
    let grid = setup::grid(&cfg.grid)?;
    let seq = setup::ladder(cfg, &grid)?;
    let g = setup::cell_field(cfg.field.as_ref().expect("validated"), &grid, base)?;
    let (l, c) = (cfg.hypotheses.l, cfg.hypotheses.c);
    let rows = (1..=seq.len())
        .map(|n| norm_convergence_row(&seq, n, &grid, &g, cfg.tolerances.root, l, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut assertions = Vec::new();
    if !report_only {
        assertions = norm_convergence_assertions(&rows, cfg.tolerances.gap);
        let tail = &rows[rows.len() - rows.len().div_ceil(3)..];
        let decreasing = tail.windows(2).all(|w| w[1].gap < w[0].gap);
        assertions.push(Assertion::new(
            "gap-tail-decreasing",
            decreasing,
            format!(
                "gap strictly decreasing over the last {} entries",
                tail.len()
            ),
        ));
    }
    let notes = vec![format!(
        "root tolerance {}, cell width {}",
        cfg.tolerances.root,
        grid.spacing(0)
    )];
    let rows = rows
        .iter()
        .map(|r| {
            object(vec![
                ("n", r.n.into()),
                ("p_minus", jnum(r.p_minus)),
                ("p_plus", jnum(r.p_plus)),
                ("norm", jnum(r.norm)),
                ("achieved_tol", jnum(r.achieved_tol)),
                ("sup_norm", jnum(r.sup_norm)),
                ("gap", jnum(r.gap)),
                ("embedding_constant", jnum(r.embedding_constant)),
            ])
        })
        .collect();
    Ok(Outcome {
        rows,
        assertions,
        notes,
        extra: Vec::new(),
    })
}

fn gamma_norm(cfg: &ExperimentConfig, report_only: bool) -> Result<Outcome, CliError> {
    let problem = setup::problem(cfg)?;
    let GammaReport {
        rows,
        assertions,
        notes,
        minimizer,
    } = gamma_experiment_norm(&problem, &setup::gamma_options(cfg, report_only))?;
    let rows = rows
        .iter()
        .map(|r| {
            object(vec![
                ("n", r.n.into()),
                ("p_minus", jnum(r.p_minus)),
                ("p_plus", jnum(r.p_plus)),
                ("min_value", jnum(r.min_value)),
                ("oracle_value", jopt(r.oracle_value)),
                ("value_gap", jopt(r.value_gap)),
                ("minimizer_L1_gap", jopt(r.minimizer_l1_gap)),
                ("recovery_gap", jopt(r.recovery_gap)),
                ("iterations", r.iterations.into()),
                ("converged", r.converged.into()),
            ])
        })
        .collect();
    let mut extra = Vec::new();
    if let Some(u) = minimizer {
        extra.push(("minimizer.csv", gridio::write_csv(&u)));
        let j = serde_json::to_value(gridio::to_json(&u)).expect("grid functions serialize");
        extra.push(("minimizer.json", json_text(&j)));
    }
    Ok(Outcome {
        rows,
        assertions,
        notes,
        extra,
    })
}

fn gamma_modular(
    cfg: &ExperimentConfig,
    base: &Path,
    report_only: bool,
) -> Result<Outcome, CliError> {
    let problem = setup::problem(cfg)?;
    let fields = cfg
        .fields
        .iter()
        .map(|f| {
            Ok((
                f.name.clone(),
                setup::nodal_field(&f.field, problem.grid(), base)?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let ModularReport { rows, assertions } =
        gamma_experiment_modular(&problem, &fields, &setup::modular_options(cfg, report_only))?;
    let rows = rows
        .iter()
        .map(|r| {
            object(vec![
                ("field", r.field.clone().into()),
                ("n", r.n.into()),
                ("p_minus", jnum(r.p_minus)),
                ("p_plus", jnum(r.p_plus)),
                ("sup_density", jnum(r.sup_density)),
                ("log_energy", jnum(r.log_energy)),
                ("closed_form_log", jopt(r.closed_form_log)),
            ])
        })
        .collect();
    Ok(Outcome {
        rows,
        assertions,
        notes: Vec::new(),
        extra: Vec::new(),
    })
}

fn envelope(cfg: &ExperimentConfig, report_only: bool) -> Result<Outcome, CliError> {
    let grid = setup::grid(&cfg.grid)?;
    let spec = cfg.envelope.as_ref().expect("validated");
    let integrand = setup::integrand(cfg.integrand.as_ref().expect("validated"), &grid)?;
    let x = setup::envelope_point(spec, &grid)?;
    let d = SampledDensity::uniform(spec.radius, spec.points, x, |xi| {
        integrand.eval(&x, &[0.0], &[xi])
    })?;
    let ladder = doubling_ladder(spec.ladder_max);
    let q = q_infinity(&d, &ladder)?;
    let mut assertions = Vec::new();
    if !report_only {
        let out = d.with_values(q.values.clone())?;
        let lc = level_convexity_check(&out);
        assertions.push(Assertion::new(
            "level-convex-output",
            lc.pass,
            format!("worst excess {}", lc.worst_excess),
        ));
        let mono = monotone_ladder_check(&d, &ladder, spec.monotone_tol)?;
        assertions.push(Assertion::new(
            "monotone-ladder",
            mono.pass,
            format!(
                "worst decrease {} (tol {})",
                mono.worst_decrease, spec.monotone_tol
            ),
        ));
        let below = d.values().iter().zip(&q.values).all(|(f, e)| e <= f);
        assertions.push(Assertion::new(
            "below-density",
            below,
            format!("certified gap max(f - Q_inf f) = {}", q.certified_gap),
        ));
    }
    let notes = vec![format!(
        "ladder stopped at n = {} with last increment {}",
        q.reached_n, q.last_increment
    )];
    let rows = d
        .xi()
        .iter()
        .zip(d.values())
        .zip(&q.values)
        .map(|((xi, f), e)| {
            object(vec![
                ("xi", jnum(*xi)),
                ("f", jnum(*f)),
                ("q_inf_f", jnum(*e)),
                ("reached_n", q.reached_n.into()),
            ])
        })
        .collect();
    Ok(Outcome {
        rows,
        assertions,
        notes,
        extra: Vec::new(),
    })
}

fn inequality_suite(cfg: &ExperimentConfig, report_only: bool) -> Result<Outcome, CliError> {
    let spec = cfg.suite.clone().unwrap_or_default();
    let report = suite::run(&spec, cfg.seed.expect("validated"), report_only)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            object(vec![
                ("index", r.index.into()),
                ("family", r.family.into()),
                ("check", r.check.into()),
                ("lhs", jnum(r.lhs)),
                ("value", jopt(r.value)),
                ("rhs", jnum(r.rhs)),
                ("pass", r.pass.into()),
            ])
        })
        .collect();
    Ok(Outcome {
        rows,
        assertions: report.assertions,
        notes: Vec::new(),
        extra: Vec::new(),
    })
}

const REPORT_ONLY_BANNER: &str = "REPORT-ONLY RUN: hypothesis failures did not gate this run and no acceptance assertions were evaluated";

fn summary(
    kind: ExperimentKind,
    report_only: bool,
    pre: &PreflightReport,
    assertions: &[Assertion],
) -> String {
    let mut out = String::new();
    if report_only {
        out.push_str(REPORT_ONLY_BANNER);
        out.push('\n');
    }
    out.push_str(&format!("experiment {}\n", kind.name()));
    for line in pre.lines() {
        out.push_str(&format!("preflight {line}\n"));
    }
    for a in assertions {
        let status = if a.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} {}: {}\n", a.name, a.detail));
    }
    out
}

/// Preflight, execute and write every artifact. Assertion failures are
/// returned in the outcome, not as an error.
pub fn run(cfg: &ExperimentConfig, base: &Path, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let pool = pool(opts.threads)?;
    let threads = pool.current_num_threads();
    pool.install(|| {
        let pre = preflight::run(cfg)?;
        if !pre.pass() && !opts.report_only {
            let names: Vec<String> = pre
                .failures()
                .iter()
                .map(|a| format!("{} ({})", a.name, a.detail))
                .collect();
            return Err(CliError::Preflight(names.join("; ")));
        }
        let out_dir = resolve_out_dir(opts.out.as_deref(), Some(cfg));
        fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

        let ro = opts.report_only;
        let outcome = match cfg.kind {
            ExperimentKind::NormConvergence => norm_convergence(cfg, base, ro)?,
            ExperimentKind::GammaNorm => gamma_norm(cfg, ro)?,
            ExperimentKind::GammaModular => gamma_modular(cfg, base, ro)?,
            ExperimentKind::Envelope => envelope(cfg, ro)?,
            ExperimentKind::InequalitySuite => inequality_suite(cfg, ro)?,
        };
        let assertions = if ro { Vec::new() } else { outcome.assertions };
        let stem = stem(cfg.kind);
        let report = object(vec![
            ("kind", cfg.kind.name().into()),
            ("rows", Value::Array(outcome.rows)),
            ("assertions", assertions_json(&assertions)),
            ("notes", outcome.notes.into()),
            ("report_only", ro.into()),
        ]);
        write(&out_dir.join(format!("{stem}.json")), &json_text(&report))?;
        write(
            &out_dir.join(format!("{stem}.csv")),
            &csv_from_report(&report)?,
        )?;
        for (name, text) in &outcome.extra {
            write(&out_dir.join(name), text)?;
        }

        let summary = summary(cfg.kind, ro, &pre, &assertions);
        let manifest = object(vec![
            ("kind", cfg.kind.name().into()),
            ("config", cfg.to_toml().into()),
            ("version", env!("CARGO_PKG_VERSION").into()),
            ("seed", cfg.seed.map_or(Value::Null, Value::from)),
            ("wall_time_seconds", jnum(start.elapsed().as_secs_f64())),
            ("threads", threads.into()),
            ("report_only", ro.into()),
            ("preflight", assertions_json(&pre.checks)),
            ("preflight_info", assertions_json(&pre.info)),
        ]);
        write(&out_dir.join("manifest.json"), &json_text(&manifest))?;
        write(&out_dir.join("summary.txt"), &summary)?;
        Ok(RunOutcome {
            out_dir,
            preflight: pre,
            assertions,
            summary,
        })
    })
}

/// Re-render every report JSON in `dir` to CSV; returns the files written.
pub fn report(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut written = Vec::new();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let csv = if value.get("rows").is_some() {
            csv_from_report(&value)?
        } else if let Ok(j) = serde_json::from_value::<gridio::GridFunctionJson>(value) {
            gridio::write_csv(&gridio::from_json(&j)?)
        } else {
            continue;
        };
        let target = path.with_extension("csv");
        write(&target, &csv)?;
        written.push(target);
    }
    if written.is_empty() {
        return Err(CliError::Config(format!(
            "no report JSON found in {}",
            dir.display()
        )));
    }
    Ok(written)
}
