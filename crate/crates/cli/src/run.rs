//! Subcommand implementations and the error-to-exit-code mapping.
//!
//! Exit codes: 0 success, 2 expectation mismatch, 3 budget exceeded,
//! 4 unparseable input (bad JSON, unknown corpus entry, unusable flags),
//! 1 anything else.

use crate::chart::svg_loglog;
use crate::corpus::{self, Check, CorpusEntry, Payload};
use crate::report::{write_atomic, CheckOutcome, ExponentOut, ReportRow, RunReport};
use shatterlab_core::families::{
    forced_density_estimate, shatter_lower, vc_density_estimate, CompositeSpace, FamilyError,
    ParamFamily, Strategy,
};
use shatterlab_core::kernel::KernelError;
use shatterlab_core::pipeline::{theorem_exponent_with, PipelineError, ReduceOptions};
use shatterlab_core::simple::{
    self, as_param_family, build_critical_relation, delta_on_grid, delta_search, DeltaStrategy,
    SimpleError, SimpleFamily,
};
use shatterlab_core::SemilinearSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse {path}:{line}:{column}: {msg}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("bad input: {0}")]
    Input(String),
    #[error("expectation mismatch:\n{}", .0.join("\n"))]
    Mismatch(Vec<String>),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("io error on {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("{0}")]
    Core(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) => 4,
            CliError::Mismatch(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io { .. } | CliError::Core(_) => 1,
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::BudgetExceeded(_) => CliError::Budget(e.to_string()),
            _ => CliError::Core(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Kernel(KernelError::BudgetExceeded(_)) => CliError::Budget(e.to_string()),
            _ => CliError::Core(e.to_string()),
        }
    }
}

impl From<SimpleError> for CliError {
    fn from(e: SimpleError) -> Self {
        match e {
            SimpleError::Kernel(KernelError::BudgetExceeded(_))
            | SimpleError::Family(FamilyError::Kernel(KernelError::BudgetExceeded(_))) => {
                CliError::Budget(e.to_string())
            }
            _ => CliError::Core(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::BudgetExceeded(_)
            | PipelineError::SearchBudgetExceeded(_)
            | PipelineError::Kernel(KernelError::BudgetExceeded(_)) => {
                CliError::Budget(e.to_string())
            }
            _ => CliError::Core(e.to_string()),
        }
    }
}

/// Shared invocation context: global flags plus the argv echo.
pub struct Ctx {
    pub command: String,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub opts: ReduceOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// What a family specification resolved to.
pub enum Loaded {
    Param(ParamFamily),
    Simple(SimpleFamily),
    Relation(SemilinearSet, Vec<usize>),
}

pub struct LoadedFamily {
    pub kind: Loaded,
    /// Corpus entry name, when the spec named or wrapped one.
    pub entry: Option<String>,
    /// Short name for derived file names.
    pub slug: String,
}

impl LoadedFamily {
    /// The parameterized view, converting a simple family when needed.
    pub fn as_param(&self) -> Result<ParamFamily, CliError> {
        match &self.kind {
            Loaded::Param(f) => Ok(f.clone()),
            Loaded::Simple(s) => Ok(as_param_family(s)),
            Loaded::Relation(..) => Err(CliError::Input(
                "this payload is a bare block relation; only `delta` accepts it".into(),
            )),
        }
    }
}

fn from_value<T: serde::de::DeserializeOwned>(
    path: &str,
    value: serde_json::Value,
) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

/// Resolve a `--family` spec: a corpus entry name, or a path to a JSON file
/// holding a family, a simple family, a block relation, or a corpus
/// document wrapping one of those.
pub fn load_family(spec: &str) -> Result<LoadedFamily, CliError> {
    if let Some(entry) = corpus::find(spec) {
        let kind = match &entry.payload {
            Payload::Family(build) => Loaded::Param(build()),
            Payload::Simple(build) => Loaded::Simple(build()),
            Payload::Relation(build) => {
                let (e, blocks) = build();
                Loaded::Relation(e, blocks)
            }
        };
        return Ok(LoadedFamily {
            kind,
            entry: Some(entry.name.to_string()),
            slug: entry.name.to_string(),
        });
    }

    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|err| CliError::Io {
        path: spec.to_string(),
        err,
    })?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Parse {
            path: spec.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;

    let mut entry = None;
    if value.get("family").is_some() {
        entry = value
            .get("name")
            .and_then(|n| n.as_str())
            .map(|n| n.to_string());
        value = value["family"].take();
    }
    let slug = entry.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "family".to_string())
    });

    let kind = if value.get("relation").is_some() {
        let e: SemilinearSet = from_value(spec, value["relation"].take())?;
        let blocks: Vec<usize> = from_value(spec, value["blocks"].take())?;
        Loaded::Relation(e, blocks)
    } else if value.get("param_set").is_some() {
        Loaded::Param(from_value(spec, value)?)
    } else {
        Loaded::Simple(from_value(spec, value)?)
    };
    Ok(LoadedFamily { kind, entry, slug })
}

/// Per-t seed, matching the density-estimate convention so sweep counts and
/// fitted counts agree for one global seed.
fn task_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_add((t as u64) << 32)
}

fn write_artifact(ctx: &Ctx, report: &mut RunReport, name: &str, text: &str) -> Result<(), CliError> {
    if let Some(dir) = &ctx.out {
        let path = dir.join(name);
        write_atomic(&path, text).map_err(|err| CliError::Io {
            path: path.display().to_string(),
            err,
        })?;
        report.certificates.push(path.display().to_string());
    }
    Ok(())
}

pub const DEFAULT_T_MIN: usize = 3;
pub const DEFAULT_T_MAX: usize = 9;

/// A finished subcommand: the report, the composite space when the rows are
/// a trace sweep (needed for the CSV header), and the output file stem.
pub type CmdOutput = (RunReport, Option<CompositeSpace>, String);

/// `shatter`: best-effort trace-count sweep over the given sizes.
pub fn cmd_shatter(ctx: &Ctx, spec: &str, ts: &[usize]) -> Result<CmdOutput, CliError> {
    let loaded = load_family(spec)?;
    let fam = loaded.as_param()?;
    let mut report = RunReport::new(ctx.command.clone(), ctx.seed, loaded.entry.clone());
    let suite = Strategy::default_suite();
    for &t in ts {
        let tr = shatter_lower(&fam, t, &suite, task_seed(ctx.seed, t))?;
        report.rows.push(ReportRow::from_trace(&tr));
    }
    if ts.len() >= 2 {
        let counts: Vec<(usize, usize)> = report.rows.iter().map(|r| (r.t, r.count)).collect();
        let svg = svg_loglog(&format!("{} trace counts", loaded.slug), &counts);
        write_artifact(ctx, &mut report, &format!("{}-loglog.svg", loaded.slug), &svg)?;
    }
    let stem = format!("shatter-{}", loaded.slug);
    Ok((report, Some(fam.space().clone()), stem))
}

/// `exponent`: exact symbolic value for simple families, log-log estimate
/// of lower-bound counts for parameterized ones.
pub fn cmd_exponent(
    ctx: &Ctx,
    spec: &str,
    t_min: usize,
    t_max: usize,
) -> Result<CmdOutput, CliError> {
    let loaded = load_family(spec)?;
    let stem = format!("exponent-{}", loaded.slug);
    let mut report = RunReport::new(ctx.command.clone(), ctx.seed, loaded.entry.clone());
    match &loaded.kind {
        Loaded::Simple(s) => {
            let (s_val, cert) = simple::exponent(s)?;
            report.exponent = Some(ExponentOut::Symbolic { s: s_val });
            let mut text = serde_json::to_string_pretty(&cert).expect("serializable");
            text.push('\n');
            write_artifact(ctx, &mut report, &format!("{}-cert.json", loaded.slug), &text)?;
            Ok((report, None, stem))
        }
        Loaded::Param(f) => {
            if t_min >= t_max {
                return Err(CliError::Input("need t-min < t-max".into()));
            }
            let ts: Vec<usize> = (t_min..=t_max).collect();
            let est = vc_density_estimate(f, &ts, &Strategy::default_suite(), ctx.seed)?;
            let svg = svg_loglog(&format!("{} trace counts", loaded.slug), &est.counts);
            write_artifact(ctx, &mut report, &format!("{}-loglog.svg", loaded.slug), &svg)?;
            report.exponent = Some(ExponentOut::Empirical {
                slope: est.slope,
                nearest: est.nearest,
                residual: est.residual,
                t_min: est.t_min,
                t_max: est.t_max,
                counts: est.counts,
            });
            Ok((report, Some(f.space().clone()), stem))
        }
        Loaded::Relation(..) => Err(CliError::Input(
            "this payload is a bare block relation; only `delta` accepts it".into(),
        )),
    }
}

/// `pipeline`: full symbolic reduction; writes the replayable trace and the
/// per-part exponent certificates.
pub fn cmd_pipeline(
    ctx: &Ctx,
    spec: &str,
    trace_out: Option<&Path>,
) -> Result<CmdOutput, CliError> {
    let loaded = load_family(spec)?;
    let fam = loaded.as_param()?;
    let mut report = RunReport::new(ctx.command.clone(), ctx.seed, loaded.entry.clone());
    let (s, parts) = theorem_exponent_with(&fam, &ctx.opts)?;
    report.exponent = Some(ExponentOut::Symbolic { s });
    for (i, part) in parts.iter().enumerate() {
        let mut text = serde_json::to_string_pretty(&part.trace).expect("serializable");
        text.push('\n');
        if let (Some(path), true) = (trace_out, parts.len() == 1) {
            write_atomic(path, &text).map_err(|err| CliError::Io {
                path: path.display().to_string(),
                err,
            })?;
            report.certificates.push(path.display().to_string());
        } else if let Some(path) = trace_out {
            let with_part = part_path(path, i);
            write_atomic(&with_part, &text).map_err(|err| CliError::Io {
                path: with_part.display().to_string(),
                err,
            })?;
            report.certificates.push(with_part.display().to_string());
        } else {
            write_artifact(
                ctx,
                &mut report,
                &format!("{}-trace-part{}.json", loaded.slug, i),
                &text,
            )?;
        }
        let mut cert = serde_json::to_string_pretty(&part.certificate).expect("serializable");
        cert.push('\n');
        write_artifact(
            ctx,
            &mut report,
            &format!("{}-cert-part{}.json", loaded.slug, i),
            &cert,
        )?;
        report.checks.push(CheckOutcome {
            check: format!("part {i}"),
            ok: true,
            detail: format!(
                "exponent {} over a part with {} reduction steps",
                part.s,
                part.trace.steps.len()
            ),
        });
    }
    let stem = format!("pipeline-{}", loaded.slug);
    Ok((report, None, stem))
}

fn part_path(path: &Path, i: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into());
    let ext = path
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "json".into());
    path.with_file_name(format!("{stem}-part{i}.{ext}"))
}

/// `delta`: grid edge counts of a block relation, either on the cube grid
/// `[k]^w` per block or via the randomized search at total size `t`.
pub fn cmd_delta(
    ctx: &Ctx,
    spec: &str,
    k: Option<i64>,
    t: Option<usize>,
    j: &[String],
    jp: &[String],
) -> Result<CmdOutput, CliError> {
    let loaded = load_family(spec)?;
    let (e, blocks) = match &loaded.kind {
        Loaded::Relation(e, blocks) => (e.clone(), blocks.clone()),
        Loaded::Simple(s) => {
            let j_refs: Vec<&str> = j.iter().map(|s| s.as_str()).collect();
            let jp_refs: Vec<&str> = jp.iter().map(|s| s.as_str()).collect();
            let crit = build_critical_relation(s, &j_refs, &jp_refs)?;
            (crit.relation, crit.blocks)
        }
        Loaded::Param(_) => {
            return Err(CliError::Input(
                "`delta` needs a block relation or a simple family (with --j/--jp)".into(),
            ))
        }
    };
    let mut report = RunReport::new(ctx.command.clone(), ctx.seed, loaded.entry.clone());
    match (k, t) {
        (Some(k), _) => {
            if k < 1 {
                return Err(CliError::Input("--k must be at least 1".into()));
            }
            let w = corpus::cube_grid(k, &blocks);
            let count = delta_on_grid(&e, &blocks, &w)?;
            report.rows.push(ReportRow {
                t: w.t(),
                count,
                forced: Vec::new(),
                strategy: format!("cube-grid[{k}]"),
                config: grid_json(&w),
                millis: 0,
            });
        }
        (None, Some(t)) => {
            let (count, w) =
                delta_search(&e, &blocks, t, &DeltaStrategy::default_suite(), ctx.seed)?;
            report.rows.push(ReportRow {
                t: w.t(),
                count,
                forced: Vec::new(),
                strategy: "search".to_string(),
                config: grid_json(&w),
                millis: 0,
            });
        }
        (None, None) => return Err(CliError::Input("`delta` needs --k or --t".into())),
    }
    let stem = format!("delta-{}", loaded.slug);
    Ok((report, None, stem))
}

fn grid_json(w: &simple::GridSpec) -> serde_json::Value {
    let parts: Vec<Vec<Vec<String>>> = w
        .parts
        .iter()
        .map(|p| {
            p.iter()
                .map(|tuple| tuple.iter().map(shatterlab_core::rat::fmt_rat).collect())
                .collect()
        })
        .collect();
    serde_json::json!({ "j": w.j, "j_prime": w.j_prime, "parts": parts })
}

/// `reproduce`: re-run a corpus entry's documented checks and compare.
pub fn cmd_reproduce(ctx: &Ctx, id: &str, k_override: Option<i64>) -> Result<CmdOutput, CliError> {
    let entry = corpus::find(id)
        .ok_or_else(|| CliError::Input(format!("unknown corpus entry '{id}'")))?;
    let mut report = RunReport::new(ctx.command.clone(), ctx.seed, Some(entry.name.to_string()));
    let mut failures: Vec<String> = Vec::new();
    let space = run_checks(ctx, &entry, k_override, &mut report, &mut failures)?;
    if !failures.is_empty() {
        // Keep the written report: it records what diverged.
        emit(ctx, &report, space.as_ref(), &format!("reproduce-{id}"))?;
        return Err(CliError::Mismatch(failures));
    }
    Ok((report, space, format!("reproduce-{id}")))
}

fn record(
    report: &mut RunReport,
    failures: &mut Vec<String>,
    name: String,
    ok: bool,
    detail: String,
) {
    if !ok {
        failures.push(format!("{name}: {detail}"));
    }
    report.checks.push(CheckOutcome {
        check: name,
        ok,
        detail,
    });
}

fn run_checks(
    ctx: &Ctx,
    entry: &CorpusEntry,
    k_override: Option<i64>,
    report: &mut RunReport,
    failures: &mut Vec<String>,
) -> Result<Option<CompositeSpace>, CliError> {
    let family = entry.payload.as_family();
    let space = family.as_ref().map(|f| f.space().clone());
    for check in &entry.checks {
        match check {
            Check::Counts { strategy, ts, expect } => {
                let fam = family.as_ref().expect("counts check needs a family");
                let suite = [strategy.clone()];
                let mut bad = Vec::new();
                for &t in *ts {
                    let tr = shatter_lower(fam, t, &suite, task_seed(ctx.seed, t))?;
                    if tr.count != expect(t) {
                        bad.push(format!("t={t}: got {}, want {}", tr.count, expect(t)));
                    }
                    report.rows.push(ReportRow::from_trace(&tr));
                }
                let ok = bad.is_empty();
                let detail = if ok {
                    format!("{} sizes match the closed form", ts.len())
                } else {
                    bad.join("; ")
                };
                record(report, failures, format!("counts[{}]", strategy.name()), ok, detail);
            }
            Check::FrozenCounts { strategy, ts, expect } => {
                let fam = family.as_ref().expect("counts check needs a family");
                let suite = [strategy.clone()];
                let mut bad = Vec::new();
                for (&t, &want) in ts.iter().zip(expect.iter()) {
                    let tr = shatter_lower(fam, t, &suite, task_seed(ctx.seed, t))?;
                    if tr.count != want {
                        bad.push(format!("t={t}: got {}, want {want}", tr.count));
                    }
                    report.rows.push(ReportRow::from_trace(&tr));
                }
                let ok = bad.is_empty();
                let detail = if ok {
                    format!("{} sizes match the frozen values", ts.len())
                } else {
                    bad.join("; ")
                };
                record(
                    report,
                    failures,
                    format!("frozen-counts[{}]", strategy.name()),
                    ok,
                    detail,
                );
            }
            Check::Exponent { s } => {
                let (got, basis) = match &entry.payload {
                    Payload::Simple(build) => {
                        let (got, cert) = simple::exponent(&build())?;
                        let mut text =
                            serde_json::to_string_pretty(&cert).expect("serializable");
                        text.push('\n');
                        write_artifact(
                            ctx,
                            report,
                            &format!("{}-cert.json", entry.name),
                            &text,
                        )?;
                        (got, "direct")
                    }
                    Payload::Family(build) => {
                        let (got, parts) = theorem_exponent_with(&build(), &ctx.opts)?;
                        for (i, part) in parts.iter().enumerate() {
                            let mut text = serde_json::to_string_pretty(&part.trace)
                                .expect("serializable");
                            text.push('\n');
                            write_artifact(
                                ctx,
                                report,
                                &format!("{}-trace-part{}.json", entry.name, i),
                                &text,
                            )?;
                        }
                        (got, "pipeline")
                    }
                    Payload::Relation(_) => continue,
                };
                if report.exponent.is_none() {
                    report.exponent = Some(ExponentOut::Symbolic { s: got });
                }
                record(
                    report,
                    failures,
                    format!("exponent[{basis}]"),
                    got == *s,
                    format!("got {got}, want {s}"),
                );
            }
            Check::ForcedSlope { j, slope, tol, ts } => {
                let fam = family.as_ref().expect("slope check needs a family");
                let suite = [Strategy::Diagonal, Strategy::Grid];
                let est = forced_density_estimate(fam, ts, j, &suite, ctx.seed)?;
                let ok = (est.slope - slope).abs() <= *tol;
                record(
                    report,
                    failures,
                    format!("forced-slope[{}]", j.join("+")),
                    ok,
                    format!("fit {:.4}, want {slope} ± {tol}", est.slope),
                );
            }
            Check::DeltaCube { ks, expect } => {
                let (e, blocks) = match &entry.payload {
                    Payload::Relation(build) => build(),
                    _ => unreachable!("delta check only on relation entries"),
                };
                let ks: Vec<usize> = match k_override {
                    Some(k) if k >= 1 => vec![k as usize],
                    Some(_) => return Err(CliError::Input("--k must be at least 1".into())),
                    None => ks.to_vec(),
                };
                let mut bad = Vec::new();
                for &k in &ks {
                    let w = corpus::cube_grid(k as i64, &blocks);
                    let count = delta_on_grid(&e, &blocks, &w)?;
                    if count != expect(k) {
                        bad.push(format!("k={k}: got {count}, want {}", expect(k)));
                    }
                    report.rows.push(ReportRow {
                        t: w.t(),
                        count,
                        forced: Vec::new(),
                        strategy: format!("cube-grid[{k}]"),
                        config: grid_json(&w),
                        millis: 0,
                    });
                }
                let ok = bad.is_empty();
                let detail = if ok {
                    format!("{} grids match", ks.len())
                } else {
                    bad.join("; ")
                };
                record(report, failures, "delta-cube".to_string(), ok, detail);
            }
            Check::Count { t, expect } => {
                let fam = family.as_ref().expect("count check needs a family");
                let tr = shatter_lower(
                    fam,
                    *t,
                    &Strategy::default_suite(),
                    task_seed(ctx.seed, *t),
                )?;
                report.rows.push(ReportRow::from_trace(&tr));
                record(
                    report,
                    failures,
                    format!("count[t={t}]"),
                    tr.count == *expect,
                    format!("got {}, want {expect}", tr.count),
                );
            }
        }
    }
    Ok(space)
}

/// `list`: the corpus table.
pub fn cmd_list() -> String {
    let mut out = String::new();
    out.push_str("name                     s  basis         checks  description\n");
    for e in corpus::entries() {
        let first = e.doc.split(';').next().unwrap_or(e.doc).trim();
        let first: String = first.split_whitespace().collect::<Vec<_>>().join(" ");
        out.push_str(&format!(
            "{:<24} {:<2} {:<13} {:<7} {}\n",
            e.name,
            e.expected_exponent,
            e.exponent_basis,
            e.checks.len(),
            first
        ));
    }
    out
}

/// Render and deliver a finished report: stdout always, `--out` as a file.
pub fn emit(
    ctx: &Ctx,
    report: &RunReport,
    space: Option<&CompositeSpace>,
    stem: &str,
) -> Result<String, CliError> {
    let (text, ext) = match ctx.format {
        Format::Json => (report.to_json(), "json"),
        Format::Csv => match space {
            Some(space) => (report.to_csv(space), "csv"),
            None => {
                return Err(CliError::Input(
                    "csv output applies to trace sweeps over a composite space".into(),
                ))
            }
        },
    };
    if let Some(dir) = &ctx.out {
        let path = dir.join(format!("{stem}.{ext}"));
        write_atomic(&path, &text).map_err(|err| CliError::Io {
            path: path.display().to_string(),
            err,
        })?;
    }
    Ok(text)
}
