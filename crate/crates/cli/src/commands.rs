//! The subcommands. Each resolves its settings, runs the computations and
//! writes its report files.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::PathBuf;

use dirac_fem_core::analysis::{ConvergenceStudy, SpectrumReport};
use dirac_fem_core::experiment::MethodRun;
use dirac_fem_core::physics::{
    calibration_mismatch, exact_eigenvalue, exact_spectrum, DEFAULT_LIGHT_SPEED,
};
use dirac_fem_core::{reference, BlockMatrix, Method, Pencil, PhysicalParams};
use serde_json::{json, Value};

use crate::config::{CommandKind, Format, Settings};
use crate::error::CliError;
use crate::output::{fmt_num, fmt_opt, json_bytes, num, num_opt, write_atomic};
use crate::{Cli, Command};

/// What a command did, for the terminal.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub caveats: Vec<String>,
}

impl Outcome {
    fn write(&mut self, settings: &Settings, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = settings.out.join(name);
        write_atomic(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Spectrum(a) => spectrum(
            &Settings::resolve(CommandKind::Spectrum, a)?,
            CommandKind::Spectrum,
        ),
        Command::PollutionReport(a) => spectrum(
            &Settings::resolve(CommandKind::PollutionReport, a)?,
            CommandKind::PollutionReport,
        ),
        Command::Convergence(a) => convergence(&Settings::resolve(CommandKind::Convergence, a)?),
        Command::Extended(a) => extended(&Settings::resolve(CommandKind::Extended, a)?),
        Command::CalibrateC(a) => calibrate(&Settings::resolve(CommandKind::CalibrateC, a)?),
    }
}

fn caveats(kappas: &[i32]) -> Vec<String> {
    kappas
        .iter()
        .filter(|k| k.abs() == 1)
        .map(|k| {
            format!(
                "kappa = {k}: both spinor components are forced to zero at the domain ends (Dirichlet only); \
                 no other boundary behaviour is imposed"
            )
        })
        .collect()
}

fn run_method(
    settings: &Settings,
    kappa: i32,
    n: usize,
    method: Method,
) -> Result<MethodRun, CliError> {
    let e = settings.experiment(kappa, n)?;
    let pencil = e.pencil(method)?;
    if let Some(dir) = &settings.dump_pencil {
        dump_pencil(dir, &pencil, kappa, n)?;
    }
    Ok(e.run_pencil(&pencil)?)
}

fn triplets(m: &BlockMatrix) -> String {
    let n = m.block_dim();
    let mut s = String::from("row,col,value\n");
    for i in 0..2 * n {
        let r = i % n;
        for block in 0..2 {
            for c in r.saturating_sub(1)..(r + 2).min(n) {
                let j = block * n + c;
                let _ = writeln!(s, "{i},{j},{}", fmt_num(m.get(i, j)));
            }
        }
    }
    s
}

fn dump_pencil(
    dir: &std::path::Path,
    pencil: &Pencil,
    kappa: i32,
    n: usize,
) -> Result<(), CliError> {
    let stem = format!("{}_kappa{kappa}_n{n}", pencil.method.name());
    write_atomic(
        &dir.join(format!("{stem}_left.csv")),
        triplets(&pencil.left).as_bytes(),
    )?;
    write_atomic(
        &dir.join(format!("{stem}_right.csv")),
        triplets(&pencil.right).as_bytes(),
    )?;
    Ok(())
}

fn entries_json(run: &MethodRun) -> Value {
    let entries: Vec<Value> = run
        .report
        .entries
        .iter()
        .zip(&run.residuals)
        .map(|(e, res)| {
            json!({
                "energy": num(e.energy),
                "label": e.label.as_str(),
                "level": e.label.level(),
                "exact": num_opt(e.exact),
                "relative_error": num_opt(e.relative_error),
                "residual": num(*res),
            })
        })
        .collect();
    Value::Array(entries)
}

fn run_json(run: &MethodRun) -> Value {
    let d = &run.diagnostics;
    let r = &run.report;
    json!({
        "method": run.method.name(),
        "solver": {
            "path": d.path.name(),
            "dimension": d.dimension,
            "pivot_ratio": num(d.pivot_ratio),
            "max_imaginary": num(d.max_imaginary),
            "max_residual": num(run.max_residual()),
        },
        "bound_states": run.bound.values.len(),
        "discarded": {
            "positive_continuum": run.bound.discarded.positive_continuum,
            "negative_continuum": run.bound.discarded.negative_continuum,
            "complex": run.bound.discarded.complex,
            "duplicates": run.bound.discarded.duplicates,
        },
        "counts": {
            "genuine": r.genuine().count(),
            "instilled": r.instilled_count(),
            "coincidence": r.coincidence_count(),
        },
        "conflicts_resolved": r.conflicts_resolved,
        "missing_levels": r.missing_levels,
        "entries": entries_json(run),
    })
}

struct Row {
    key: f64,
    level: Option<u32>,
    usual: Option<(f64, &'static str)>,
    stab: Option<(f64, &'static str)>,
    exact: Option<f64>,
    rel_stab: Option<f64>,
}

/// Merged table: one row per genuine level, spurious values as extra rows
/// at their place in energy order.
pub fn spectrum_csv(
    usual: Option<&SpectrumReport>,
    stab: Option<&SpectrumReport>,
    exact: &[f64],
) -> String {
    let mut rows: Vec<Row> = Vec::new();
    for (i, x) in exact.iter().enumerate() {
        let level = i as u32 + 1;
        let u = usual.and_then(|r| r.level(level));
        let s = stab.and_then(|r| r.level(level));
        rows.push(Row {
            key: *x,
            level: Some(level),
            usual: u.map(|e| (e.energy, e.label.as_str())),
            stab: s.map(|e| (e.energy, e.label.as_str())),
            exact: Some(*x),
            rel_stab: s.and_then(|e| e.relative_error),
        });
    }
    for (report, is_usual) in [(usual, true), (stab, false)] {
        for e in report
            .iter()
            .flat_map(|r| r.entries.iter())
            .filter(|e| e.label.is_spurious())
        {
            let cell = Some((e.energy, e.label.as_str()));
            rows.push(Row {
                key: e.energy,
                level: None,
                usual: if is_usual { cell } else { None },
                stab: if is_usual { None } else { cell },
                exact: None,
                rel_stab: None,
            });
        }
    }
    rows.sort_by(|a, b| a.key.partial_cmp(&b.key).unwrap_or(Ordering::Equal));
    let mut s =
        String::from("level,usual_fem,stabilized_fem,exact,label_usual,label_stab,rel_err_stab\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.level.map(|l| l.to_string()).unwrap_or_default(),
            fmt_opt(r.usual.map(|c| c.0)),
            fmt_opt(r.stab.map(|c| c.0)),
            fmt_opt(r.exact),
            r.usual.map(|c| c.1).unwrap_or(""),
            r.stab.map(|c| c.1).unwrap_or(""),
            fmt_opt(r.rel_stab),
        );
    }
    s
}

fn short_ladder(kappa: i32, run: &MethodRun, levels: usize) -> Option<String> {
    let found = run.resolved_levels();
    (found < levels).then(|| {
        format!(
            "kappa = {kappa} {}: only {found} of {levels} levels resolved on this domain",
            run.method.name()
        )
    })
}

fn summary_line(kappa: i32, run: &MethodRun) -> String {
    let r = &run.report;
    format!(
        "kappa={kappa} {}: {} genuine, {} instilled, {} coincidence, max residual {}",
        run.method.name(),
        r.genuine().count(),
        r.instilled_count(),
        r.coincidence_count(),
        fmt_num(run.max_residual()),
    )
}

fn spectrum(settings: &Settings, kind: CommandKind) -> Result<Outcome, CliError> {
    let mut out = Outcome {
        caveats: caveats(&[settings.kappa]),
        ..Default::default()
    };
    let n = settings.n[0];
    let params = settings.params(settings.kappa)?;
    let exact = exact_spectrum(&params, settings.levels)?;
    let mut runs = Vec::new();
    for m in settings.method.methods() {
        let run = run_method(settings, settings.kappa, n, m)?;
        out.caveats
            .extend(short_ladder(settings.kappa, &run, settings.levels));
        runs.push(run);
    }
    let find = |m: Method| runs.iter().find(|r| r.method == m).map(|r| &r.report);
    let stem = match kind {
        CommandKind::PollutionReport => "pollution_report",
        _ => "spectrum",
    };
    if settings.wants(Format::Csv) {
        let csv = spectrum_csv(find(Method::Galerkin), find(Method::Supg), &exact);
        out.write(settings, &format!("{stem}.csv"), csv.as_bytes())?;
    }
    if settings.wants(Format::Json) {
        let mut report = json!({
            "command": if kind == CommandKind::PollutionReport { "pollution-report" } else { "spectrum" },
            "settings": settings.to_json(),
            "exact": exact.iter().map(|x| num(*x)).collect::<Vec<_>>(),
            "runs": runs.iter().map(run_json).collect::<Vec<_>>(),
            "caveats": out.caveats,
        });
        if kind == CommandKind::PollutionReport {
            let flags: serde_json::Map<String, Value> = runs
                .iter()
                .map(|r| {
                    (
                        r.method.name().to_string(),
                        json!({
                            "instilled": r.report.instilled_count(),
                            "coincidence": r.report.coincidence_count(),
                        }),
                    )
                })
                .collect();
            report["spurious"] = Value::Object(flags);
        }
        out.write(settings, &format!("{stem}.json"), &json_bytes(&report))?;
    }
    out.summary = runs
        .iter()
        .map(|r| summary_line(settings.kappa, r))
        .collect();
    Ok(out)
}

/// Energies per node count, one row per level.
pub fn convergence_csv(study: &ConvergenceStudy, exact: &[f64]) -> String {
    let mut s = String::from("level");
    for n in &study.node_counts {
        let _ = write!(s, ",n{n}");
    }
    s.push_str(",exact,rate,rate_points,low_confidence\n");
    for (l, level) in study.levels.iter().enumerate() {
        let _ = write!(s, "{level}");
        for row in &study.energies {
            let _ = write!(s, ",{}", fmt_opt(row[l]));
        }
        let rate = study.rates[l];
        let _ = writeln!(
            s,
            ",{},{},{},{}",
            fmt_opt(exact.get(l).copied()),
            fmt_opt(rate.map(|r| r.slope)),
            rate.map(|r| r.points.to_string()).unwrap_or_default(),
            rate.map(|r| r.low_confidence.to_string())
                .unwrap_or_default(),
        );
    }
    s
}

/// Plot data: `n, level, rel_error`, one line per matched level.
pub fn convergence_tsv(study: &ConvergenceStudy) -> String {
    let mut s = String::from("n\tlevel\trel_error\n");
    for (i, n) in study.node_counts.iter().enumerate() {
        for (l, level) in study.levels.iter().enumerate() {
            if let Some(e) = study.errors[i][l] {
                let _ = writeln!(s, "{n}\t{level}\t{}", fmt_num(e));
            }
        }
    }
    s
}

fn convergence(settings: &Settings) -> Result<Outcome, CliError> {
    let mut out = Outcome {
        caveats: caveats(&[settings.kappa]),
        ..Default::default()
    };
    let base = settings.experiment(settings.kappa, settings.n[0])?;
    let exact = exact_spectrum(&base.params, settings.levels)?;
    let mut studies = Vec::new();
    for method in settings.method.methods() {
        let (study, runs) = base.convergence_study(method, &settings.n)?;
        for run in &runs {
            out.caveats
                .extend(short_ladder(settings.kappa, run, settings.levels));
        }
        let name = method.name();
        if settings.wants(Format::Csv) {
            out.write(
                settings,
                &format!("convergence_{name}.csv"),
                convergence_csv(&study, &exact).as_bytes(),
            )?;
        }
        if settings.wants(Format::Tsv) {
            out.write(
                settings,
                &format!("convergence_{name}.tsv"),
                convergence_tsv(&study).as_bytes(),
            )?;
        }
        if let Some(r) = study.rate(1) {
            out.summary.push(format!(
                "{name}: level 1 rate {}{}",
                fmt_num(r.slope),
                if r.low_confidence {
                    " (low confidence)"
                } else {
                    ""
                }
            ));
        }
        for (n, row) in study.node_counts.iter().zip(&study.errors) {
            out.summary.push(format!(
                "{name}: n={n} level 1 rel_error {}",
                fmt_opt(row[0])
            ));
        }
        let levels: Vec<Value> = study
            .levels
            .iter()
            .enumerate()
            .map(|(l, level)| {
                let rate = study.rates[l];
                json!({
                    "level": level,
                    "exact": num_opt(exact.get(l).copied()),
                    "energies": study.energies.iter().map(|row| num_opt(row[l])).collect::<Vec<_>>(),
                    "relative_errors": study.errors.iter().map(|row| num_opt(row[l])).collect::<Vec<_>>(),
                    "rate": rate.map(|r| json!({
                        "slope": num(r.slope),
                        "points": r.points,
                        "low_confidence": r.low_confidence,
                    })),
                })
            })
            .collect();
        studies.push(json!({
            "method": name,
            "node_counts": study.node_counts,
            "levels": levels,
            "runs": runs.iter().map(run_json).collect::<Vec<_>>(),
        }));
    }
    if settings.wants(Format::Json) {
        let report = json!({
            "command": "convergence",
            "settings": settings.to_json(),
            "studies": studies,
            "caveats": out.caveats,
        });
        out.write(settings, "convergence.json", &json_bytes(&report))?;
    }
    Ok(out)
}

/// Row of the first level of a kappa column in the staircase layout:
/// -2, 2, -3, 3, ... start on rows 1, 2, 3, 4, ...
pub fn column_offset(kappa: i32) -> usize {
    let l = if kappa > 0 { kappa } else { -kappa - 1 };
    (l + kappa.abs() - 2).max(1) as usize
}

pub fn extended_csv(kappas: &[i32], columns: &[Vec<f64>]) -> String {
    let mut s = String::from("row");
    for k in kappas {
        let _ = write!(s, ",kappa={k}");
    }
    s.push('\n');
    let rows = kappas
        .iter()
        .zip(columns)
        .map(|(k, c)| column_offset(*k) + c.len() - 1)
        .max()
        .unwrap_or(0);
    for row in 1..=rows {
        let _ = write!(s, "{row}");
        for (k, c) in kappas.iter().zip(columns) {
            let v = row
                .checked_sub(column_offset(*k))
                .and_then(|i| c.get(i))
                .copied();
            let _ = write!(s, ",{}", fmt_opt(v));
        }
        s.push('\n');
    }
    s
}

fn extended(settings: &Settings) -> Result<Outcome, CliError> {
    let mut out = Outcome {
        caveats: caveats(&settings.kappas),
        ..Default::default()
    };
    let n = settings.n[0];
    let mut reports = Vec::new();
    for method in settings.method.methods() {
        let mut columns = Vec::new();
        let mut per_kappa = Vec::new();
        for &k in &settings.kappas {
            let run = run_method(settings, k, n, method)?;
            out.caveats.extend(short_ladder(k, &run, settings.levels));
            let column: Vec<f64> = run.report.genuine().map(|e| e.energy).collect();
            out.summary.push(summary_line(k, &run));
            let mut j = run_json(&run);
            j["kappa"] = json!(k);
            per_kappa.push(j);
            columns.push(column);
        }
        if settings.wants(Format::Csv) {
            let csv = extended_csv(&settings.kappas, &columns);
            out.write(
                settings,
                &format!("extended_{}.csv", method.name()),
                csv.as_bytes(),
            )?;
        }
        reports.push(json!({ "method": method.name(), "columns": per_kappa }));
    }
    if settings.wants(Format::Json) {
        let report = json!({
            "command": "extended",
            "settings": settings.to_json(),
            "kappas": settings.kappas,
            "results": reports,
            "caveats": out.caveats,
        });
        out.write(settings, "extended.json", &json_bytes(&report))?;
    }
    Ok(out)
}

fn calibrate(settings: &Settings) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let cal = reference::calibrated_light_speed()?;
    let targets = reference::calibration_targets();
    let base = PhysicalParams::new(1.0, cal.light_speed, reference::CHARGE, -2)?;
    let default_mismatch =
        calibration_mismatch(1.0, reference::CHARGE, DEFAULT_LIGHT_SPEED, &targets)?;
    let mut csv = String::from(
        "kappa,radial_level,reference,calibrated,rel_err_calibrated,default_c,rel_err_default\n",
    );
    let mut rows = Vec::new();
    for t in &targets {
        let at = |c: f64| -> Result<f64, CliError> {
            Ok(exact_eigenvalue(
                &base.with_light_speed(c)?.with_kappa(t.kappa)?,
                t.radial_level,
            )?)
        };
        let (ec, ed) = (at(cal.light_speed)?, at(DEFAULT_LIGHT_SPEED)?);
        let (rc, rd) = (
            ((ec - t.energy) / t.energy).abs(),
            ((ed - t.energy) / t.energy).abs(),
        );
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            t.kappa,
            t.radial_level,
            fmt_num(t.energy),
            fmt_num(ec),
            fmt_num(rc),
            fmt_num(ed),
            fmt_num(rd)
        );
        rows.push(json!({
            "kappa": t.kappa,
            "radial_level": t.radial_level,
            "reference": num(t.energy),
            "calibrated": num(ec),
            "rel_err_calibrated": num(rc),
            "default_c": num(ed),
            "rel_err_default": num(rd),
        }));
    }
    if settings.wants(Format::Csv) {
        out.write(settings, "calibration.csv", csv.as_bytes())?;
    }
    if settings.wants(Format::Json) {
        let (lo, hi) = reference::CALIBRATION_BRACKET;
        let report = json!({
            "command": "calibrate-c",
            "light_speed": num(cal.light_speed),
            "max_relative_error": num(cal.max_relative_error),
            "bracket": [num(lo), num(hi)],
            "default_light_speed": num(DEFAULT_LIGHT_SPEED),
            "default_max_relative_error": num(default_mismatch),
            "targets": rows,
        });
        out.write(settings, "calibration.json", &json_bytes(&report))?;
    }
    out.summary.push(format!(
        "c = {} (max relative error {}); default c = {} gives {}",
        fmt_num(cal.light_speed),
        fmt_num(cal.max_relative_error),
        fmt_num(DEFAULT_LIGHT_SPEED),
        fmt_num(default_mismatch)
    ));
    Ok(out)
}
