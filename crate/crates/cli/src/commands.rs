use std::sync::Arc;

use dqcd_core::benchmarks::{fill_orders, run_experiment, validate_sweep, write_reports_csv, ErrorReport};
use dqcd_core::report::{compare_to_reference, diff_csv, diff_markdown, RowKey};
use dqcd_core::stability::{check_matrix, SpectrumReport, SPECTRUM_CSV_HEADER};
use dqcd_core::{
    assemble_operator, build_weight_set, check_stability, BoundaryKind, ExperimentConfig, Matrix, ReferenceTable,
    StepRule, TolerancePolicy,
};
use rayon::prelude::*;

use crate::args::{ConvergenceArgs, Injected, SolveArgs, StabilityArgs};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{log_text, time_tag, weights_csv, OutputDir};

fn reports_csv(reports: &[ErrorReport], timing: bool) -> Vec<u8> {
    let mut buf = Vec::new();
    write_reports_csv(reports, timing, &mut buf).expect("writing to memory");
    buf
}

fn error_summary(r: &ErrorReport) -> String {
    match (&r.failure, r.linf, r.l2) {
        (Some(f), _, _) => format!("FAILED ({f})"),
        (None, Some(a), Some(b)) => format!("linf={a:.5e} l2={b:.5e}"),
        _ => "no exact solution".into(),
    }
}

/// Solve one configuration. Returns the stdout summary.
pub fn solve(args: &SolveArgs) -> Result<String> {
    let cfg = RunConfig::resolve(&args.common)?;
    let dumps: Vec<f64> = if !args.dump_at.is_empty() {
        args.dump_at.clone()
    } else if cfg.problem_id == 3 {
        [0.1, cfg.t_final].into_iter().filter(|&t| t <= cfg.t_final).collect()
    } else {
        vec![cfg.t_final]
    };
    if let Some(bad) = dumps.iter().find(|&&t| !(t.is_finite() && t >= 0.0 && t <= cfg.t_final)) {
        return Err(CliError::Usage(format!("--dump-at time {bad} lies outside [0, {}]", cfg.t_final)));
    }
    let mut exp = ExperimentConfig::new(cfg.basis, args.n, cfg.dt, cfg.t_final);
    exp.snapshots = dumps;
    let outcome = run_experiment(&cfg.problem, &exp)?;
    let out = OutputDir::create(cfg.out_dir.clone())?;
    let r = &outcome.report;

    let mut log = cfg.describe();
    log.push(("N".into(), args.n.to_string()));
    log.push(("h".into(), r.h.to_string()));
    log.push(("dt".into(), r.dt.to_string()));
    log.push(("dt_adjusted".into(), outcome.dt_nudged.to_string()));
    log.push(("steps".into(), r.steps.to_string()));
    log.push(("result".into(), error_summary(r)));
    if cfg.timing {
        log.push(("seconds".into(), format!("{:.3}", r.seconds)));
    }

    out.write("report.csv", &reports_csv(std::slice::from_ref(r), cfg.timing))?;
    for (t, field) in &outcome.snapshots {
        let mut buf = Vec::new();
        field.write_xyz(&outcome.grid, &mut buf).expect("writing to memory");
        out.write(&format!("field_t{}.xyz", time_tag(*t)), &buf)?;
    }
    if args.dump_weights {
        let ws = build_weight_set(cfg.basis, &outcome.grid)?;
        for (name, m) in [("a1", &ws.a1), ("a2", &ws.a2), ("b1", &ws.b1), ("b2", &ws.b2)] {
            out.write(&format!("weights/{name}.csv"), weights_csv(m).as_bytes())?;
        }
    }
    out.write("run.log", log_text(&log).as_bytes())?;

    if let Some(f) = &r.failure {
        return Err(CliError::RunsFailed { failed: 1, total: 1, first: f.clone() });
    }
    Ok(format!(
        "problem {} {} N={} h={} dt={} steps={} {} -> {}",
        cfg.problem_id,
        cfg.basis,
        args.n,
        r.h,
        r.dt,
        r.steps,
        error_summary(r),
        out.path().display()
    ))
}

fn reference_block(cfg: &RunConfig) -> String {
    let c = cfg.problem.coeffs;
    let mut block = format!("alpha={} beta={}", c.alpha_x, c.beta_x);
    if cfg.boundary == BoundaryKind::Neumann {
        block += " neumann";
    }
    block
}

/// Run a node-count sweep. The table is written even when some runs fail.
pub fn convergence(args: &ConvergenceArgs) -> Result<String> {
    let cfg = RunConfig::resolve(&args.common)?;
    validate_sweep(&args.ns)?;
    let mut reports = args
        .ns
        .par_iter()
        .map(|&n| run_experiment(&cfg.problem, &ExperimentConfig::new(cfg.basis, n, cfg.dt, cfg.t_final)))
        .map(|o| o.map(|o| o.report))
        .collect::<dqcd_core::Result<Vec<_>>>()?;
    fill_orders(&mut reports);
    let out = OutputDir::create(cfg.out_dir.clone())?;
    out.write("convergence.csv", &reports_csv(&reports, cfg.timing))?;

    let mut log = cfg.describe();
    log.push(("N".into(), format!("{:?}", args.ns)));
    for r in &reports {
        log.push((format!("N={}", r.n), format!("dt={} steps={} {}", r.dt, r.steps, error_summary(r))));
    }
    let mut summary: Vec<String> = reports
        .iter()
        .map(|r| {
            let roc = r.roc_linf.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
            format!("N={:<4} {}  roc={roc}", r.n, error_summary(r))
        })
        .collect();

    if let Some(table) = args.reference {
        let reference = ReferenceTable::embedded()?;
        let key = RowKey { table, block: reference_block(&cfg), basis: cfg.basis };
        let rows: Vec<_> =
            reports.iter().map(|r| compare_to_reference(r, &reference, &key, TolerancePolicy::DEFAULT)).collect();
        out.write("diff.md", diff_markdown(&rows).as_bytes())?;
        out.write("diff.csv", diff_csv(&rows).as_bytes())?;
        let passed = rows.iter().filter(|r| r.passed()).count();
        summary.push(format!("reference table {table} [{}]: {passed}/{} rows within tolerance", key.block, rows.len()));
        log.push(("reference".into(), format!("table {table} block '{}' {passed}/{} pass", key.block, rows.len())));
    }
    out.write("run.log", log_text(&log).as_bytes())?;

    let failed: Vec<&ErrorReport> = reports.iter().filter(|r| r.failure.is_some()).collect();
    if let Some(first) = failed.first() {
        return Err(CliError::RunsFailed {
            failed: failed.len(),
            total: reports.len(),
            first: format!("N={}: {}", first.n, first.failure.as_deref().unwrap_or_default()),
        });
    }
    summary.push(format!("-> {}", out.path().display()));
    Ok(summary.join("\n"))
}

fn injected_operator(kind: Injected) -> Matrix {
    match kind {
        Injected::MinusIdentity => Matrix::identity(9).combine(-1.0, &Matrix::zeros(9, 9), 0.0),
        Injected::Growing => Matrix::from_fn(3, 3, |i, j| if i == j { [1.0, -2.0, -3.0][i] } else { 0.0 }),
    }
}

fn spectrum_csv(report: &SpectrumReport) -> Vec<u8> {
    let mut buf = format!("{SPECTRUM_CSV_HEADER}\n").into_bytes();
    report.write_csv_rows(&mut buf).expect("writing to memory");
    buf
}

/// Overall verdict over a set of spectra.
pub fn verdict(reports: &[SpectrumReport]) -> bool {
    !reports.is_empty() && reports.iter().all(SpectrumReport::is_stable)
}

/// Spectra for each grid size plus a verdict. An unstable verdict is
/// returned as an error after all files are written.
pub fn stability(args: &StabilityArgs) -> Result<String> {
    let out_dir = crate::config::out_dir(args.common.out.as_ref());
    let (reports, names) = if let Some(kind) = args.inject {
        let dt = match args.common.dt {
            StepRule::Fixed(dt) => dt,
            StepRule::HSquared => 0.01,
        };
        (vec![check_matrix(&injected_operator(kind), dt)?], vec!["spectrum_injected.csv".to_string()])
    } else {
        let cfg = RunConfig::resolve(&args.common)?;
        if args.ns.is_empty() {
            return Err(CliError::Usage("--N needs at least one grid size".into()));
        }
        for &n in &args.ns {
            let dim = n.saturating_sub(2).pow(2);
            if dim > dqcd_core::operator::DENSE_CAP {
                return Err(dqcd_core::Error::DimensionCap { dim, cap: dqcd_core::operator::DENSE_CAP }.into());
            }
        }
        let reports = args
            .ns
            .par_iter()
            .map(|&n| {
                let grid = cfg.problem.domain.grid(n, n)?;
                let weights = Arc::new(build_weight_set(cfg.basis, &grid)?);
                let dt = cfg.dt.resolve(&grid);
                let system = assemble_operator(cfg.problem.coeffs, weights, grid, cfg.problem.boundary.clone())?;
                check_stability(&system, dt)
            })
            .collect::<dqcd_core::Result<Vec<_>>>()?;
        let names = args.ns.iter().map(|n| format!("spectrum_N{n}.csv")).collect();
        (reports, names)
    };

    let out = OutputDir::create(out_dir)?;
    let mut table = String::from("grid,basis,dt,max_re,max_amplification,violations,stable\n");
    let mut summary = Vec::new();
    for (r, name) in reports.iter().zip(&names) {
        out.write(name, &spectrum_csv(r))?;
        table += &format!(
            "{},\"{}\",{},{:.6e},{:.6e},{},{}\n",
            r.grid_label(),
            r.basis_label(),
            r.dt,
            r.max_real_part,
            r.max_amplification,
            r.violations,
            r.is_stable()
        );
        summary.push(format!(
            "{} {}: max Re = {:.6e}, max |R| = {:.6}, violations = {}",
            r.grid_label(),
            r.basis_label(),
            r.max_real_part,
            r.max_amplification,
            r.violations
        ));
    }
    let stable = verdict(&reports);
    let line = format!("verdict: {}", if stable { "stable" } else { "unstable" });
    table += &format!("# {line}\n");
    out.write("stability.csv", table.as_bytes())?;
    summary.push(line);
    let text = summary.join("\n");
    if stable {
        Ok(text)
    } else {
        Err(CliError::Unstable(text))
    }
}
