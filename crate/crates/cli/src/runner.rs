//! Task scheduling, report collection and the suite verdict.

use crate::manifest::Suite;
use crate::suites::Task;
use std::collections::BTreeMap;
use std::sync::Mutex;
use torus_nse_core::report::{CheckKind, CheckReport};

pub struct RunOutcome {
    /// All reports, canonicalized by (check_id, field_id).
    pub reports: Vec<(Suite, CheckReport)>,
    pub hard_failures: usize,
    pub diagnostic_failures: usize,
}

/// Runs tasks on `jobs` workers. The report stream is collected centrally
/// and sorted afterwards, so output order does not depend on scheduling.
pub fn run_tasks(tasks: Vec<Task>, jobs: usize) -> RunOutcome {
    let queue: Mutex<Vec<Option<Task>>> = Mutex::new(tasks.into_iter().map(Some).collect());
    let results: Mutex<Vec<(Suite, CheckReport)>> = Mutex::new(Vec::new());
    let jobs = jobs.max(1);

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let next = {
                    let mut q = queue.lock().expect("task queue poisoned");
                    let idx = q.iter().position(|t| t.is_some());
                    match idx {
                        Some(i) => q[i].take(),
                        None => None,
                    }
                };
                let Some(task) = next else { break };
                let suite = task.suite;
                let name = task.name.clone();
                let reports = match (task.run)() {
                    Ok(reports) => reports,
                    Err(err) => vec![CheckReport::residual(
                        &format!("task-error[{name}]"),
                        "task-execution",
                        &name,
                        "-",
                        1.0,
                        0.0,
                    )
                    .with_note(format!("{err:#}"))],
                };
                let mut sink = results.lock().expect("result sink poisoned");
                sink.extend(reports.into_iter().map(|r| (suite, r)));
            });
        }
    });

    let mut reports = results.into_inner().expect("result sink poisoned");
    reports.sort_by(|a, b| {
        (a.1.check_id.as_str(), a.1.field_id.as_str())
            .cmp(&(b.1.check_id.as_str(), b.1.field_id.as_str()))
    });
    let hard_failures = reports
        .iter()
        .filter(|(_, r)| r.kind == CheckKind::Assert && !r.pass)
        .count();
    let diagnostic_failures = reports
        .iter()
        .filter(|(_, r)| r.kind == CheckKind::Diagnostic && !r.pass)
        .count();
    RunOutcome {
        reports,
        hard_failures,
        diagnostic_failures,
    }
}

/// Applies per-suite tolerance overrides to hard assertions, recomputing
/// the verdicts.
pub fn apply_tolerance_overrides(outcome: &mut RunOutcome, overrides: &BTreeMap<String, f64>) {
    if overrides.is_empty() {
        return;
    }
    for (suite, report) in &mut outcome.reports {
        if report.kind != CheckKind::Assert {
            continue;
        }
        if let Some(tol) = overrides.get(suite.name()) {
            report.tol = *tol;
            report.pass = report.residual <= *tol;
        }
    }
    outcome.hard_failures = outcome
        .reports
        .iter()
        .filter(|(_, r)| r.kind == CheckKind::Assert && !r.pass)
        .count();
    outcome.diagnostic_failures = outcome
        .reports
        .iter()
        .filter(|(_, r)| r.kind == CheckKind::Diagnostic && !r.pass)
        .count();
}

/// Pass/fail counts per equation anchor.
pub fn summary_table(outcome: &RunOutcome) -> String {
    let mut per_anchor: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for (_, r) in &outcome.reports {
        let entry = per_anchor.entry(r.anchor.as_str()).or_default();
        if r.pass {
            entry.0 += 1;
        } else if r.kind == CheckKind::Assert {
            entry.1 += 1;
        } else {
            entry.2 += 1;
        }
    }
    let width = per_anchor
        .keys()
        .map(|a| a.len())
        .max()
        .unwrap_or(6)
        .max("anchor".len());
    let mut out = format!("{:width$}  pass  fail  warn\n", "anchor");
    for (anchor, (pass, fail, warn)) in &per_anchor {
        out.push_str(&format!("{anchor:width$}  {pass:4}  {fail:4}  {warn:4}\n"));
    }
    let total: usize = outcome.reports.len();
    out.push_str(&format!(
        "\n{} checks: {} passed, {} hard failures, {} diagnostic warnings\n",
        total,
        total - outcome.hard_failures - outcome.diagnostic_failures,
        outcome.hard_failures,
        outcome.diagnostic_failures
    ));
    out
}
