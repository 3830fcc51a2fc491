//! Executes a resolved [`ExperimentConfig`] and writes its result file.

use rayon::prelude::*;

use flmm_core::solver::{solve, Grid};
use flmm_core::stability::{
    boundary_curve, compare_at_minus_one, dynamic_membership, membership_in, BoundaryCurve, DYNAMIC_STEPS,
};
use flmm_core::Complex64;

use crate::config::{ExperimentConfig, Kind, Oracle};
use crate::convergence::{run_sweep, ConvergenceColumn, ConvergenceSpec};
use crate::error::{HarnessError, Result};
use crate::output::{self, MembershipGrid, TraceFile};
use crate::problems::builtin_problem;

/// What a run produced besides its output file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    /// Human-readable notes for stderr.
    pub diagnostics: Vec<String>,
    /// Convergence columns aborted by a solver failure.
    pub failed_columns: usize,
    pub total_columns: usize,
}

impl Report {
    /// Turns a partial failure into an error (exit code 3).
    pub fn into_result(self) -> Result<Self> {
        if self.failed_columns > 0 {
            Err(HarnessError::PartialFailure {
                failed: self.failed_columns,
                total: self.total_columns,
            })
        } else {
            Ok(self)
        }
    }
}

/// Computes the payload of `cfg` without writing it.
pub fn render(cfg: &ExperimentConfig) -> Result<(Vec<u8>, Report)> {
    let mut report = Report::default();
    let bytes = match cfg.kind {
        Kind::Weights => {
            let (m, b) = (cfg.methods[0], cfg.betas[0]);
            let w = m.weights(b, cfg.n)?;
            output::render_weights(m, b.value(), &w, cfg.format)?
        }
        Kind::Solve => {
            let (m, b) = (cfg.methods[0], cfg.betas[0]);
            let bp = builtin_problem(&cfg.problem, b, cfg.params)?;
            let grid = Grid::new(bp.problem.t0, cfg.t_end, cfg.steps)?;
            let trace = solve(&bp.problem, m, &grid, &cfg.newton)
                .map_err(|e| HarnessError::solver(format!("{m}, beta={b}, N={}", cfg.steps), e))?;
            let err = trace.max_error(|t| (bp.exact)(t));
            let max_error = err.is_finite().then_some(err);
            if let Some(e) = max_error {
                report.diagnostics.push(format!("max error against exact solution: {e:.3e}"));
            }
            output::render_trace(&TraceFile::new(&trace, Some(bp.name), max_error), cfg.format)?
        }
        Kind::Convergence => {
            let spec = ConvergenceSpec {
                methods: cfg.methods.clone(),
                betas: cfg.betas.clone(),
                problem: cfg.problem.clone(),
                params: cfg.params,
                mlist: cfg.mlist.clone(),
                newton: cfg.newton,
            };
            if cfg.mlist.last().is_some_and(|m| *m > 4096) {
                report
                    .diagnostics
                    .push("warning: M above 4096; history sums cost O(M^2) per run".into());
            }
            let columns = run_sweep(&spec)?;
            note_failures(&columns, &mut report);
            output::render_convergence(&cfg.problem, &columns, cfg.format)?
        }
        Kind::StabilityBoundary => {
            let curves = curves(cfg)?;
            for c in curves.iter().filter(|c| c.pole_window.is_some()) {
                report.diagnostics.push(format!(
                    "{} beta={}: {} sample(s) within {:e} of theta=pi written as inf",
                    c.method,
                    c.beta,
                    c.excluded_count(),
                    c.pole_window.unwrap_or_default()
                ));
            }
            output::render_boundaries(&curves, cfg.format)?
        }
        Kind::StabilityGrid => {
            let grids = membership_grids(cfg)?;
            output::render_grids(&grids, cfg.oracle.name(), cfg.format)?
        }
        Kind::StabilityCompare => {
            let rows: Vec<_> = cfg.betas.iter().map(|b| compare_at_minus_one(*b)).collect();
            for r in rows.iter().filter(|r| !r.strictly_ordered()) {
                report
                    .diagnostics
                    .push(format!("beta={}: ordering degenerates (FAM1 value is infinite)", r.beta));
            }
            output::render_comparisons(&rows, cfg.format)?
        }
    };
    Ok((bytes, report))
}

/// Renders and writes the output of `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let (bytes, report) = render(cfg)?;
    output::emit(&bytes, cfg.out.as_deref())?;
    Ok(report)
}

fn note_failures(columns: &[ConvergenceColumn], report: &mut Report) {
    report.total_columns = columns.len();
    for c in columns {
        if let Some(f) = &c.failure {
            report.failed_columns += 1;
            report
                .diagnostics
                .push(format!("column {} beta={} aborted at M={}: {}", c.method, c.beta, f.m, f.message));
        }
    }
}

fn curves(cfg: &ExperimentConfig) -> Result<Vec<BoundaryCurve>> {
    let mut out = Vec::new();
    for m in &cfg.methods {
        for b in &cfg.betas {
            out.push(boundary_curve(*m, *b, cfg.samples)?);
        }
    }
    Ok(out)
}

fn membership_grids(cfg: &ExperimentConfig) -> Result<Vec<MembershipGrid>> {
    let points = cfg.window.points();
    let mut grids = Vec::new();
    for curve in curves(cfg)? {
        let (m, b) = (curve.method, curve.beta);
        let verdicts: Result<Vec<_>> = points
            .par_iter()
            .map(|&(re, im)| {
                let z = Complex64::new(re, im);
                let v = match cfg.oracle {
                    Oracle::Winding => membership_in(&curve, z),
                    Oracle::Dynamic => dynamic_membership(m, b, z, DYNAMIC_STEPS)?,
                };
                Ok((z, v))
            })
            .collect();
        grids.push(MembershipGrid {
            method: m,
            beta: b.value(),
            points: verdicts?,
        });
    }
    Ok(grids)
}
