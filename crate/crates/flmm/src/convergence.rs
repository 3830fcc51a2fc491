//! Convergence studies: max-error tables and experimental orders (EOC).

use rayon::prelude::*;

use flmm_core::methods::Method;
use flmm_core::solver::{solve, Grid, NewtonConfig};
use flmm_core::FractionalOrder;

use crate::error::{HarnessError, Result};
use crate::problems::{builtin_problem, ProblemParams};

/// Errors below this are treated as exact; no order is computed from them.
pub const EOC_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eoc {
    /// First row of a table.
    Absent,
    Value(f64),
    /// One of the two errors is at rounding level.
    NotApplicable,
}

impl Eoc {
    pub fn value(self) -> Option<f64> {
        match self {
            Eoc::Value(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocRow {
    pub m: usize,
    pub h: f64,
    pub max_error: f64,
    pub order: Eoc,
}

/// `log(E2/E1) / log(h2/h1)`.
pub fn eoc(e1: f64, h1: f64, e2: f64, h2: f64) -> Eoc {
    if !(e1 > EOC_FLOOR && e2 > EOC_FLOOR && e1.is_finite() && e2.is_finite()) {
        return Eoc::NotApplicable;
    }
    Eoc::Value((e2 / e1).ln() / (h2 / h1).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnFailure {
    pub m: usize,
    pub message: String,
}

/// One `(method, β)` column of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceColumn {
    pub method: Method,
    pub beta: FractionalOrder,
    /// Rows for every `M` before the first failure.
    pub rows: Vec<EocRow>,
    pub failure: Option<ColumnFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSpec {
    pub methods: Vec<Method>,
    pub betas: Vec<FractionalOrder>,
    pub problem: String,
    pub params: ProblemParams,
    pub mlist: Vec<usize>,
    pub newton: NewtonConfig,
}

impl ConvergenceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.betas.is_empty() {
            return Err(HarnessError::validation("need at least one method and one beta"));
        }
        if self.mlist.is_empty() {
            return Err(HarnessError::validation("empty M list"));
        }
        if let Some(m) = self.mlist.iter().find(|m| !m.is_power_of_two() || **m < 2) {
            return Err(HarnessError::validation(format!("M = {m} is not a power of two >= 2")));
        }
        if self.mlist.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::validation("M list must be strictly increasing"));
        }
        if self.params.t0.is_some_and(|t| t != 0.0) {
            return Err(HarnessError::validation("convergence runs start at t0 = 0"));
        }
        for beta in &self.betas {
            builtin_problem(&self.problem, *beta, self.params)?;
        }
        Ok(())
    }
}

/// Parses `a..b` (powers of two from `a` to `b`) or a comma-separated list.
pub fn parse_mlist(s: &str) -> Result<Vec<usize>> {
    let bad = || HarnessError::validation(format!("invalid M list {s:?}"));
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if !lo.is_power_of_two() || !hi.is_power_of_two() || lo > hi {
            return Err(bad());
        }
        Ok(std::iter::successors(Some(lo), |m| m.checked_mul(2))
            .take_while(|m| *m <= hi)
            .collect())
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    }
}

/// Solves on `[0, 1]` with `h = 1/M` and returns `max_n |y_n - y(t_n)|`.
pub fn max_error_at(
    problem: &str,
    params: ProblemParams,
    method: Method,
    beta: FractionalOrder,
    m: usize,
    newton: &NewtonConfig,
) -> Result<f64> {
    let bp = builtin_problem(problem, beta, params)?;
    let grid = Grid::new(0.0, 1.0, m)?;
    if !(bp.exact)(1.0).is_finite() {
        return Err(HarnessError::validation(format!(
            "exact solution of {problem} cannot be evaluated accurately on [0, 1]"
        )));
    }
    let trace = solve(&bp.problem, method, &grid, newton)
        .map_err(|e| HarnessError::solver(format!("{method}, beta={beta}, M={m}"), e))?;
    Ok(trace.max_error(|t| (bp.exact)(t)))
}

/// Builds EOC rows from `(M, max_error)` pairs.
pub fn eoc_rows(errors: &[(usize, f64)]) -> Vec<EocRow> {
    let mut rows: Vec<EocRow> = Vec::with_capacity(errors.len());
    for &(m, e) in errors {
        let h = 1.0 / m as f64;
        let order = match rows.last() {
            None => Eoc::Absent,
            Some(prev) => eoc(prev.max_error, prev.h, e, h),
        };
        rows.push(EocRow {
            m,
            h,
            max_error: e,
            order,
        });
    }
    rows
}

/// Runs a single `(method, β)` column sequentially.
pub fn run_convergence(
    problem: &str,
    params: ProblemParams,
    method: Method,
    beta: FractionalOrder,
    mlist: &[usize],
    newton: &NewtonConfig,
) -> Result<ConvergenceColumn> {
    let spec = ConvergenceSpec {
        methods: vec![method],
        betas: vec![beta],
        problem: problem.to_owned(),
        params,
        mlist: mlist.to_vec(),
        newton: *newton,
    };
    spec.validate()?;
    let cells = mlist
        .iter()
        .map(|&m| (m, max_error_at(problem, params, method, beta, m, newton)))
        .collect();
    assemble(method, beta, cells)
}

fn assemble(method: Method, beta: FractionalOrder, cells: Vec<(usize, Result<f64>)>) -> Result<ConvergenceColumn> {
    let mut errors = Vec::new();
    let mut failure = None;
    for (m, r) in cells {
        match r {
            Ok(e) => errors.push((m, e)),
            Err(e @ HarnessError::Numerical { .. }) => {
                failure = Some(ColumnFailure {
                    m,
                    message: e.to_string(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ConvergenceColumn {
        method,
        beta,
        rows: eoc_rows(&errors),
        failure,
    })
}

/// Runs every `(method, β, M)` cell in parallel; columns come back sorted by
/// `(method, β)` in the order given, rows by `M`.
pub fn run_sweep(spec: &ConvergenceSpec) -> Result<Vec<ConvergenceColumn>> {
    spec.validate()?;
    let cells: Vec<(usize, usize, usize)> = (0..spec.methods.len())
        .flat_map(|i| (0..spec.betas.len()).flat_map(move |j| (0..spec.mlist.len()).map(move |k| (i, j, k))))
        .collect();
    let mut results: Vec<((usize, usize, usize), Result<f64>)> = cells
        .into_par_iter()
        .map(|(i, j, k)| {
            let r = max_error_at(
                &spec.problem,
                spec.params,
                spec.methods[i],
                spec.betas[j],
                spec.mlist[k],
                &spec.newton,
            );
            ((i, j, k), r)
        })
        .collect();
    results.sort_by_key(|(key, _)| *key);

    let mut columns = Vec::new();
    let mut it = results.into_iter().peekable();
    while let Some(((i, j, _), first)) = it.next() {
        let mut cells = vec![(spec.mlist[0], first)];
        while let Some(((i2, j2, k), _)) = it.peek() {
            if (*i2, *j2) != (i, j) {
                break;
            }
            let k = *k;
            let (_, r) = it.next().expect("peeked");
            cells.push((spec.mlist[k], r));
        }
        columns.push(assemble(spec.methods[i], spec.betas[j], cells)?);
    }
    Ok(columns)
}
