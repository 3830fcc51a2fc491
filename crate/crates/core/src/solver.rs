//! Fixed-step time marching for `D^β y = f(t, y)`, `y(t0) = y0`.
//!
//! Both solvers work on the shifted unknown `u = y - y0`, which has homogeneous
//! initial data at the origin (see [`reduce_initial`]). Step `n` solves
//!
//! ```text
//! A_0 u_n + Σ_{k=1..n} A_k u_{n-k} = h^β Σ_j Q_j f(t_{n-j}, u_{n-j} + y0)
//! ```
//!
//! exactly for linear right-hand sides and by Newton-Raphson otherwise. No
//! starting-weight corrections are applied. Each step costs `O(n)`, so a run
//! is `O(N²)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::methods::{Method, MethodWeights};
use crate::series::CoeffSeries;
use crate::{Error, FractionalOrder, Result};

pub type SourceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type RhsFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ComplexSourceFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Field of values a trace can hold: `f64`, or `Complex64` for the linear
/// solver with complex `λ`.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
{
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn finite(self) -> bool;
    /// `(re, im)`; the imaginary part of a real is zero.
    fn parts(self) -> (f64, f64);

    fn zero() -> Self {
        Self::from_real(0.0)
    }
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

/// Uniform grid `t_n = t0 + n h`, `n = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    t0: f64,
    h: f64,
    steps: usize,
}

impl Grid {
    /// Splits `[t0, t_end]` into `steps` equal steps.
    pub fn new(t0: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t0.is_finite() && t_end.is_finite()) || t_end <= t0 {
            return Err(Error::InvalidArgument("grid needs finite t0 < t_end"));
        }
        Grid::with_step(t0, (t_end - t0) / steps as f64, steps)
    }

    pub fn with_step(t0: f64, h: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("grid needs at least one step"));
        }
        if !(h > 0.0 && h.is_finite() && t0.is_finite()) {
            return Err(Error::InvalidArgument("grid step must be positive and finite"));
        }
        Ok(Grid { t0, h, steps })
    }

    #[inline]
    pub fn t0(&self) -> f64 {
        self.t0
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    pub fn t(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.h
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.steps)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|n| self.t(n))
    }
}

/// Right-hand side `f(t, y)`.
#[derive(Clone)]
pub enum Rhs {
    /// `f(t, y) = λ y + s(t)`.
    Linear { lambda: f64, source: SourceFn },
    /// General `f` with its analytic partial derivative `∂f/∂y`.
    Nonlinear { f: RhsFn, df_dy: RhsFn },
}

impl core::fmt::Debug for Rhs {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Rhs::Linear { lambda, .. } => f.debug_struct("Linear").field("lambda", lambda).finish_non_exhaustive(),
            Rhs::Nonlinear { .. } => f.debug_struct("Nonlinear").finish_non_exhaustive(),
        }
    }
}

/// A scalar fractional initial value problem.
#[derive(Debug, Clone)]
pub struct ProblemDef {
    pub beta: FractionalOrder,
    pub t0: f64,
    pub y0: f64,
    pub rhs: Rhs,
}

impl ProblemDef {
    pub fn linear(
        beta: FractionalOrder,
        y0: f64,
        lambda: f64,
        source: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProblemDef {
            beta,
            t0: 0.0,
            y0,
            rhs: Rhs::Linear {
                lambda,
                source: Arc::new(source),
            },
        }
    }

    pub fn nonlinear(
        beta: FractionalOrder,
        y0: f64,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        df_dy: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProblemDef {
            beta,
            t0: 0.0,
            y0,
            rhs: Rhs::Nonlinear {
                f: Arc::new(f),
                df_dy: Arc::new(df_dy),
            },
        }
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.rhs, Rhs::Linear { .. })
    }

    /// Evaluates `f(t, y)`.
    pub fn eval(&self, t: f64, y: f64) -> f64 {
        match &self.rhs {
            Rhs::Linear { lambda, source } => lambda * y + source(t),
            Rhs::Nonlinear { f, .. } => f(t, y),
        }
    }
}

/// Linear test-type problem with complex `λ`, used for stability experiments
/// off the real axis.
#[derive(Clone)]
pub struct ComplexLinearProblem {
    pub beta: FractionalOrder,
    pub t0: f64,
    pub y0: Complex64,
    pub lambda: Complex64,
    /// `None` means `s ≡ 0`.
    pub source: Option<ComplexSourceFn>,
}

impl ComplexLinearProblem {
    /// `D^β y = λ y`, `y(0) = y0`.
    pub fn test_equation(beta: FractionalOrder, lambda: Complex64, y0: Complex64) -> Self {
        ComplexLinearProblem {
            beta,
            t0: 0.0,
            y0,
            lambda,
            source: None,
        }
    }
}

/// Newton-Raphson controls. Iteration stops once
/// `|y_k - y_{k-1}| <= tol (1 + |y_k|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    tol: f64,
    max_iters: u32,
}

impl NewtonConfig {
    pub fn new(tol: f64, max_iters: u32) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument("Newton tolerance must be positive"));
        }
        if max_iters == 0 {
            return Err(Error::InvalidArgument("Newton needs at least one iteration"));
        }
        Ok(NewtonConfig { tol, max_iters })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iters(&self) -> u32 {
        self.max_iters
    }
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-12,
            max_iters: 50,
        }
    }
}

/// Computed solution on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrace<T = f64> {
    pub method: Method,
    pub beta: FractionalOrder,
    pub grid: Grid,
    /// `y_0..y_N`; `y[0]` is the initial value.
    pub y: Vec<T>,
    /// Newton iterations per step (`newton_iters[n-1]` for step `n`); empty for
    /// linear solves.
    pub newton_iters: Vec<u32>,
}

impl<T: Scalar> SolutionTrace<T> {
    pub fn last(&self) -> T {
        self.y[self.y.len() - 1]
    }
}

impl SolutionTrace<f64> {
    /// `max_n |y_n - exact(t_n)|`.
    pub fn max_error(&self, exact: impl Fn(f64) -> f64) -> f64 {
        self.y
            .iter()
            .enumerate()
            .map(|(n, y)| (y - exact(self.grid.t(n))).abs())
            .fold(0.0, f64::max)
    }
}

/// History term `Σ_{k=1..n} A_k u_{n-k}` of step `n`.
///
/// # Panics
///
/// If `n == 0` or fewer than `n` history values are supplied.
pub fn history_convolution<T: Scalar>(a: &CoeffSeries, u: &[T], n: usize) -> T {
    assert!(n >= 1 && u.len() >= n, "history_convolution needs n >= 1 and n values");
    let a = a.as_slice();
    let mut acc = T::zero();
    for k in 1..=n {
        acc = acc + u[n - k] * a[k];
    }
    acc
}

/// Shifts a problem to homogeneous initial data at the origin:
/// `u(τ) = y(τ + t0) - y0` solves `D^β u = f(τ + t0, u + y0)`, `u(0) = 0`.
pub fn reduce_initial(p: &ProblemDef) -> ProblemDef {
    if p.t0 == 0.0 && p.y0 == 0.0 {
        return p.clone();
    }
    let (t0, y0) = (p.t0, p.y0);
    let rhs = match &p.rhs {
        Rhs::Linear { lambda, source } => {
            let (lambda, source) = (*lambda, source.clone());
            let shift = lambda * y0;
            Rhs::Linear {
                lambda,
                source: Arc::new(move |t| source(t + t0) + shift),
            }
        }
        Rhs::Nonlinear { f, df_dy } => {
            let (f, df_dy) = (f.clone(), df_dy.clone());
            Rhs::Nonlinear {
                f: Arc::new(move |t, u| f(t + t0, u + y0)),
                df_dy: Arc::new(move |t, u| df_dy(t + t0, u + y0)),
            }
        }
    };
    ProblemDef {
        beta: p.beta,
        t0: 0.0,
        y0: 0.0,
        rhs,
    }
}

fn check_grid(grid: &Grid, t0: f64) -> Result<()> {
    if grid.t0() != t0 {
        return Err(Error::GridMismatch {
            grid: grid.t0(),
            problem: t0,
        });
    }
    Ok(())
}

// Marches the shifted unknown u for f = λ u + s̃(τ); s̃ already contains λ y0.
fn march_linear<T: Scalar>(
    w: &MethodWeights,
    hb: f64,
    lambda: T,
    steps: usize,
    source: impl Fn(usize) -> T,
) -> Result<Vec<T>> {
    let q = w.q.as_slice();
    let lhb = lambda * hb;
    let denom = T::from_real(w.a[0]) - lhb * q[0];
    if denom.modulus() == 0.0 {
        let (re, im) = lhb.parts();
        return Err(Error::SingularUpdate { re, im });
    }
    let mut u = vec![T::zero(); steps + 1];
    // f-values are only needed when Q has more than one term
    let mut f_prev = source(0);
    for n in 1..=steps {
        let c = history_convolution(&w.a, &u, n);
        let s = source(n);
        let mut rhs = s * q[0];
        if q.len() > 1 {
            rhs = rhs + f_prev * q[1];
        }
        let un = (rhs * hb - c) / denom;
        if !un.finite() {
            return Err(Error::NonFiniteSolution { step: n });
        }
        u[n] = un;
        f_prev = lambda * un + s;
    }
    Ok(u)
}

/// Solves a linear problem `f = λ y + s(t)` with the closed-form update
/// `u_n = (h^β [Q_0 s̃_n + Q_1 f̃_{n-1}] - Σ_{k≥1} A_k u_{n-k}) / (A_0 - λ h^β Q_0)`.
pub fn solve_linear(p: &ProblemDef, method: Method, grid: &Grid) -> Result<SolutionTrace<f64>> {
    check_grid(grid, p.t0)?;
    let reduced = reduce_initial(p);
    let Rhs::Linear { lambda, source } = &reduced.rhs else {
        return Err(Error::WrongProblemKind { expected: "linear" });
    };
    let w = method.weights(p.beta, grid.steps())?;
    let h = grid.h();
    let hb = libm::pow(h, p.beta.value());
    let u = march_linear(&w, hb, *lambda, grid.steps(), |n| source(n as f64 * h))?;
    Ok(SolutionTrace {
        method,
        beta: p.beta,
        grid: *grid,
        y: u.into_iter().map(|u| u + p.y0).collect(),
        newton_iters: Vec::new(),
    })
}

/// Complex-`λ` variant of [`solve_linear`].
pub fn solve_linear_complex(
    p: &ComplexLinearProblem,
    method: Method,
    grid: &Grid,
) -> Result<SolutionTrace<Complex64>> {
    check_grid(grid, p.t0)?;
    let w = method.weights(p.beta, grid.steps())?;
    let h = grid.h();
    let hb = libm::pow(h, p.beta.value());
    let shift = p.lambda * p.y0;
    let t0 = p.t0;
    let u = march_linear(&w, hb, p.lambda, grid.steps(), |n| match &p.source {
        Some(s) => s(n as f64 * h + t0) + shift,
        None => shift,
    })?;
    Ok(SolutionTrace {
        method,
        beta: p.beta,
        grid: *grid,
        y: u.into_iter().map(|u| u + p.y0).collect(),
        newton_iters: Vec::new(),
    })
}

/// Solves a nonlinear problem, one Newton-Raphson solve per step seeded with
/// the previous value.
pub fn solve_nonlinear(p: &ProblemDef, method: Method, grid: &Grid, cfg: &NewtonConfig) -> Result<SolutionTrace<f64>> {
    check_grid(grid, p.t0)?;
    let reduced = reduce_initial(p);
    let Rhs::Nonlinear { f, df_dy } = &reduced.rhs else {
        return Err(Error::WrongProblemKind { expected: "nonlinear" });
    };
    let w = method.weights(p.beta, grid.steps())?;
    let (a0, q) = (w.a[0], w.q.as_slice());
    let h = grid.h();
    let hb = libm::pow(h, p.beta.value());
    let steps = grid.steps();

    let mut u = vec![0.0; steps + 1];
    let mut iters = Vec::with_capacity(steps);
    let mut f_prev = f(0.0, 0.0);
    for n in 1..=steps {
        let t = n as f64 * h;
        let c = history_convolution(&w.a, &u, n);
        let explicit = if q.len() > 1 { q[1] * f_prev } else { 0.0 };
        let mut un = u[n - 1];
        let mut converged = None;
        let mut residual = f64::INFINITY;
        for k in 1..=cfg.max_iters() {
            residual = a0 * un + c - hb * (q[0] * f(t, un) + explicit);
            let jac = a0 - hb * q[0] * df_dy(t, un);
            if jac == 0.0 || !jac.is_finite() {
                return Err(Error::SingularJacobian { step: n });
            }
            let step = residual / jac;
            un -= step;
            if !un.is_finite() {
                return Err(Error::NonFiniteSolution { step: n });
            }
            if step.abs() <= cfg.tol() * (1.0 + (un + p.y0).abs()) {
                converged = Some(k);
                break;
            }
        }
        let Some(k) = converged else {
            return Err(Error::NewtonNotConverged {
                step: n,
                residual: residual.abs(),
            });
        };
        iters.push(k);
        u[n] = un;
        if q.len() > 1 {
            f_prev = f(t, un);
        }
    }
    Ok(SolutionTrace {
        method,
        beta: p.beta,
        grid: *grid,
        y: u.into_iter().map(|u| u + p.y0).collect(),
        newton_iters: iters,
    })
}

/// Dispatches on the right-hand side kind.
pub fn solve(p: &ProblemDef, method: Method, grid: &Grid, cfg: &NewtonConfig) -> Result<SolutionTrace<f64>> {
    match p.rhs {
        Rhs::Linear { .. } => solve_linear(p, method, grid),
        Rhs::Nonlinear { .. } => solve_nonlinear(p, method, grid, cfg),
    }
}
