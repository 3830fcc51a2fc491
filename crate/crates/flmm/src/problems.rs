//! Closed registry of test problems with known solutions.

use std::fmt;
use std::sync::Arc;

use flmm_core::solver::ProblemDef;
use flmm_core::FractionalOrder;

use crate::error::{HarnessError, Result};

pub type ExactFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub const REGISTRY: [&str; 4] = ["paper-nonlinear", "poly2-linear", "constant", "test-lambda"];

/// Optional problem parameters; which ones apply depends on the problem.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProblemParams {
    pub y0: Option<f64>,
    pub lambda: Option<f64>,
    pub t0: Option<f64>,
}

#[derive(Clone)]
pub struct BuiltinProblem {
    pub name: &'static str,
    pub problem: ProblemDef,
    pub exact: ExactFn,
}

impl fmt::Debug for BuiltinProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BuiltinProblem")
            .field("name", &self.name)
            .field("problem", &self.problem)
            .finish_non_exhaustive()
    }
}

fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `E_β(z) = Σ z^k / Γ(βk + 1)`, summed directly. Returns NaN when
/// cancellation would cost more than about four digits (large negative `z`).
pub fn mittag_leffler(beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    let log_abs = z.abs().ln();
    let mut sum = 1.0;
    let mut largest: f64 = 1.0;
    let mut k = 1u32;
    loop {
        let kf = f64::from(k);
        let (lg, _) = libm::lgamma_r(beta * kf + 1.0);
        let mag = (kf * log_abs - lg).exp();
        let term = if z < 0.0 && k % 2 == 1 { -mag } else { mag };
        sum += term;
        largest = largest.max(mag);
        // terms decay monotonically once βk exceeds |z|^{1/β}
        if mag < 1e-17 * sum.abs().max(1e-300) && kf * beta > z.abs().powf(1.0 / beta) {
            break;
        }
        k += 1;
        if k > 100_000 {
            return f64::NAN;
        }
    }
    if largest > 1e4 * sum.abs() {
        f64::NAN
    } else {
        sum
    }
}

fn reject(name: &str, what: &str, present: bool) -> Result<()> {
    if present {
        Err(HarnessError::validation(format!("problem {name} takes no parameter {what}")))
    } else {
        Ok(())
    }
}

fn finite(name: &str, what: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(HarnessError::validation(format!("problem {name}: {what} must be finite")))
    }
}

/// Looks up a registry problem. Errors list the registry on an unknown name.
pub fn builtin_problem(name: &str, beta: FractionalOrder, params: ProblemParams) -> Result<BuiltinProblem> {
    let b = beta.value();
    match name {
        "paper-nonlinear" => {
            reject(name, "y0", params.y0.is_some())?;
            reject(name, "lambda", params.lambda.is_some())?;
            reject(name, "t0", params.t0.is_some_and(|t| t != 0.0))?;
            let c1 = gamma(2.0 * b + 5.0) / gamma(b + 5.0);
            let c2 = 240.0 / gamma(6.0 - b);
            let exact = move |t: f64| t.powf(2.0 * b + 4.0) - 2.0 * t.powi(5);
            let f = move |t: f64, y: f64| {
                let e = exact(t);
                c1 * t.powf(b + 4.0) - c2 * t.powf(5.0 - b) + e * e - y * y
            };
            Ok(BuiltinProblem {
                name: "paper-nonlinear",
                problem: ProblemDef::nonlinear(beta, 0.0, f, |_, y| -2.0 * y),
                exact: Arc::new(exact),
            })
        }
        "poly2-linear" => {
            reject(name, "y0", params.y0.is_some())?;
            reject(name, "lambda", params.lambda.is_some())?;
            reject(name, "t0", params.t0.is_some_and(|t| t != 0.0))?;
            let c = 2.0 / gamma(3.0 - b);
            Ok(BuiltinProblem {
                name: "poly2-linear",
                problem: ProblemDef::linear(beta, 0.0, 0.0, move |t| c * t.powf(2.0 - b)),
                exact: Arc::new(|t| t * t),
            })
        }
        "constant" => {
            let y0 = finite(name, "y0", params.y0.unwrap_or(1.0))?;
            let lambda = finite(name, "lambda", params.lambda.unwrap_or(-1.0))?;
            let t0 = finite(name, "t0", params.t0.unwrap_or(0.0))?;
            // D^β y = λ (y - y0)
            Ok(BuiltinProblem {
                name: "constant",
                problem: ProblemDef::linear(beta, y0, lambda, move |_| -lambda * y0).with_t0(t0),
                exact: Arc::new(move |_| y0),
            })
        }
        "test-lambda" => {
            let y0 = finite(name, "y0", params.y0.unwrap_or(1.0))?;
            let lambda = finite(name, "lambda", params.lambda.unwrap_or(-1.0))?;
            let t0 = finite(name, "t0", params.t0.unwrap_or(0.0))?;
            Ok(BuiltinProblem {
                name: "test-lambda",
                problem: ProblemDef::linear(beta, y0, lambda, |_| 0.0).with_t0(t0),
                exact: Arc::new(move |t| y0 * mittag_leffler(b, lambda * (t - t0).max(0.0).powf(b))),
            })
        }
        other => Err(HarnessError::validation(format!(
            "unknown problem {other:?}; available: {}",
            REGISTRY.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(b: f64) -> FractionalOrder {
        FractionalOrder::new(b).unwrap()
    }

    #[test]
    fn nonlinear_problem_exact_at_one() {
        let p = builtin_problem("paper-nonlinear", order(0.6), ProblemParams::default()).unwrap();
        assert_eq!((p.exact)(1.0), -1.0);
        assert_eq!(p.problem.y0, 0.0);
        assert!(!p.problem.is_linear());
    }

    #[test]
    fn nonlinear_problem_residual_vanishes_on_exact_solution() {
        // f(t, exact(t)) equals the Caputo derivative of the exact solution
        let b = 0.4;
        let p = builtin_problem("paper-nonlinear", order(b), ProblemParams::default()).unwrap();
        for t in [0.1, 0.5, 0.9] {
            let caputo = gamma(2.0 * b + 5.0) / gamma(b + 5.0) * f64::powf(t, b + 4.0)
                - 2.0 * gamma(6.0) / gamma(6.0 - b) * f64::powf(t, 5.0 - b);
            let y = (p.exact)(t);
            assert!((p.problem.eval(t, y) - caputo).abs() < 1e-12);
        }
    }

    #[test]
    fn poly2_source() {
        let p = builtin_problem("poly2-linear", order(0.5), ProblemParams::default()).unwrap();
        let want = gamma(3.0) / gamma(2.5) * 0.25f64.powf(1.5);
        assert!((p.problem.eval(0.25, 123.0) - want).abs() < 1e-14);
        assert_eq!((p.exact)(3.0), 9.0);
    }

    #[test]
    fn constant_is_fixed_point() {
        let params = ProblemParams {
            y0: Some(2.5),
            ..Default::default()
        };
        let p = builtin_problem("constant", order(0.3), params).unwrap();
        assert_eq!(p.problem.eval(0.7, 2.5), 0.0);
        assert_eq!((p.exact)(17.0), 2.5);
    }

    #[test]
    fn unknown_name_lists_registry() {
        let err = builtin_problem("nope", order(0.5), ProblemParams::default()).unwrap_err();
        let msg = err.to_string();
        for name in REGISTRY {
            assert!(msg.contains(name), "{msg}");
        }
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn inapplicable_parameters_rejected() {
        let params = ProblemParams {
            lambda: Some(1.0),
            ..Default::default()
        };
        assert!(builtin_problem("paper-nonlinear", order(0.5), params).is_err());
    }

    #[test]
    fn mittag_leffler_closed_forms() {
        for z in [-3.0, -1.0, -0.2, 0.5, 2.0] {
            assert!((mittag_leffler(1.0, z) - f64::exp(z)).abs() < 1e-13 * f64::exp(z).max(1.0));
            // E_2(z) = cosh(sqrt z) for z > 0, cos(sqrt(-z)) for z < 0
            let e2 = if z > 0.0 { z.sqrt().cosh() } else { (-z).sqrt().cos() };
            assert!((mittag_leffler(2.0, z) - e2).abs() < 1e-13);
        }
        // E_{1/2}(-x) = exp(x^2) erfc(x)
        for x in [0.1, 0.5, 1.0, 2.0] {
            let want = f64::exp(x * x) * libm::erfc(x);
            assert!((mittag_leffler(0.5, -x) - want).abs() < 1e-12, "{x}");
        }
        assert!(mittag_leffler(0.5, -20.0).is_nan());
    }
}
