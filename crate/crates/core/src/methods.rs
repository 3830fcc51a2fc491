//! Catalogue of implicit FLMMs and their weights.
//!
//! A method applied to `D^β y = f` on a uniform grid reads
//!
//! ```text
//! Σ_{k=0..n} A_k y_{n-k} = h^β Σ_j Q_j f_{n-j}
//! ```
//!
//! with `A` the y-side series and `Q` a short f-side polynomial, so that the
//! generating function is `δ(ξ) = A(ξ) / Q(ξ)`.
//!
//! | method   | δ(ξ)                                  | order |
//! |----------|---------------------------------------|-------|
//! | `gl1`    | `(1-ξ)^β`                              | 1     |
//! | `nflmm2` | `(1-ξ)^β ((1+β/2) - (β/2) ξ)`           | 2     |
//! | `fbdf2`  | `(3/2 - 2ξ + ξ²/2)^β`                   | 2     |
//! | `fam1`   | `(1-ξ)^β / ((1-β/2) + (β/2) ξ)`         | 2     |
//! | `ft2`    | `(2 (1-ξ)/(1+ξ))^β`                     | 2     |

use alloc::vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::series::{self, CoeffSeries};
use crate::{Error, FractionalOrder, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Grünwald-Letnikov (fractional backward Euler).
    Gl1,
    /// Second-order method from the β/2-shifted Grünwald approximation.
    Nflmm2,
    /// Fractional BDF of order two.
    Fbdf2,
    /// Fractional Adams-Moulton method, implemented in f-side form.
    Fam1,
    /// Fractional trapezoidal rule.
    Ft2,
}

/// The two weight sequences of a method, truncated to the solver horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodWeights {
    /// y-side weights `A_0..A_n`.
    pub a: CoeffSeries,
    /// f-side polynomial `Q` (length 1 or 2).
    pub q: CoeffSeries,
}

/// `p(ξ) = p0 + p1 ξ` of the NFLMM2 generating function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nflmm2Params {
    pub p0: f64,
    pub p1: f64,
}

impl Nflmm2Params {
    pub fn new(beta: FractionalOrder) -> Self {
        let half = beta.value() / 2.0;
        Nflmm2Params {
            p0: 1.0 + half,
            p1: -half,
        }
    }
}

/// NFLMM2 weights `w_k = p0 g_k + p1 g_{k-1}` (with `g_{-1} = 0`), the
/// coefficients of `(1-ξ)^β (p0 + p1 ξ)`.
pub fn nflmm2_weights(beta: FractionalOrder, n: usize) -> CoeffSeries {
    let Nflmm2Params { p0, p1 } = Nflmm2Params::new(beta);
    let g = series::grunwald_weights(beta, n);
    let g = g.as_slice();
    let mut w = vec![0.0; n + 1];
    w[0] = p0 * g[0];
    for k in 1..=n {
        w[k] = p0 * g[k] + p1 * g[k - 1];
    }
    CoeffSeries::from_raw(w)
}

/// Weight pair `(A, Q)` of `method` truncated to `n + 1` y-side terms.
pub fn method_weights(method: Method, beta: FractionalOrder, n: usize) -> Result<MethodWeights> {
    method.weights(beta, n)
}

/// FAM1 expressed as a pure y-side series `(1-ξ)^β / q(ξ)`. Only used for
/// cross-checking the f-side form.
pub fn fam1_product_weights(beta: FractionalOrder, n: usize) -> Result<CoeffSeries> {
    let q = Method::Fam1.f_poly(beta);
    let r = series::series_reciprocal(&q, n)?;
    Ok(series::cauchy_product(&series::grunwald_weights(beta, n), &r, n))
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Nflmm2, Method::Gl1, Method::Fbdf2, Method::Fam1, Method::Ft2];

    /// Canonical lowercase name, as used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Method::Gl1 => "gl1",
            Method::Nflmm2 => "nflmm2",
            Method::Fbdf2 => "fbdf2",
            Method::Fam1 => "fam1",
            Method::Ft2 => "ft2",
        }
    }

    pub fn declared_order(self) -> u32 {
        match self {
            Method::Gl1 => 1,
            _ => 2,
        }
    }

    /// y-side weights `A_0..A_n`.
    pub fn y_series(self, beta: FractionalOrder, n: usize) -> Result<CoeffSeries> {
        Ok(match self {
            Method::Gl1 | Method::Fam1 => series::grunwald_weights(beta, n),
            Method::Nflmm2 => nflmm2_weights(beta, n),
            Method::Fbdf2 => {
                let bdf2 = CoeffSeries::new(vec![1.5, -2.0, 0.5])?;
                series::miller_power(&bdf2, beta.value(), n)?
            }
            Method::Ft2 => {
                let g = series::grunwald_weights(beta, n);
                let c = series::binom_neg_series(beta, n);
                series::cauchy_product(&g, &c, n).scaled(libm::pow(2.0, beta.value()))
            }
        })
    }

    /// f-side polynomial `Q`; `[1]` for everything except FAM1.
    pub fn f_poly(self, beta: FractionalOrder) -> CoeffSeries {
        match self {
            Method::Fam1 => {
                let half = beta.value() / 2.0;
                CoeffSeries::from_raw(vec![1.0 - half, half])
            }
            _ => CoeffSeries::one(),
        }
    }

    pub fn weights(self, beta: FractionalOrder, n: usize) -> Result<MethodWeights> {
        Ok(MethodWeights {
            a: self.y_series(beta, n)?,
            q: self.f_poly(beta),
        })
    }

    /// `δ(ξ)` at an arbitrary complex point, principal branch for the
    /// fractional power. Poles evaluate to an infinite value.
    pub fn generating_function(self, beta: FractionalOrder, xi: Complex64) -> Complex64 {
        let b = beta.value();
        let one = Complex64::new(1.0, 0.0);
        match self {
            Method::Gl1 => cpow(one - xi, b),
            Method::Nflmm2 => {
                let p = Nflmm2Params::new(beta);
                cpow(one - xi, b) * (xi * p.p1 + p.p0)
            }
            Method::Fbdf2 => cpow(xi * xi * 0.5 - xi * 2.0 + 1.5, b),
            Method::Fam1 => {
                let q = xi * (b / 2.0) + (1.0 - b / 2.0);
                divide(cpow(one - xi, b), q)
            }
            Method::Ft2 => {
                let base = divide((one - xi) * 2.0, one + xi);
                if base.is_finite() {
                    cpow(base, b)
                } else {
                    base
                }
            }
        }
    }

    /// Whether `δ` has a pole at `ξ = -1` (FT2 always, FAM1 only at `β = 1`).
    pub fn has_pole_at_minus_one(self, beta: FractionalOrder) -> bool {
        match self {
            Method::Ft2 => true,
            Method::Fam1 => beta.value() == 1.0,
            _ => false,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or(Error::InvalidArgument("unknown method (expected nflmm2, gl1, fbdf2, fam1 or ft2)"))
    }
}

pub(crate) fn cpow(z: Complex64, p: f64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z.powf(p)
    }
}

fn divide(num: Complex64, den: Complex64) -> Complex64 {
    if den.re == 0.0 && den.im == 0.0 {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        num / den
    }
}

/// Outcome of [`estimate_order`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    /// Least-squares slope of `log|defect|` against `log x`.
    Slope(f64),
    /// The defect is below `1e-13` at every sample, so the order exceeds
    /// what the sample range can resolve.
    BelowResolution,
}

impl OrderEstimate {
    pub fn slope(self) -> Option<f64> {
        match self {
            OrderEstimate::Slope(p) => Some(p),
            OrderEstimate::BelowResolution => None,
        }
    }
}

/// Truncation length used for evaluating `A(e^{-x})`: the tail beyond
/// `40/x` terms is damped by `e^{-40}`.
pub fn defect_truncation(x: f64) -> usize {
    libm::ceil(40.0 / x) as usize
}

/// `x^{-β} δ(e^{-x}) - 1`, evaluated from the truncated weight series.
///
/// A method of order `p` has a defect of size `O(x^p)`.
pub fn consistency_defect(method: Method, beta: FractionalOrder, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 0.5) {
        return Err(Error::InvalidArgument("consistency defect needs 0 < x <= 0.5"));
    }
    let weights = method.weights(beta, defect_truncation(x))?;
    Ok(defect_from_weights(&weights, beta, x))
}

fn defect_from_weights(w: &MethodWeights, beta: FractionalOrder, x: f64) -> f64 {
    let r = libm::exp(-x);
    let a = w.a.eval(r);
    let q = w.q.eval(r);
    a / q / libm::pow(x, beta.value()) - 1.0
}

/// Sample points `2^-4, ..., 2^-10` used by [`estimate_order`].
pub const ORDER_SAMPLES: [f64; 7] = [
    1.0 / 16.0,
    1.0 / 32.0,
    1.0 / 64.0,
    1.0 / 128.0,
    1.0 / 256.0,
    1.0 / 512.0,
    1.0 / 1024.0,
];

const DEFECT_RESOLUTION: f64 = 1e-13;

/// Numerical consistency order: slope of `log|defect(x)|` versus `log x`
/// over [`ORDER_SAMPLES`].
pub fn estimate_order(method: Method, beta: FractionalOrder) -> Result<OrderEstimate> {
    let smallest = ORDER_SAMPLES[ORDER_SAMPLES.len() - 1];
    let weights = method.weights(beta, defect_truncation(smallest))?;

    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &x in &ORDER_SAMPLES {
        let d = defect_from_weights(&weights, beta, x).abs();
        if d < DEFECT_RESOLUTION {
            continue;
        }
        let (lx, ly) = (libm::log(x), libm::log(d));
        n += 1.0;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    if n < 2.0 {
        return Ok(OrderEstimate::BelowResolution);
    }
    Ok(OrderEstimate::Slope((n * sxy - sx * sy) / (n * sxx - sx * sx)))
}
