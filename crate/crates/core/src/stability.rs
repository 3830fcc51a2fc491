//! Linear stability of FLMMs.
//!
//! For the test equation `D^β y = λ y` a method is stable at `ζ = λ h^β` iff
//! `ζ` lies outside the image `S^c = { δ(ξ) : |ξ| ≤ 1 }`. Its boundary is the
//! locus `δ(e^{iθ})`, `θ ∈ [0, 2π]`, computed here in polar form:
//! `1 - e^{iθ} = b e^{iφ}` with `b = 2 sin(θ/2)` and `φ = θ/2 - π/2`.
//!
//! Membership of a point is decided by the winding number of the sampled
//! boundary and can be cross-checked against a direct simulation of the test
//! equation ([`dynamic_membership`]).

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::methods::{cpow, Method, Nflmm2Params};
use crate::solver::{solve_linear_complex, ComplexLinearProblem, Grid};
use crate::{Error, FractionalOrder, Result};

/// Half-width of the θ-window around a pole at `ξ = -1` that is left out of
/// boundary curves.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Points closer than this to the sampled boundary get no verdict.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Tolerance on `|arg δ| ≤ βπ/2` in [`a_stability_check`].
pub const ANGLE_TOL: f64 = 1e-9;

/// Boundary samples used by [`unstable_membership`].
pub const MEMBERSHIP_SAMPLES: usize = 4096;

/// Steps used by [`dynamic_membership`].
pub const DYNAMIC_STEPS: usize = 2000;

/// `|y_N| > GROWTH_FACTOR |y_0|` counts as growth in [`dynamic_membership`].
pub const GROWTH_FACTOR: f64 = 1e2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub theta: f64,
    /// `δ(e^{iθ})`; infinite inside a pole window.
    pub value: Complex64,
}

impl BoundarySample {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Sampled stability boundary `θ ↦ δ(e^{iθ})` on `θ_k = 2πk/n`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub method: Method,
    pub beta: FractionalOrder,
    pub samples: Vec<BoundarySample>,
    /// Half-width of the excluded window around `θ = π`, if any.
    pub pole_window: Option<f64>,
}

impl BoundaryCurve {
    pub fn finite_samples(&self) -> impl Iterator<Item = &BoundarySample> {
        self.samples.iter().filter(|s| s.is_finite())
    }

    pub fn excluded_count(&self) -> usize {
        self.samples.iter().filter(|s| !s.is_finite()).count()
    }
}

/// `δ(e^{iθ})` on the unit circle. Values for `θ > π` are taken as the
/// conjugate of the mirrored angle (δ has real coefficients).
pub fn boundary_value(method: Method, beta: FractionalOrder, theta: f64) -> Complex64 {
    let v = if theta > PI {
        upper_boundary_value(method, beta, 2.0 * PI - theta).conj()
    } else {
        upper_boundary_value(method, beta, theta)
    };
    // adding +0 turns -0 into +0 and leaves everything else alone
    Complex64::new(v.re + 0.0, v.im + 0.0)
}

fn upper_boundary_value(method: Method, beta: FractionalOrder, theta: f64) -> Complex64 {
    let b = beta.value();
    let half = theta / 2.0;
    let xi = Complex64::new(libm::cos(theta), libm::sin(theta));
    // (1 - ξ)^β = b^β e^{iβφ}
    let radius = libm::pow(2.0 * libm::sin(half), b);
    let phi = half - FRAC_PI_2;
    let omega = Complex64::from_polar(radius, b * phi);
    match method {
        Method::Gl1 => omega,
        Method::Nflmm2 => {
            let p = Nflmm2Params::new(beta);
            omega * (xi * p.p1 + p.p0)
        }
        Method::Fbdf2 => {
            // 3/2 - 2ξ + ξ²/2 = 3/2 (1 - ξ)(1 - ξ/3)
            omega * cpow(Complex64::new(1.0, 0.0) - xi / 3.0, b) * libm::pow(1.5, b)
        }
        Method::Fam1 => {
            let q = xi * (b / 2.0) + (1.0 - b / 2.0);
            if q.norm() == 0.0 {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                omega / q
            }
        }
        Method::Ft2 => {
            // 2 (1 - ξ)/(1 + ξ) = -2i tan(θ/2)
            if theta == PI {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                Complex64::from_polar(libm::pow(2.0 * libm::tan(half), b), -b * FRAC_PI_2)
            }
        }
    }
}

/// Samples the boundary locus on a uniform θ-grid of `n_samples` intervals.
pub fn boundary_curve(method: Method, beta: FractionalOrder, n_samples: usize) -> Result<BoundaryCurve> {
    if n_samples < 8 {
        return Err(Error::InvalidArgument("boundary curve needs at least 8 samples"));
    }
    let pole = method.has_pole_at_minus_one(beta);
    let samples = (0..=n_samples)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_samples as f64;
            let value = if pole && (theta - PI).abs() < POLE_EXCLUSION {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                boundary_value(method, beta, theta)
            };
            BoundarySample { theta, value }
        })
        .collect();
    Ok(BoundaryCurve {
        method,
        beta,
        samples,
        pole_window: pole.then_some(POLE_EXCLUSION),
    })
}

/// Sector of the analytic problem: `y(t) → 0` iff `|arg λ| > βπ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityWedge {
    pub beta: FractionalOrder,
    pub half_angle: f64,
}

impl StabilityWedge {
    pub fn new(beta: FractionalOrder) -> Self {
        StabilityWedge {
            beta,
            half_angle: beta.value() * FRAC_PI_2,
        }
    }

    /// Whether `z` lies in the analytically stable sector `|arg z| > βπ/2`.
    pub fn is_stable(&self, z: Complex64) -> bool {
        z.arg().abs() > self.half_angle
    }
}

/// `g(θ)` and `h(θ)` with `δ(e^{iθ}) = b^β (g + i h)` for NFLMM2:
///
/// ```text
/// g = (1 + β/2) cos βφ + (β/2) cos (β+2)φ
/// h = sin βφ + β cos φ sin (β+1)φ
/// ```
pub fn nflmm2_boundary_components(beta: FractionalOrder, theta: f64) -> (f64, f64) {
    let b = beta.value();
    let phi = theta / 2.0 - FRAC_PI_2;
    let g = (1.0 + b / 2.0) * libm::cos(b * phi) + (b / 2.0) * libm::cos((b + 2.0) * phi);
    let h = libm::sin(b * phi) + b * libm::cos(phi) * libm::sin((b + 1.0) * phi);
    (g, h)
}

/// Result of [`real_part_sign_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCheckReport {
    pub passed: bool,
    pub samples: usize,
    pub min_re: f64,
    pub min_re_theta: f64,
    pub max_im: f64,
    pub max_im_theta: f64,
}

/// Checks `Re δ > 0` and `Im δ < 0` for NFLMM2 on `θ_k = πk/n`,
/// `k = 1..n-1`, i.e. on the open upper half of the circle.
pub fn real_part_sign_check(beta: FractionalOrder, n_samples: usize) -> SignCheckReport {
    let mut report = SignCheckReport {
        passed: true,
        samples: 0,
        min_re: f64::INFINITY,
        min_re_theta: f64::NAN,
        max_im: f64::NEG_INFINITY,
        max_im_theta: f64::NAN,
    };
    for k in 1..n_samples {
        let theta = PI * k as f64 / n_samples as f64;
        let d = boundary_value(Method::Nflmm2, beta, theta);
        report.samples += 1;
        if d.re < report.min_re {
            report.min_re = d.re;
            report.min_re_theta = theta;
        }
        if d.im > report.max_im {
            report.max_im = d.im;
            report.max_im_theta = theta;
        }
        if !(d.re > 0.0 && d.im < 0.0) {
            report.passed = false;
        }
    }
    report
}

/// Tangent `h(θ)/g(θ)` of the NFLMM2 boundary over `θ ∈ (0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentProfile {
    pub beta: FractionalOrder,
    /// Value at `θ = 0`, `-tan(βπ/2)`; `-∞` when `β = 1`.
    pub limit_at_zero: f64,
    pub unbounded_below: bool,
    /// `(θ_k, h/g)` for `θ_k = πk/n`, `k = 1..=n`.
    pub samples: Vec<(f64, f64)>,
}

impl TangentProfile {
    pub fn is_strictly_increasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 > w[0].1)
    }
}

pub fn tangent_profile(beta: FractionalOrder, n_samples: usize) -> TangentProfile {
    let (g0, h0) = nflmm2_boundary_components(beta, 0.0);
    // g(0) = cos(βπ/2) vanishes at β = 1 up to rounding
    let unbounded_below = beta.value() == 1.0 || g0 <= 0.0;
    let limit_at_zero = if unbounded_below { f64::NEG_INFINITY } else { h0 / g0 };
    let samples = (1..=n_samples)
        .map(|k| {
            let theta = PI * k as f64 / n_samples as f64;
            let (g, h) = nflmm2_boundary_components(beta, theta);
            (theta, h / g)
        })
        .collect();
    TangentProfile {
        beta,
        limit_at_zero,
        unbounded_below,
        samples,
    }
}

/// Result of [`a_stability_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AStabilityReport {
    pub method: Method,
    pub beta: FractionalOrder,
    pub passed: bool,
    pub half_angle: f64,
    /// Largest `|arg δ(e^{iθ})|` over finite, nonzero samples.
    pub max_abs_arg: f64,
    /// `βπ/2 - max_abs_arg`; negative margins beyond [`ANGLE_TOL`] fail.
    pub margin: f64,
    pub checked: usize,
    pub excluded: usize,
}

/// Checks that the whole boundary (hence the bounded unstable region) stays in
/// the wedge `|arg ζ| ≤ βπ/2`, i.e. that the stable sector of the exact
/// problem is inside the numerical stability region.
pub fn a_stability_check(method: Method, beta: FractionalOrder, n_samples: usize) -> Result<AStabilityReport> {
    let curve = boundary_curve(method, beta, n_samples)?;
    let half_angle = StabilityWedge::new(beta).half_angle;
    let mut max_abs_arg: f64 = 0.0;
    let mut checked = 0;
    for s in curve.finite_samples() {
        if s.value.norm() == 0.0 {
            continue;
        }
        checked += 1;
        max_abs_arg = max_abs_arg.max(s.value.arg().abs());
    }
    Ok(AStabilityReport {
        method,
        beta,
        passed: max_abs_arg <= half_angle + ANGLE_TOL,
        half_angle,
        max_abs_arg,
        margin: half_angle - max_abs_arg,
        checked,
        excluded: curve.excluded_count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    /// `ζ ∈ S^c`: the test equation grows.
    Unstable,
    /// `ζ ∈ S`: the test equation decays.
    Stable,
    /// Too close to the boundary (or an inconclusive simulation).
    Indeterminate,
}

impl Membership {
    pub fn as_str(self) -> &'static str {
        match self {
            Membership::Unstable => "true",
            Membership::Stable => "false",
            Membership::Indeterminate => "indeterminate",
        }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Winding number of the closed boundary around `zeta`, or `None` when `zeta`
/// is within [`BOUNDARY_BAND`] of the sampled curve.
///
/// A pole gap is closed at infinity through the positive real direction: the
/// image of the disk near a pole at `ξ = -1` runs off to `+∞`.
pub fn winding_number(curve: &BoundaryCurve, zeta: Complex64) -> Option<i64> {
    let finite: Vec<(usize, Complex64)> = curve
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_finite())
        .map(|(i, s)| (i, s.value))
        .collect();
    if finite.len() < 3 {
        return None;
    }
    let mut total = 0.0;
    for pair in finite.windows(2) {
        let ((ia, a), (ib, b)) = (pair[0], pair[1]);
        if ib == ia + 1 {
            if segment_distance(zeta, a, b) < BOUNDARY_BAND {
                return None;
            }
            total += wrap_angle((b - zeta).arg() - (a - zeta).arg());
        } else {
            // out to infinity along a, round the arc at infinity, back along b
            let (dir_a, dir_b) = (a.arg(), b.arg());
            total += wrap_angle(dir_a - (a - zeta).arg());
            total += (dir_b - dir_a).rem_euclid(2.0 * PI);
            total += wrap_angle((b - zeta).arg() - dir_b);
        }
    }
    Some(libm::round(total / (2.0 * PI)) as i64)
}

/// Winding-number membership of `zeta` in the unstable region of a sampled
/// boundary.
pub fn membership_in(curve: &BoundaryCurve, zeta: Complex64) -> Membership {
    match winding_number(curve, zeta) {
        None => Membership::Indeterminate,
        Some(0) => Membership::Stable,
        Some(_) => Membership::Unstable,
    }
}

/// Whether `zeta = λ h^β` lies in the unstable region of `method`.
pub fn unstable_membership(method: Method, beta: FractionalOrder, zeta: Complex64) -> Result<Membership> {
    let curve = boundary_curve(method, beta, MEMBERSHIP_SAMPLES)?;
    Ok(membership_in(&curve, zeta))
}

/// Classifies `zeta` by simulating `D^β y = ζ y`, `y(0) = 1` with `h = 1` for
/// `steps` steps.
///
/// Growth: overflow or `|y_N| > 100`. Decay: `|y_N| < 1` and still shrinking
/// over the second half of the run (`|y_N| < |y_{N/2}|`). Decay of the
/// continuous solution is only algebraic (`~ t^{-β}`), so an absolute decay
/// threshold cannot separate the two cases.
pub fn dynamic_membership(method: Method, beta: FractionalOrder, zeta: Complex64, steps: usize) -> Result<Membership> {
    let one = Complex64::new(1.0, 0.0);
    let problem = ComplexLinearProblem::test_equation(beta, zeta, one);
    let grid = Grid::with_step(0.0, 1.0, steps)?;
    let trace = match solve_linear_complex(&problem, method, &grid) {
        Ok(t) => t,
        Err(Error::NonFiniteSolution { .. }) => return Ok(Membership::Unstable),
        Err(Error::SingularUpdate { .. }) => return Ok(Membership::Indeterminate),
        Err(e) => return Err(e),
    };
    let end = trace.last().norm();
    let mid = trace.y[steps / 2].norm();
    Ok(if end > GROWTH_FACTOR {
        Membership::Unstable
    } else if end < 1.0 && end < mid {
        Membership::Stable
    } else {
        Membership::Indeterminate
    })
}

/// `δ(-1)` for the four second-order methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinusOneComparison {
    pub beta: FractionalOrder,
    /// `4^β`
    pub fbdf2: f64,
    /// `2^β (1 + β)`
    pub nflmm2: f64,
    /// `2^β / (1 - β)`, infinite at `β = 1`
    pub fam1: f64,
    /// always `+∞`
    pub ft2: f64,
}

impl MinusOneComparison {
    /// `δ_FBDF2(-1) < δ_NFLMM2(-1) < δ_FAM1(-1) < δ_FT2(-1)`; fails at `β = 1`
    /// where FAM1 meets FT2 at infinity.
    pub fn strictly_ordered(&self) -> bool {
        self.fbdf2 < self.nflmm2 && self.nflmm2 < self.fam1 && self.fam1 < self.ft2
    }

    pub fn as_array(&self) -> [(Method, f64); 4] {
        [
            (Method::Fbdf2, self.fbdf2),
            (Method::Nflmm2, self.nflmm2),
            (Method::Fam1, self.fam1),
            (Method::Ft2, self.ft2),
        ]
    }
}

/// Closed-form generating functions at `ξ = -1`, where each unstable region
/// meets the positive real axis.
pub fn compare_at_minus_one(beta: FractionalOrder) -> MinusOneComparison {
    let b = beta.value();
    let two_b = libm::pow(2.0, b);
    MinusOneComparison {
        beta,
        fbdf2: libm::pow(4.0, b),
        nflmm2: two_b * (1.0 + b),
        fam1: if b == 1.0 { f64::INFINITY } else { two_b / (1.0 - b) },
        ft2: f64::INFINITY,
    }
}
