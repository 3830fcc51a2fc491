//! Truncated power series with real coefficients.
//!
//! Every FLMM weight sequence in this crate is the coefficient list of some
//! generating function, so the operations here are the building blocks for
//! [`crate::methods`]. Truncation length is always chosen by the caller.
//! Convolutions are direct `O(n²)` sums with a fixed summation order, which
//! keeps results bitwise reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use crate::{Error, FractionalOrder, Result};

/// Coefficients `c_0..c_N` of a truncated power series; index `k` holds the
/// coefficient of `ξ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries {
    coeffs: Vec<f64>,
}

impl CoeffSeries {
    /// Checked constructor: the series must be non-empty with finite entries.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient { index, value });
        }
        Ok(CoeffSeries { coeffs })
    }

    /// The constant series `1`.
    pub fn one() -> Self {
        CoeffSeries { coeffs: vec![1.0] }
    }

    /// `[1, 0, ..., 0]` with `n + 1` entries.
    pub fn unit(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = 1.0;
        CoeffSeries { coeffs }
    }

    // Internal constructor for values produced by our own recurrences. Non-finite
    // values can only appear there through overflow of absurd inputs, which the
    // public API rejects further up.
    pub(crate) fn from_raw(coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        CoeffSeries { coeffs }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `ξ^k`, zero past the stored length.
    #[inline]
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= factor);
        self
    }

    /// Sum of all stored coefficients, i.e. the truncated series at `ξ = 1`.
    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Horner evaluation of the truncated series at a real point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Largest absolute deviation from the unit series `[1, 0, 0, ...]`.
    pub fn unit_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k == 0 { (c - 1.0).abs() } else { c.abs() })
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CoeffSeries {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.coeffs[k]
    }
}

impl AsRef<[f64]> for CoeffSeries {
    fn as_ref(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Grünwald weights `g_0..g_n`, the coefficients of `(1 - z)^β`.
///
/// Uses the two-term recurrence `g_k = (1 - (β + 1)/k) g_{k-1}`, which stays
/// finite for any `k` where the Γ-ratio form would overflow.
pub fn grunwald_weights(beta: FractionalOrder, n: usize) -> CoeffSeries {
    let b = beta.value();
    let mut g = Vec::with_capacity(n + 1);
    g.push(1.0);
    for k in 1..=n {
        let prev = g[k - 1];
        // (1 - (β+1)/k) written as (k - 1 - β)/k so that g_1 = -β exactly
        g.push(((k as f64 - 1.0) - b) / k as f64 * prev);
    }
    CoeffSeries::from_raw(g)
}

/// Coefficients of `(1 + ξ)^{-β}`: `c_0 = 1`, `c_k = -c_{k-1} (β + k - 1)/k`.
pub fn binom_neg_series(beta: FractionalOrder, n: usize) -> CoeffSeries {
    let b = beta.value();
    let mut c = Vec::with_capacity(n + 1);
    c.push(1.0);
    for k in 1..=n {
        let prev = c[k - 1];
        c.push(-prev * (b + k as f64 - 1.0) / k as f64);
    }
    CoeffSeries::from_raw(c)
}

/// Truncated product `c_k = Σ_{j=0..k} a_j b_{k-j}` for `k = 0..n`; missing
/// coefficients count as zero.
///
/// Terms `j` and `k - j` are added pairwise before accumulation, so swapping
/// the operands gives a bitwise-identical result.
pub fn cauchy_product(a: &CoeffSeries, b: &CoeffSeries, n: usize) -> CoeffSeries {
    let (a, b) = (a.as_slice(), b.as_slice());
    let term = |j: usize, k: usize| -> f64 {
        match (a.get(j), b.get(k - j)) {
            (Some(x), Some(y)) => x * y,
            _ => 0.0,
        }
    };
    let mut c = Vec::with_capacity(n + 1);
    for k in 0..=n {
        // only j in [lo, hi] can contribute from either side
        let lo = k.saturating_sub((a.len() - 1).max(b.len() - 1));
        let mut acc = 0.0;
        let mut j = lo;
        while 2 * j < k {
            let i = k - j;
            let pair = term(j, k) + term(i, k);
            acc += pair;
            j += 1;
        }
        if 2 * j == k {
            acc += term(j, k);
        }
        c.push(acc);
    }
    CoeffSeries::from_raw(c)
}

/// `u(ξ)^exponent` truncated to `n + 1` coefficients by J.C.P. Miller's
/// recurrence
///
/// ```text
/// f_0 = u_0^p,   f_m = 1/(m u_0) Σ_{k=1..m} (k (p + 1) - m) u_k f_{m-k}.
/// ```
///
/// The exponent is a plain real so that negative powers (inverses) are
/// available too. Requires `u_0 > 0`; the principal branch is used.
pub fn miller_power(u: &CoeffSeries, exponent: f64, n: usize) -> Result<CoeffSeries> {
    let u0 = u[0];
    if u0 <= 0.0 || u0.is_nan() {
        return Err(Error::NonPositiveLeading(u0));
    }
    if !exponent.is_finite() {
        return Err(Error::InvalidArgument("exponent must be finite"));
    }
    let us = u.as_slice();
    let mut f = Vec::with_capacity(n + 1);
    f.push(libm::pow(u0, exponent));
    for m in 1..=n {
        let top = m.min(us.len() - 1);
        let mut acc = 0.0;
        for k in 1..=top {
            acc += ((k as f64) * (exponent + 1.0) - m as f64) * us[k] * f[m - k];
        }
        f.push(acc / (m as f64 * u0));
    }
    Ok(CoeffSeries::from_raw(f))
}

/// Series of `1/q(ξ)` truncated to `n + 1` coefficients.
pub fn series_reciprocal(q: &CoeffSeries, n: usize) -> Result<CoeffSeries> {
    let q0 = q[0];
    if q0 == 0.0 {
        return Err(Error::ZeroConstantTerm);
    }
    let qs = q.as_slice();
    let mut r = Vec::with_capacity(n + 1);
    r.push(1.0 / q0);
    for m in 1..=n {
        let top = m.min(qs.len() - 1);
        let mut acc = 0.0;
        for k in 1..=top {
            acc += qs[k] * r[m - k];
        }
        r.push(-acc / q0);
    }
    Ok(CoeffSeries::from_raw(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order(b: f64) -> FractionalOrder {
        FractionalOrder::new(b).unwrap()
    }

    fn series(c: &[f64]) -> CoeffSeries {
        CoeffSeries::new(c.to_vec()).unwrap()
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (k, (g, w)) in got.iter().zip(want).enumerate() {
            assert!((g - w).abs() <= tol, "index {k}: {g} vs {w}");
        }
    }

    // (-1)^k Γ(β+1) / (Γ(β-k+1) k!)
    fn gamma_ratio_oracle(b: f64, k: usize) -> f64 {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let denom = libm::tgamma(b - k as f64 + 1.0) * libm::tgamma(k as f64 + 1.0);
        if !denom.is_finite() {
            return 0.0;
        }
        sign * libm::tgamma(b + 1.0) / denom
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(CoeffSeries::new(vec![]), Err(Error::EmptySeries));
        assert!(matches!(
            CoeffSeries::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteCoefficient { index: 1, .. })
        ));
    }

    #[test]
    fn grunwald_examples() {
        assert_eq!(grunwald_weights(order(1.0), 3).as_slice(), &[1.0, -1.0, 0.0, 0.0]);
        assert_close(
            grunwald_weights(order(0.5), 3).as_slice(),
            &[1.0, -0.5, -0.125, -0.0625],
            1e-16,
        );
        assert_eq!(grunwald_weights(order(0.4), 1).as_slice(), &[1.0, -0.4]);
        assert_eq!(grunwald_weights(order(0.7), 0).as_slice(), &[1.0]);
    }

    #[test]
    fn grunwald_matches_gamma_ratio_oracle() {
        for i in 1..=10 {
            let b = i as f64 / 10.0;
            let g = grunwald_weights(order(b), 64);
            for k in 0..=64 {
                let want = gamma_ratio_oracle(b, k);
                let got = g[k];
                if want == 0.0 {
                    assert!(got.abs() < 1e-300, "beta {b} k {k}: {got}");
                } else {
                    let rel = ((got - want) / want).abs();
                    assert!(rel < 1e-12, "beta {b} k {k}: {got} vs {want} rel {rel}");
                }
            }
        }
    }

    #[test]
    fn grunwald_weights_negative_with_decreasing_positive_partial_sums() {
        for b in [0.1, 0.3, 0.5, 0.9, 0.99] {
            let g = grunwald_weights(order(b), 2000);
            let mut partial = g[0];
            for k in 1..g.len() {
                assert!(g[k] < 0.0);
                let next = partial + g[k];
                assert!(next > 0.0 && next < partial, "beta {b} k {k}");
                partial = next;
            }
        }
    }

    #[test]
    fn binom_neg_examples() {
        assert_eq!(binom_neg_series(order(1.0), 3).as_slice(), &[1.0, -1.0, 1.0, -1.0]);
        // generalized binomial C(-1/2, k): 1, -1/2, 3/8
        assert_close(binom_neg_series(order(0.5), 2).as_slice(), &[1.0, -0.5, 0.375], 1e-16);
        assert_eq!(binom_neg_series(order(0.3), 0).as_slice(), &[1.0]);
    }

    #[test]
    fn cauchy_product_examples() {
        let c = cauchy_product(&series(&[1.0, -1.0]), &series(&[1.0, 1.0]), 2);
        assert_eq!(c.as_slice(), &[1.0, 0.0, -1.0]);

        let x = series(&[0.3, -1.7, 2.5, 4.0]);
        assert_eq!(cauchy_product(&CoeffSeries::one(), &x, 3), x);
    }

    #[test]
    fn grunwald_times_binom_neg_matches_miller_on_rational_series() {
        // ((1-ξ)/(1+ξ))^{1/2}; the rational base (1-ξ)/(1+ξ) = 1 - 2ξ + 2ξ² - ...
        let b = order(0.5);
        let n = 4;
        let direct = cauchy_product(&grunwald_weights(b, n), &binom_neg_series(b, n), n);
        let mut base = vec![1.0];
        base.extend((1..=n).map(|k| if k % 2 == 1 { -2.0 } else { 2.0 }));
        let oracle = miller_power(&series(&base), 0.5, n).unwrap();
        assert_close(direct.as_slice(), oracle.as_slice(), 1e-15);
    }

    #[test]
    fn miller_examples() {
        let m = miller_power(&series(&[1.0, -1.0]), 0.5, 3).unwrap();
        assert_close(m.as_slice(), grunwald_weights(order(0.5), 3).as_slice(), 1e-16);

        let m = miller_power(&series(&[1.5, -2.0, 0.5]), 1.0, 2).unwrap();
        assert_close(m.as_slice(), &[1.5, -2.0, 0.5], 1e-15);

        let m = miller_power(&series(&[4.0]), 0.5, 1).unwrap();
        assert_eq!(m.as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn miller_rejects_nonpositive_leading_coefficient() {
        assert_eq!(
            miller_power(&series(&[0.0, 1.0]), 0.5, 3),
            Err(Error::NonPositiveLeading(0.0))
        );
        assert!(miller_power(&series(&[-1.0]), 0.5, 3).is_err());
    }

    #[test]
    fn miller_bdf2_power_matches_factored_product() {
        // 3/2 - 2ξ + ξ²/2 = 3/2 (1 - ξ)(1 - ξ/3)
        let b = 0.3;
        let n = 3000;
        let m = miller_power(&series(&[1.5, -2.0, 0.5]), b, n).unwrap();
        let third = miller_power(&series(&[1.0, -1.0 / 3.0]), b, n).unwrap();
        let oracle = cauchy_product(&grunwald_weights(order(b), n), &third, n).scaled(libm::pow(1.5, b));
        let worst = m
            .as_slice()
            .iter()
            .zip(oracle.as_slice())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-13, "{worst}");
    }

    #[test]
    fn reciprocal_examples() {
        let r = series_reciprocal(&series(&[1.0, 1.0]), 3).unwrap();
        assert_eq!(r.as_slice(), &[1.0, -1.0, 1.0, -1.0]);
        let r = series_reciprocal(&series(&[2.0]), 2).unwrap();
        assert_eq!(r.as_slice(), &[0.5, 0.0, 0.0]);

        let q = series(&[0.75, 0.25]);
        let r = series_reciprocal(&q, 2).unwrap();
        assert_close(r.as_slice(), &[4.0 / 3.0, -4.0 / 9.0, 4.0 / 27.0], 1e-15);
        assert!(cauchy_product(&q, &r, 2).unit_defect() < 1e-15);
    }

    #[test]
    fn reciprocal_rejects_zero_constant_term() {
        assert_eq!(series_reciprocal(&series(&[0.0, 1.0]), 2), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn eval_and_sum() {
        let s = series(&[1.0, 2.0, 3.0]);
        assert_eq!(s.eval(2.0), 17.0);
        assert_eq!(s.sum(), 6.0);
        assert_eq!(s.coeff(7), 0.0);
    }

    fn poly_strategy() -> impl Strategy<Value = Vec<f64>> {
        (0.5f64..3.0, proptest::collection::vec(-1.0f64..1.0, 0..4)).prop_map(|(u0, rest)| {
            let mut v = vec![u0];
            v.extend(rest);
            v
        })
    }

    proptest! {
        #[test]
        fn cauchy_product_is_bitwise_commutative(
            a in proptest::collection::vec(-10.0f64..10.0, 1..40),
            b in proptest::collection::vec(-10.0f64..10.0, 1..40),
            n in 0usize..90,
        ) {
            let (a, b) = (series(&a), series(&b));
            let ab = cauchy_product(&a, &b, n);
            let ba = cauchy_product(&b, &a, n);
            for (x, y) in ab.as_slice().iter().zip(ba.as_slice()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }

        #[test]
        fn miller_power_times_inverse_power_is_unit(
            u in poly_strategy(),
            beta in 0.05f64..1.0,
        ) {
            // keep u away from zeros inside the disk so the inverse series stays tame
            let u0 = u[0];
            let rest: f64 = u[1..].iter().map(|c| c.abs()).sum();
            prop_assume!(rest < 0.8 * u0);
            let u = series(&u);
            let n = 48;
            let f = miller_power(&u, beta, n).unwrap();
            let g = miller_power(&u, -beta, n).unwrap();
            prop_assert!(cauchy_product(&f, &g, n).unit_defect() < 1e-10);
        }

        #[test]
        fn reciprocal_inverts(
            q in proptest::collection::vec(-1.0f64..1.0, 0..5),
            q0 in 1.0f64..4.0,
        ) {
            let rest: f64 = q.iter().map(|c| c.abs()).sum();
            prop_assume!(rest < 0.8 * q0);
            let mut c = vec![q0];
            c.extend(q);
            let q = series(&c);
            let r = series_reciprocal(&q, 64).unwrap();
            prop_assert!(cauchy_product(&q, &r, 64).unit_defect() < 1e-12);
        }
    }
}
