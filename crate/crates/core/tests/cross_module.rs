use flmm_core::methods::{method_weights, nflmm2_weights, Method};
use flmm_core::series::{cauchy_product, grunwald_weights, series_reciprocal};
use flmm_core::solver::{
    solve, solve_linear, solve_linear_complex, ComplexLinearProblem, Grid, NewtonConfig, ProblemDef,
};
use flmm_core::stability::{
    boundary_value, compare_at_minus_one, dynamic_membership, unstable_membership, Membership,
};
use flmm_core::{Complex64, Error, FractionalOrder};
use proptest::prelude::*;

fn order(b: f64) -> FractionalOrder {
    FractionalOrder::new(b).unwrap()
}

#[test]
fn nflmm2_tends_to_fbdf2_as_beta_tends_to_one() {
    let mut last = f64::INFINITY;
    for b in [0.9, 0.99, 0.999, 0.9999] {
        let n = nflmm2_weights(order(b), 32);
        let f = method_weights(Method::Fbdf2, order(b), 32).unwrap().a;
        let gap = (0..32).map(|k| (n[k] - f[k]).abs()).fold(0.0, f64::max);
        assert!(gap < last, "beta {b}: {gap}");
        last = gap;
    }
    assert!(last < 1e-3);
}

#[test]
fn fam1_f_side_tends_to_trapezoid() {
    let q = Method::Fam1.f_poly(order(0.9999));
    assert!((q[0] - 0.5).abs() < 1e-4 && (q[1] - 0.5).abs() < 1e-4);
    let ft2 = method_weights(Method::Ft2, FractionalOrder::ONE, 16).unwrap();
    let fam1 = method_weights(Method::Fam1, FractionalOrder::ONE, 16).unwrap();
    // at β = 1 both are the trapezoidal rule once the y-side is normalized
    let d_ft2 = cauchy_product(&ft2.a, &series_reciprocal(&ft2.q, 16).unwrap(), 16);
    let d_fam1 = cauchy_product(&fam1.a, &series_reciprocal(&fam1.q, 16).unwrap(), 16);
    for k in 0..16 {
        assert!((d_ft2[k] - d_fam1[k]).abs() < 1e-12, "{k}");
    }
}

#[test]
fn real_axis_membership_switches_at_minus_one_value() {
    // on the positive real axis the unstable region ends at δ(-1)
    let beta = order(0.5);
    let edge = compare_at_minus_one(beta).nflmm2;
    let inside = Complex64::new(edge - 0.05, 0.0);
    let outside = Complex64::new(edge + 0.05, 0.0);
    assert_eq!(unstable_membership(Method::Nflmm2, beta, inside).unwrap(), Membership::Unstable);
    assert_eq!(unstable_membership(Method::Nflmm2, beta, outside).unwrap(), Membership::Stable);
    assert_eq!(dynamic_membership(Method::Nflmm2, beta, inside, 2000).unwrap(), Membership::Unstable);
    assert_eq!(dynamic_membership(Method::Nflmm2, beta, outside, 2000).unwrap(), Membership::Stable);
}

#[test]
fn singular_update_sits_on_the_boundary_image_of_zero() {
    // A0 - ζ Q0 = 0 means ζ = δ(0); for NFLMM2 at β = 1 that is 3/2
    let p = ProblemDef::linear(FractionalOrder::ONE, 1.0, 1.5, |_| 0.0);
    let err = solve_linear(&p, Method::Nflmm2, &Grid::with_step(0.0, 1.0, 4).unwrap()).unwrap_err();
    assert_eq!(err, Error::SingularUpdate { re: 1.5, im: 0.0 });
    assert!(err.is_numerical());
    let d = boundary_value(Method::Nflmm2, FractionalOrder::ONE, std::f64::consts::PI);
    assert!(1.5 < d.re);
}

#[test]
fn gl1_solution_is_first_order() {
    let beta = order(0.6);
    let c = 2.0 / libm::tgamma(3.0 - 0.6);
    let p = ProblemDef::linear(beta, 0.0, 0.0, move |t| c * t.powf(1.4));
    let err = |m: usize| {
        let tr = solve(&p, Method::Gl1, &Grid::new(0.0, 1.0, m).unwrap(), &NewtonConfig::default()).unwrap();
        tr.max_error(|t| t * t)
    };
    let eoc = (err(256) / err(512)).log2();
    assert!((eoc - 1.0).abs() < 0.1, "{eoc}");
}

proptest! {
    #[test]
    fn weights_share_the_grunwald_factor(b in 0.05f64..=1.0, n in 1usize..120) {
        // coefficients 0..=n, all finite
        let beta = order(b);
        let g = grunwald_weights(beta, n);
        let w = nflmm2_weights(beta, n);
        let p0 = 1.0 + b / 2.0;
        prop_assert!((w[0] - p0 * g[0]).abs() < 1e-15);
        for m in [Method::Gl1, Method::Nflmm2, Method::Fbdf2, Method::Fam1, Method::Ft2] {
            let a = method_weights(m, beta, n).unwrap().a;
            prop_assert_eq!(a.len(), n + 1);
            prop_assert!(a.as_slice().iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn complex_solver_agrees_with_real_solver(
        b in 0.1f64..=1.0,
        lambda in -20.0f64..0.0,
        h in 0.01f64..2.0,
        steps in 1usize..80,
    ) {
        let beta = order(b);
        let grid = Grid::with_step(0.0, h, steps).unwrap();
        let real = solve_linear(&ProblemDef::linear(beta, 1.0, lambda, |_| 0.0), Method::Nflmm2, &grid).unwrap();
        let cplx = solve_linear_complex(
            &ComplexLinearProblem::test_equation(beta, Complex64::new(lambda, 0.0), Complex64::new(1.0, 0.0)),
            Method::Nflmm2,
            &grid,
        )
        .unwrap();
        for (r, c) in real.y.iter().zip(&cplx.y) {
            prop_assert!((r - c.re).abs() <= 1e-14 * (1.0 + r.abs()));
            prop_assert_eq!(c.im, 0.0);
        }
    }

    #[test]
    fn negative_lambda_never_grows(b in 0.1f64..=1.0, lambda in -1e4f64..-1e-3, h in 0.01f64..10.0) {
        let p = ProblemDef::linear(order(b), 1.0, lambda, |_| 0.0);
        let tr = solve_linear(&p, Method::Nflmm2, &Grid::with_step(0.0, h, 200).unwrap()).unwrap();
        prop_assert!(tr.y.iter().all(|y| y.abs() <= 1.0 + 1e-12));
    }
}
