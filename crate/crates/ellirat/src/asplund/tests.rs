use nalgebra::dvector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::bodies::{cube, regular_simplex};

fn exp_abs_1d() -> LogConcaveFn {
    LogConcaveFn::gauge_power(1.0, cube(1), 1.0, Vector::zeros(1)).unwrap()
}

#[test]
fn closed_form_matches_grid_search_oracle() {
    // f⋆f_ε(z) = sup over decompositions z = x + y of f(x)·f(y/ε)^ε
    let f = LogConcaveFn::gauge_power(1.3, regular_simplex(2), 1.0, dvector![0.1, 0.0]).unwrap();
    let eps = 0.25;
    let product = self_product(&f, eps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let z = dvector![rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)];
        // coarse grid over y, refined once around the best cell
        let mut best = 0.0f64;
        let mut center = z.clone() * (eps / (1.0 + eps));
        let mut width = 2.0;
        for _ in 0..3 {
            let steps = 41;
            let mut best_y = center.clone();
            for i in 0..steps {
                for j in 0..steps {
                    let y = dvector![
                        center[0] - width + 2.0 * width * i as f64 / (steps - 1) as f64,
                        center[1] - width + 2.0 * width * j as f64 / (steps - 1) as f64
                    ];
                    let val = f.evaluate(&(&z - &y)) * f.evaluate(&(&y / eps)).powf(eps);
                    if val > best {
                        best = val;
                        best_y = y;
                    }
                }
            }
            center = best_y;
            width /= 10.0;
        }
        let closed = product.evaluate(&z);
        assert!(
            (closed - best).abs() <= 1e-3 * closed.max(1e-6),
            "z = {z:?}: closed {closed} vs grid {best}"
        );
    }
}

#[test]
fn eps_to_zero_recovers_the_function() {
    let f = LogConcaveFn::truncated_gauge(2.0, cube(2), 0.5).unwrap();
    let tiny = self_product(&f, 1e-7).unwrap();
    for p in [dvector![0.0, 0.0], dvector![0.8, -0.3], dvector![2.2, 1.0]] {
        assert!((tiny.evaluate(&p) - f.evaluate(&p)).abs() < 1e-5);
    }
}

#[test]
fn indicator_dilates() {
    let f = LogConcaveFn::indicator(1.0, cube(2)).unwrap();
    let eps = 0.5;
    let product = self_product(&f, eps).unwrap();
    let level = product.level_set(1.0).unwrap();
    assert!((level.volume().unwrap() - 9.0).abs() < 1e-9);
}

#[test]
fn alpha_one_integral_is_eps_invariant() {
    // for v = gauge¹: ∫f⋆f_ε = (1+ε)ⁿ(1+ε)^{-n}∫f = ∫f
    let f = LogConcaveFn::gauge_power(1.0, regular_simplex(2), 1.0, Vector::zeros(2)).unwrap();
    let base = f.integral().unwrap();
    for eps in [0.5, 0.1, 0.01] {
        let product = self_product(&f, eps).unwrap();
        assert!(
            (product.integral().unwrap() - base).abs() < 1e-9 * base,
            "eps {eps}"
        );
    }
}

#[test]
fn self_product_derivative_for_exp_abs() {
    // n∫f + ∫f log f = 1·2 + (−2) = 0
    let f = exp_abs_1d();
    let check = self_product_derivative_check(&f, &DEFAULT_LADDER).unwrap();
    assert!((check.target - 0.0).abs() < 1e-10);
    assert!(
        check.absolute_error() < 1e-6,
        "extrapolated {}",
        check.ladder.extrapolated
    );
    assert!(check.ladder.converged);
}

#[test]
fn self_product_derivative_for_indicator_dilation_identity() {
    // quotients ((1+ε)ⁿ − 1)|K|/ε → n|K| at height one
    let f = LogConcaveFn::indicator(1.0, cube(2)).unwrap();
    let check = self_product_derivative_check(&f, &DEFAULT_LADDER).unwrap();
    assert!((check.target - 8.0).abs() < 1e-10);
    for (eps, q) in check.ladder.eps_values.iter().zip(&check.ladder.quotients) {
        let expect = ((1.0 + eps).powi(2) - 1.0) * 4.0 / eps;
        assert!((q - expect).abs() < 1e-9, "eps {eps}");
    }
    assert!(check.relative_error() < 1e-3);
}

#[test]
fn self_product_derivative_with_nonunit_height() {
    // target = n·h|K| + h log h·|K|
    let h = 2.7;
    let f = LogConcaveFn::indicator(h, cube(2)).unwrap();
    let check = self_product_derivative_check(&f, &DEFAULT_LADDER).unwrap();
    let expect = 2.0 * h * 4.0 + h * h.ln() * 4.0;
    assert!((check.target - expect).abs() < 1e-9);
    assert!(
        check.relative_error() < 1e-3,
        "err {}",
        check.relative_error()
    );
}

#[test]
fn self_product_derivative_for_truncated_gauge() {
    let f = LogConcaveFn::truncated_gauge(1.0, cube(2), 0.5).unwrap();
    let check = self_product_derivative_check(&f, &DEFAULT_LADDER).unwrap();
    assert!(
        check.relative_error() < 1e-3,
        "extrapolated {} target {}",
        check.ladder.extrapolated,
        check.target
    );
    assert!(check.ladder.converged);
}

#[test]
fn quotients_are_monotone_for_convex_exponents() {
    // ε ↦ ∫f⋆f_ε is convex, so the quotients decrease as ε decreases
    for f in [
        LogConcaveFn::indicator(1.0, cube(2)).unwrap(),
        LogConcaveFn::truncated_gauge(1.0, cube(2), 0.5).unwrap(),
    ] {
        let check = self_product_derivative_check(&f, &DEFAULT_LADDER).unwrap();
        for w in check.ladder.quotients.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "quotients not monotone: {w:?}");
        }
    }
}

#[test]
fn ball_derivative_exp_abs_at_smooth_point() {
    // z = 1, a = 1: limit is |f'(1)| = e^{-1}
    let f = exp_abs_1d();
    let check = ball_product_derivative(&f, &dvector![1.0], 1.0, &DEFAULT_LADDER).unwrap();
    assert!((check.target - (-1.0f64).exp()).abs() < 1e-12);
    assert!(
        check.absolute_error() < 1e-3,
        "err {}",
        check.absolute_error()
    );
}

#[test]
fn ball_derivative_on_flat_top() {
    let f = LogConcaveFn::truncated_gauge(1.0, cube(2), 0.5).unwrap();
    let z = dvector![0.2, -0.1];
    // a = 1: gradient term only, which vanishes on the plateau
    let check = ball_product_derivative(&f, &z, 1.0, &DEFAULT_LADDER).unwrap();
    assert!(check.target.abs() < 1e-12);
    assert!(check.absolute_error() < 1e-9);
    // a = e: the limit is f(z)·log a = height
    let check = ball_product_derivative(&f, &z, std::f64::consts::E, &DEFAULT_LADDER).unwrap();
    assert!((check.target - 1.0).abs() < 1e-12);
    assert!(check.absolute_error() < 1e-3);
}

#[test]
fn kink_points_are_rejected() {
    // the diagonal of the cube is a kink of the max-gauge
    let f = LogConcaveFn::gauge_power(1.0, cube(2), 1.0, Vector::zeros(2)).unwrap();
    assert!(matches!(
        ball_product_derivative(&f, &dvector![0.7, 0.7], 1.0, &DEFAULT_LADDER),
        Err(Error::KinkPoint)
    ));
    // the center is a kink for α = 1 but smooth for α > 1
    assert!(matches!(
        ball_product_derivative(&f, &dvector![0.0, 0.0], 1.0, &DEFAULT_LADDER),
        Err(Error::KinkPoint)
    ));
    let g = LogConcaveFn::gauge_power(1.0, cube(2), 2.0, Vector::zeros(2)).unwrap();
    assert!(ball_product_derivative(&g, &dvector![0.0, 0.0], 1.0, &DEFAULT_LADDER).is_ok());
}

#[test]
fn piecewise_linear_ball_derivative() {
    let pieces = vec![(dvector![1.0, 0.0], 0.0), (dvector![-0.5, 0.5], -0.3)];
    let f = LogConcaveFn::piecewise_linear(1.0, pieces, cube(2).scale(4.0)).unwrap();
    // pick a point where the first piece clearly dominates
    let z = dvector![1.5, 0.0];
    let check = ball_product_derivative(&f, &z, 1.0, &DEFAULT_LADDER).unwrap();
    // |∇f| = f(z)·‖a*‖ with ‖a*‖ = 1
    let expect = f.evaluate(&z);
    assert!((check.target - expect).abs() < 1e-12);
    assert!(check.absolute_error() < 1e-3 * expect.max(1e-6));
}

#[test]
fn invalid_ladders_are_rejected() {
    let f = exp_abs_1d();
    assert!(self_product_derivative_check(&f, &[0.1]).is_err());
    assert!(self_product_derivative_check(&f, &[0.1, 0.2]).is_err());
    assert!(self_product(&f, 0.0).is_err());
}
