use nalgebra::dvector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::bodies::{cube, polygon_from_vertices, regular_polygon};
use crate::quad;

fn square_gauge() -> LogConcaveFn {
    LogConcaveFn::gauge_power(1.0, cube(2), 1.0, Vector::zeros(2)).unwrap()
}

fn pwl_sample() -> LogConcaveFn {
    let pieces = vec![
        (dvector![0.9, 0.2], -0.1),
        (dvector![-0.7, 0.6], 0.0),
        (dvector![0.0, -1.0], -0.3),
        (dvector![-0.3, -0.4], 0.2),
    ];
    LogConcaveFn::piecewise_linear(1.0, pieces, cube(2).scale(7.0)).unwrap()
}

#[test]
fn pp_norm_of_cube_indicator() {
    // |P_{e₁⊥}[-1,1]²| = 2 for every t, so ‖e₁‖ = 2·1·1·2 = 4
    let f = LogConcaveFn::indicator(1.0, cube(2)).unwrap();
    let got = pp_norm(&f, &dvector![1.0, 0.0]).unwrap();
    assert!((got - 4.0).abs() < 1e-10, "{got}");
}

#[test]
fn pp_norm_is_positively_homogeneous() {
    let f = square_gauge();
    let x = dvector![0.7, -0.4];
    let a = pp_norm(&f, &(&x * 2.0)).unwrap();
    let b = pp_norm(&f, &x).unwrap();
    assert!((a - 2.0 * b).abs() < 1e-12 * a);
}

#[test]
fn pp_norm_gauge_power_matches_1d_integral_oracle() {
    // |P_{e₁⊥}K_t| = 2(−log t): ‖e₁‖ = 2∫₀¹2(−log t)dt = 4
    let f = square_gauge();
    let got = pp_norm(&f, &dvector![1.0, 0.0]).unwrap();
    let oracle =
        2.0 * quad::integrate(|s: f64| 2.0 * s * (-s).exp(), 0.0, 60.0, 1e-12, 1e-15).value;
    assert!((oracle - 4.0).abs() < 1e-9);
    assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
}

#[test]
fn pp_norm_triangle_inequality_sampled() {
    let f = pwl_sample();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let x = dvector![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let y = dvector![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if x.norm() < 1e-3 || y.norm() < 1e-3 || (&x + &y).norm() < 1e-3 {
            continue;
        }
        let nxy = pp_norm(&f, &(&x + &y)).unwrap();
        let nx = pp_norm(&f, &x).unwrap();
        let ny = pp_norm(&f, &y).unwrap();
        assert!(nxy <= nx + ny + 1e-9 * (nx + ny));
    }
}

#[test]
fn pp_volume_of_disc_indicator() {
    // ‖θ‖ = 2·|P B₂²| = 4 for all θ, so Π*(f) is the disc of radius 1/4
    let f = LogConcaveFn::indicator(1.0, regular_polygon(64)).unwrap();
    let (vol, err) = pp_volume(&f, 0, 0).unwrap();
    let expect = std::f64::consts::PI / 16.0;
    assert!(
        (vol - expect).abs() < 0.01 * expect,
        "vol {vol} expect {expect} err {err}"
    );
}

#[test]
fn pp_volume_of_square_indicator_is_l1_ball() {
    // ‖θ‖ = 4(|θ₁|+|θ₂|): the unit ball is the l¹ ball of radius 1/4,
    // of area 2·(1/4)² = 1/8; vertex-formula oracle for the norm itself
    let f = LogConcaveFn::indicator(1.0, cube(2)).unwrap();
    for th in [0.0f64, 0.3, 1.2, 2.0] {
        let x = dvector![th.cos(), th.sin()];
        let got = pp_norm(&f, &x).unwrap();
        let expect = 4.0 * (x[0].abs() + x[1].abs());
        assert!((got - expect).abs() < 1e-9, "theta {th}");
    }
    let (vol, _) = pp_volume(&f, 0, 0).unwrap();
    assert!((vol - 0.125).abs() < 1e-4 * 0.125, "vol {vol}");
}

#[test]
fn pp_volume_scaling_against_recompute_oracle() {
    // |Π*(f∘T⁻¹)| = |det T|^{1-n} |Π*(f)| for T = λI
    let f = square_gauge();
    let (base, _) = pp_volume(&f, 512, 0).unwrap();
    let lambda = 1.7f64;
    let map = crate::geometry::AffineMap::new(
        crate::geometry::Matrix::identity(2, 2) / lambda,
        Vector::zeros(2),
    );
    // f∘map = f∘(T⁻¹) with T = λI
    let mapped = f.precompose_affine(&map).unwrap();
    let (got, _) = pp_volume(&mapped, 512, 0).unwrap();
    let det_t = lambda * lambda;
    let expect = det_t.powi(-1) * base;
    assert!(
        (got - expect).abs() < 1e-6 * expect,
        "got {got} expect {expect}"
    );
}

#[test]
fn pp_volume_in_three_dimensions() {
    // indicator of the cube [-1,1]³: the shadow area along u is
    // 4(|u₁|+|u₂|+|u₃|), so ‖θ‖ = 8‖θ‖₁ and Π*(f) = (1/8)·B₁³ of volume
    // (4/3)(1/8)³ = 1/384
    let f = LogConcaveFn::indicator(1.0, cube(3)).unwrap();
    let got = pp_norm(&f, &dvector![0.0, 0.0, 1.0]).unwrap();
    assert!((got - 8.0).abs() < 1e-9);
    for u in [dvector![0.3, -0.5, 0.8], dvector![1.0, 1.0, 1.0]] {
        let unit = u.normalize();
        let expect = 8.0 * unit.iter().map(|x: &f64| x.abs()).sum::<f64>();
        let got = pp_norm(&f, &unit).unwrap();
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }
    let (vol, err) = pp_volume(&f, 0, 0).unwrap();
    let expect = 1.0 / 384.0;
    assert!(
        (vol - expect).abs() < 5e-3 * expect,
        "vol {vol} expect {expect} err {err}"
    );
}

#[test]
fn shadows_match_cauchy_projection_formula() {
    // |P_{u⊥}K| = (1/2)·Σ_F |⟨n_F, u⟩|·area(F), from the facet areas
    let k = crate::geometry::bodies::standard_simplex(3);
    let verts = k.enumerate_vertices().unwrap();
    let areas = k.facet_areas().unwrap();
    for u in [
        dvector![1.0, 0.0, 0.0],
        dvector![0.4, -0.7, 0.59],
        dvector![-0.2, 0.9, 0.4],
    ] {
        let unit = u.normalize();
        let direct = verts.shadow_volume(&unit).unwrap();
        let cauchy: f64 = areas
            .iter()
            .map(|&(i, a)| k.rows()[i].normal.dot(&unit).abs() * a)
            .sum::<f64>()
            / 2.0;
        assert!(
            (direct - cauchy).abs() < 1e-9 * direct.max(1e-9),
            "direct {direct} vs cauchy {cauchy}"
        );
    }
}

#[test]
fn monte_carlo_path_for_higher_dimensions() {
    let f = LogConcaveFn::indicator(1.0, cube(4)).unwrap();
    let (vol, err) = pp_volume(&f, 400, 7).unwrap();
    assert!(vol > 0.0 && err > 0.0);
    // deterministic under the same seed
    let (vol2, _) = pp_volume(&f, 400, 7).unwrap();
    assert_eq!(vol, vol2);
}

#[test]
fn grad_l1_one_dimensional_exponential() {
    // ∫ |d/dx e^{-|x|}| dx = 2
    let f = LogConcaveFn::gauge_power(1.0, cube(1), 1.0, Vector::zeros(1)).unwrap();
    let g = grad_l1(&f).unwrap();
    assert!(!g.distributional);
    assert!((g.value - 2.0).abs() < 1e-10, "{}", g.value);
}

#[test]
fn grad_l1_indicator_is_distributional_perimeter() {
    let f = LogConcaveFn::indicator(1.5, cube(2)).unwrap();
    let g = grad_l1(&f).unwrap();
    assert!(g.distributional);
    assert!((g.value - 1.5 * 8.0).abs() < 1e-9);
}

#[test]
fn grad_l1_matches_monte_carlo_finite_differences() {
    // f = e^{-‖x‖∞} on the plane: closed form h·Per(K)·Γ(2) = 8
    let f = square_gauge();
    let g = grad_l1(&f).unwrap();
    assert!((g.value - 8.0).abs() < 1e-9, "{}", g.value);

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let reach = 14.0;
    let n_samples = 200_000usize;
    let eps = 1e-5;
    let mut acc = 0.0;
    for _ in 0..n_samples {
        let x = dvector![
            rng.random_range(-reach..reach),
            rng.random_range(-reach..reach)
        ];
        let fx1 = f.evaluate(&dvector![x[0] + eps, x[1]]);
        let fx0 = f.evaluate(&dvector![x[0] - eps, x[1]]);
        let fy1 = f.evaluate(&dvector![x[0], x[1] + eps]);
        let fy0 = f.evaluate(&dvector![x[0], x[1] - eps]);
        let gx = (fx1 - fx0) / (2.0 * eps);
        let gy = (fy1 - fy0) / (2.0 * eps);
        acc += (gx * gx + gy * gy).sqrt();
    }
    let mc = acc / n_samples as f64 * (2.0 * reach) * (2.0 * reach);
    // 3σ of the MC estimator, measured from the sample itself, is ~1%
    assert!(
        (mc - g.value).abs() < 0.05 * g.value,
        "mc {mc} vs {}",
        g.value
    );
}

#[test]
fn gradient_form_consistent_with_level_set_form() {
    // Monte Carlo check of ‖x‖ = ∫|⟨∇f(y), x⟩|dy on the gauge-power family
    let f = square_gauge();
    let x = dvector![0.6, 0.8];
    let level_form = pp_norm(&f, &x).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let reach = 14.0;
    let n_samples = 400_000usize;
    let eps = 1e-5;
    let mut acc = 0.0;
    for _ in 0..n_samples {
        let y = dvector![
            rng.random_range(-reach..reach),
            rng.random_range(-reach..reach)
        ];
        let fx1 = f.evaluate(&dvector![y[0] + eps, y[1]]);
        let fx0 = f.evaluate(&dvector![y[0] - eps, y[1]]);
        let fy1 = f.evaluate(&dvector![y[0], y[1] + eps]);
        let fy0 = f.evaluate(&dvector![y[0], y[1] - eps]);
        let gx = (fx1 - fx0) / (2.0 * eps);
        let gy = (fy1 - fy0) / (2.0 * eps);
        acc += (gx * x[0] + gy * x[1]).abs();
    }
    let mc = acc / n_samples as f64 * (2.0 * reach) * (2.0 * reach);
    assert!(
        (mc - level_form).abs() < 0.05 * level_form,
        "mc {mc} vs level form {level_form}"
    );
}

#[test]
fn sobolev_inequality_holds_on_smooth_families() {
    let fs = vec![
        square_gauge(),
        LogConcaveFn::gauge_power(2.0, regular_polygon(16), 2.0, Vector::zeros(2)).unwrap(),
        LogConcaveFn::truncated_gauge(1.0, cube(2), 0.5).unwrap(),
        pwl_sample(),
    ];
    for f in fs {
        let slack = sobolev_slack(&f).unwrap();
        assert!(slack >= -1e-9, "sobolev violated: slack {slack}");
    }
}

#[test]
fn petty_report_disc_indicator_reaches_equality() {
    let f = LogConcaveFn::indicator(1.0, regular_polygon(64)).unwrap();
    let report = petty_report(&f).unwrap();
    assert!((report.lhs - 1.0).abs() < 0.01, "lhs {}", report.lhs);
    assert!(report.rhs_lower <= report.lhs + report.mc_error);
}

#[test]
fn petty_report_indicator_recovers_reverse_volume_ratio() {
    // rhs_lower = 1/v.rat(K) for characteristic functions
    let triangle = polygon_from_vertices(&[
        dvector![2.0, 0.0],
        dvector![-1.0, 3f64.sqrt()],
        dvector![-1.0, -3f64.sqrt()],
    ])
    .unwrap();
    for body in [cube(2), triangle] {
        let f = LogConcaveFn::indicator(1.0, body.clone()).unwrap();
        let report = petty_report(&f).unwrap();
        let vrat = john::integral_ratio(&f).unwrap();
        assert!(
            (report.rhs_lower - 1.0 / vrat).abs() < 1e-6,
            "rhs {} vs 1/vrat {}",
            report.rhs_lower,
            1.0 / vrat
        );
        assert!(report.rhs_lower <= report.lhs + report.mc_error + 1e-3);
        assert!(report.lhs <= 1.0 + report.mc_error + 1e-3);
    }
}

#[test]
fn petty_sandwich_on_gauge_and_pwl() {
    for f in [square_gauge(), pwl_sample()] {
        let report = petty_report(&f).unwrap();
        let tol = report.mc_error.max(1e-3);
        assert!(
            report.rhs_lower <= report.lhs + tol,
            "lower bound fails: {} vs {}",
            report.rhs_lower,
            report.lhs
        );
        assert!(report.lhs <= 1.0 + tol, "upper bound fails: {}", report.lhs);
    }
}

#[test]
fn entropy_bound_after_mass_normalization() {
    for f in [
        square_gauge(),
        LogConcaveFn::indicator(1.0, cube(2)).unwrap(),
        LogConcaveFn::truncated_gauge(2.0, cube(2), 0.5).unwrap(),
        pwl_sample(),
    ] {
        let report = petty_report(&f).unwrap();
        assert!(
            report.entropy_power <= report.entropy_bound + 1e-3,
            "H {} > bound {}",
            report.entropy_power,
            report.entropy_bound
        );
    }
}

#[test]
fn petty_sandwich_in_three_dimensions() {
    let f = LogConcaveFn::indicator(1.0, cube(3)).unwrap();
    let report = petty_report(&f).unwrap();
    let tol = report.mc_error.max(1e-3);
    assert!(report.lhs <= 1.0 + tol, "lhs {}", report.lhs);
    // rhs_lower = 1/v.rat(B∞³) for the indicator
    let vrat = (8.0 / (4.0 * std::f64::consts::PI / 3.0)).powf(1.0 / 3.0);
    assert!(
        (report.rhs_lower - 1.0 / vrat).abs() < 1e-4,
        "rhs {} vs {}",
        report.rhs_lower,
        1.0 / vrat
    );
    assert!(report.rhs_lower <= report.lhs + tol);
}

#[test]
fn thread_cap_does_not_change_results() {
    let f = pwl_sample();
    std::env::set_var("ELLIRAT_THREADS", "1");
    let (a, _) = pp_volume(&f, 0, 0).unwrap();
    std::env::set_var("ELLIRAT_THREADS", "4");
    let (b, _) = pp_volume(&f, 0, 0).unwrap();
    std::env::remove_var("ELLIRAT_THREADS");
    assert_eq!(a, b, "thread count changed the result");
}

#[test]
fn errors_for_unsupported_inputs() {
    let f = LogConcaveFn::indicator(1.0, cube(1)).unwrap();
    assert!(matches!(
        pp_volume(&f, 0, 0),
        Err(crate::Error::DimensionUnsupported { dim: 1 })
    ));
    let g = LogConcaveFn::indicator(1.0, cube(2)).unwrap();
    assert!(matches!(
        pp_norm(&g, &Vector::zeros(2)),
        Err(crate::Error::ZeroDirection)
    ));
}
