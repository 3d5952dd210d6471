use nalgebra::{dmatrix, dvector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bodies::*;
use super::*;

fn triangle() -> HPolytope {
    // equilateral, circumradius 2, inradius 1, centered at the origin
    polygon_from_vertices(&[
        dvector![2.0, 0.0],
        dvector![-1.0, 3f64.sqrt()],
        dvector![-1.0, -3f64.sqrt()],
    ])
    .unwrap()
}

/// Independent gauge oracle: bisection on λ with a point-in-polytope test.
fn gauge_by_bisection(k: &HPolytope, x: &Vector) -> f64 {
    let inside = |lam: f64| -> bool {
        if lam <= 0.0 {
            return x.norm() == 0.0;
        }
        k.scale(lam).contains(x, 1e-14)
    };
    let mut hi = 1.0;
    while !inside(hi) {
        hi *= 2.0;
        assert!(hi < 1e9);
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn gauge_cube_and_origin() {
    let k = cube(2);
    assert!((k.gauge_norm(&dvector![0.5, 0.0]).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(k.gauge_norm(&dvector![0.0, 0.0]).unwrap(), 0.0);
}

#[test]
fn gauge_triangle_matches_bisection_oracle() {
    let k = triangle();
    let x = dvector![1.0, 0.0];
    let oracle = gauge_by_bisection(&k, &x);
    assert!((oracle - 0.5).abs() < 1e-10, "oracle {oracle}");
    assert!((k.gauge_norm(&x).unwrap() - 0.5).abs() < 1e-12);
    // a second, asymmetric probe
    let y = dvector![-0.7, 0.9];
    let oracle = gauge_by_bisection(&k, &y);
    assert!((k.gauge_norm(&y).unwrap() - oracle).abs() < 1e-9);
}

#[test]
fn gauge_requires_interior_origin() {
    let k = HPolytope::from_rows(
        2,
        vec![(dvector![1.0, 0.0], -0.5), (dvector![-1.0, 0.0], 2.0)],
    )
    .unwrap();
    assert!(matches!(
        k.gauge_norm(&dvector![1.0, 0.0]),
        Err(crate::Error::OriginNotInterior { .. })
    ));
}

#[test]
fn vertices_of_cube_and_simplex() {
    let verts = cube(2).enumerate_vertices().unwrap();
    assert_eq!(verts.vertices().len(), 4);
    for v in verts.vertices() {
        assert!((v[0].abs() - 1.0).abs() < 1e-9 && (v[1].abs() - 1.0).abs() < 1e-9);
    }
    let verts = standard_simplex(3).enumerate_vertices().unwrap();
    assert_eq!(verts.vertices().len(), 4);
}

#[test]
fn vertices_match_pairwise_intersection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let k = random_polygon(&mut rng, 8, 0.6, 1.6);
        // O(m²) oracle: intersect every row pair, keep feasible points
        let rows = k.rows();
        let mut oracle: Vec<Vector> = Vec::new();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let a = dmatrix![
                    rows[i].normal[0], rows[i].normal[1];
                    rows[j].normal[0], rows[j].normal[1]
                ];
                let b = dvector![rows[i].offset, rows[j].offset];
                if let Some(p) = a.lu().solve(&b) {
                    if p.amax() < 1e6
                        && k.contains(&p, 1e-9)
                        && !oracle.iter().any(|q| (q - &p).norm() < 1e-7)
                    {
                        oracle.push(p);
                    }
                }
            }
        }
        let got = k.enumerate_vertices().unwrap();
        assert_eq!(got.vertices().len(), oracle.len());
        for v in got.vertices() {
            assert!(oracle.iter().any(|q| (q - v).norm() < 1e-7));
        }
    }
}

#[test]
fn every_vertex_supported_by_enough_facets() {
    let k = regular_polygon(16);
    for (v, active) in k.vertices_with_active().unwrap() {
        assert!(active.len() >= 2);
        for &i in &active {
            let r = &k.rows()[i];
            assert!((r.normal.dot(&v) - r.offset).abs() < 1e-8);
        }
    }
}

#[test]
fn unbounded_polytope_is_rejected() {
    let k = HPolytope::from_rows(
        2,
        vec![(dvector![1.0, 0.0], 1.0), (dvector![0.0, 1.0], 1.0)],
    )
    .unwrap();
    assert!(matches!(
        k.enumerate_vertices(),
        Err(crate::Error::Unbounded)
    ));
}

#[test]
fn volume_cube_and_simplex() {
    assert!((cube(3).volume().unwrap() - 8.0).abs() < 1e-9);
    for n in 1..=5 {
        let expect = 1.0 / (1..=n).product::<usize>() as f64;
        let v = standard_simplex(n).volume().unwrap();
        assert!((v - expect).abs() < 1e-9 * expect.max(1.0), "n={n} v={v}");
    }
}

#[test]
fn volume_matches_monte_carlo_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let k = random_polygon(&mut rng, 9, 0.5, 1.5);
    let exact = k.volume().unwrap();
    // rejection sampling oracle
    let (lo, hi) = k.bounding_box().unwrap();
    let box_vol = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    let n_samples = 1_000_000usize;
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let p = dvector![
            rng.random_range(lo[0]..hi[0]),
            rng.random_range(lo[1]..hi[1])
        ];
        if k.contains(&p, 0.0) {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / n_samples as f64;
    let mc = box_vol * p_hat;
    let sigma = box_vol * (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt();
    assert!(
        (exact - mc).abs() <= 3.0 * sigma,
        "exact {exact} vs mc {mc} ± {sigma}"
    );
}

#[test]
fn volume_invariant_under_row_permutation_and_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let k = random_polygon(&mut rng, 7, 0.5, 1.4);
    let base = k.volume().unwrap();

    let mut rows: Vec<(Vector, f64)> = k
        .rows()
        .iter()
        .map(|r| (r.normal.clone(), r.offset))
        .collect();
    rows.reverse();
    rows.swap(0, 3);
    let permuted = HPolytope::from_rows(2, rows).unwrap();
    assert!((permuted.volume().unwrap() - base).abs() < 1e-9 * base);

    let th: f64 = 0.83;
    let rot = dmatrix![th.cos(), -th.sin(); th.sin(), th.cos()];
    let rotated = k.affine_image(&rot, &dvector![0.0, 0.0]).unwrap();
    assert!((rotated.volume().unwrap() - base).abs() < 1e-9 * base);
}

#[test]
fn volume_scales_with_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let k = random_polygon(&mut rng, 8, 0.5, 1.5);
    let base = k.volume().unwrap();
    for _ in 0..5 {
        let t = dmatrix![
            rng.random_range(0.5..2.0), rng.random_range(-0.6..0.6);
            rng.random_range(-0.6..0.6), rng.random_range(0.5..2.0)
        ];
        let det: f64 = t.determinant();
        if det.abs() < 0.2 {
            continue;
        }
        let mapped = k
            .affine_image(&t, &dvector![rng.random_range(-1.0..1.0), 0.3])
            .unwrap();
        let got = mapped.volume().unwrap();
        assert!(
            (got - det.abs() * base).abs() <= 1e-9 * (det.abs() * base),
            "det {det} got {got} expect {}",
            det.abs() * base
        );
    }
}

#[test]
fn projection_of_cube_is_square() {
    let p = cube(3).enumerate_vertices().unwrap();
    let shadow = p.project(&dvector![0.0, 0.0, 1.0]).unwrap();
    assert_eq!(shadow.dim(), 2);
    assert!((shadow.volume().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn projection_of_disc_has_width_two() {
    let p = regular_polygon(64).enumerate_vertices().unwrap();
    for th in [0.0f64, 0.4, 1.1, 2.9] {
        let shadow = p.project(&dvector![th.cos(), th.sin()]).unwrap();
        let len = shadow.volume().unwrap();
        // tangent 64-gon: width between 2 and 2/cos(π/64)
        assert!(len >= 2.0 - 1e-9 && len <= 2.0 / (std::f64::consts::PI / 64.0).cos() + 1e-9);
    }
}

#[test]
fn projection_of_simplex_matches_monte_carlo_shadow() {
    let p = standard_simplex(3).enumerate_vertices().unwrap();
    let shadow = p.project(&dvector![1.0, 0.0, 0.0]).unwrap();
    let area = shadow.volume().unwrap();
    // shadow of {x≥0, Σx≤1} along e₁ is the triangle {y,z ≥ 0, y+z ≤ 1}
    assert!((area - 0.5).abs() < 1e-9);
    // MC oracle in the projected plane
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n_samples = 200_000usize;
    let mut hits = 0usize;
    let k = standard_simplex(3);
    for _ in 0..n_samples {
        let y = rng.random_range(-0.1..1.1);
        let z = rng.random_range(-0.1..1.1);
        // point is in the shadow iff some x makes (x,y,z) feasible
        let feasible = y >= 0.0 && z >= 0.0 && y + z <= 1.0 && {
            let probe = dvector![0.0, y, z];
            k.contains(&probe, 1e-12)
        };
        if feasible {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / n_samples as f64;
    let mc = 1.2 * 1.2 * p_hat;
    let sigma = 1.2 * 1.2 * (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt();
    assert!((area - mc).abs() <= 3.0 * sigma);
}

#[test]
fn zero_direction_is_rejected() {
    let p = cube(2).enumerate_vertices().unwrap();
    assert!(matches!(
        p.project(&dvector![0.0, 0.0]),
        Err(crate::Error::ZeroDirection)
    ));
}

#[test]
fn cauchy_sanity_opposite_directions() {
    let p = regular_polygon(10).enumerate_vertices().unwrap();
    for th in [0.3f64, 1.7] {
        let d = dvector![th.cos(), th.sin()];
        let a = p.project(&d).unwrap().volume().unwrap();
        let b = p.project(&(-d)).unwrap().volume().unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn chebyshev_cube_triangle_and_slab() {
    for n in 1..=4 {
        let (c, r) = cube(n).chebyshev_center().unwrap();
        assert!(c.norm() < 1e-9 && (r - 1.0).abs() < 1e-9);
    }
    // oracle: distance from the incenter (origin, by symmetry) to each edge
    let t = triangle();
    let oracle = t
        .rows()
        .iter()
        .map(|r| r.offset)
        .fold(f64::INFINITY, f64::min);
    assert!((oracle - 1.0).abs() < 1e-12);
    let (c, r) = t.chebyshev_center().unwrap();
    assert!(c.norm() < 1e-9 && (r - 1.0).abs() < 1e-9);

    let (c, r) = boxed(&[1.0, 0.1]).chebyshev_center().unwrap();
    assert!(c[1].abs() < 1e-9 && (r - 0.1).abs() < 1e-9);
}

#[test]
fn chebyshev_ball_is_contained() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let k = random_polygon(&mut rng, 7, 0.4, 1.7);
        let (c, r) = k.chebyshev_center().unwrap();
        let ball = Ellipsoid::ball(c, r).unwrap();
        assert!(ball.contained_in(&k, 1e-9));
    }
}

#[test]
fn ellipsoid_containment_cases() {
    let k = cube(2);
    assert!(Ellipsoid::unit_ball(2).contained_in(&k, 1e-12));
    let big = Ellipsoid::ball(Vector::zeros(2), 1.01).unwrap();
    assert!(!big.contained_in(&k, 1e-9));
    let t = triangle();
    let shifted = Ellipsoid::ball(dvector![0.5, 0.0], 1.0).unwrap();
    assert!(!shifted.contained_in(&t, 1e-9));
}

#[test]
fn ellipsoid_affine_image_volume() {
    let e = Ellipsoid::unit_ball(2);
    let m = dmatrix![2.0, 0.3; 0.0, 0.5];
    let img = e.affine_image(&m, &dvector![1.0, -2.0]).unwrap();
    assert!((img.volume() - m.determinant().abs() * e.volume()).abs() < 1e-10);
    let (inv, off) = img.map_to_unit_ball().unwrap();
    let back = img.affine_image(&inv, &off).unwrap();
    assert!(back.center().norm() < 1e-9);
    assert!((back.shape() - Matrix::identity(2, 2)).norm() < 1e-9);
}

#[test]
fn degenerate_levels_have_zero_volume() {
    let k = cube(2).scale(0.0);
    assert!(k.is_degenerate());
    assert_eq!(k.volume().unwrap(), 0.0);
    assert!(matches!(
        k.enumerate_vertices(),
        Err(crate::Error::EmptyInterior)
    ));
}

#[test]
fn degenerate_apex_vertex_is_handled() {
    // square pyramid: four slant facets meet at the apex (more than n = 3)
    let rows = vec![
        (dvector![0.0, 0.0, -1.0], 0.0),
        (dvector![1.0, 0.0, 1.0], 1.0),
        (dvector![-1.0, 0.0, 1.0], 1.0),
        (dvector![0.0, 1.0, 1.0], 1.0),
        (dvector![0.0, -1.0, 1.0], 1.0),
    ];
    let k = HPolytope::from_rows(3, rows).unwrap();
    let verts = k.vertices_with_active().unwrap();
    assert_eq!(verts.len(), 5);
    let apex = verts
        .iter()
        .find(|(v, _)| (v - dvector![0.0, 0.0, 1.0]).norm() < 1e-8)
        .expect("apex missing");
    assert_eq!(apex.1.len(), 4, "apex must carry all four slant facets");
    // volume: ∫₀¹ 4(1-z)² dz = 4/3
    assert!((k.volume().unwrap() - 4.0 / 3.0).abs() < 1e-9);
}

#[test]
fn redundant_rows_do_not_disturb_geometry() {
    let mut rows: Vec<(Vector, f64)> = cube(2)
        .rows()
        .iter()
        .map(|r| (r.normal.clone(), r.offset))
        .collect();
    // redundant cuts far outside and a diagonal tangent through a vertex
    rows.push((dvector![1.0, 0.0], 5.0));
    rows.push((dvector![1.0, 1.0], 2.0 / 2f64.sqrt() * 2f64.sqrt()));
    let k = HPolytope::from_rows(2, rows).unwrap();
    let verts = k.enumerate_vertices().unwrap();
    assert_eq!(verts.vertices().len(), 4);
    assert!((k.volume().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn needle_box_volume_and_chebyshev() {
    let k = boxed(&[1.0, 1e-3]);
    assert!((k.volume().unwrap() - 4e-3).abs() < 1e-12);
    let (c, r) = k.chebyshev_center().unwrap();
    assert!(c.norm() < 1e-9 && (r - 1e-3).abs() < 1e-12);
}

#[test]
fn volume_dimension_cap() {
    let k = cube(7);
    assert!(matches!(
        k.volume(),
        Err(crate::Error::DimensionTooLarge { dim: 7, max: 6 })
    ));
    let p = VPolytope::from_extreme_unchecked(7, vec![Vector::zeros(7)]);
    assert!(matches!(
        p.volume(),
        Err(crate::Error::DimensionTooLarge { .. })
    ));
}

#[test]
fn surface_area_of_cube_and_interval() {
    assert!((cube(2).surface_area().unwrap() - 8.0).abs() < 1e-9);
    assert!((cube(3).surface_area().unwrap() - 24.0).abs() < 1e-9);
    assert!((cube(1).surface_area().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn regular_simplex_geometry() {
    for n in 2..=4 {
        let k = regular_simplex(n);
        let r = k.centered_inradius().unwrap();
        assert!((r - 1.0 / n as f64).abs() < 1e-12);
        let verts = k.enumerate_vertices().unwrap();
        assert_eq!(verts.vertices().len(), n + 1);
        for v in verts.vertices() {
            assert!(
                (v.norm() - 1.0).abs() < 1e-8,
                "circumradius off: {}",
                v.norm()
            );
        }
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gauge_positive_homogeneity(
            x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, lam in 0.0f64..5.0
        ) {
            let k = triangle();
            let x = dvector![x0, x1];
            let g1 = k.gauge_norm(&(&x * lam)).unwrap();
            let g0 = k.gauge_norm(&x).unwrap();
            prop_assert!((g1 - lam * g0).abs() <= 1e-12 * (1.0 + g1.abs()));
        }

        #[test]
        fn shadow_volume_agrees_with_project(theta in 0.0f64..std::f64::consts::TAU) {
            let p = regular_polygon(12).enumerate_vertices().unwrap();
            let d = dvector![theta.cos(), theta.sin()];
            let a = p.project(&d).unwrap().volume().unwrap();
            let b = p.shadow_volume(&d).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
