//! Canonical test bodies: cubes, boxes, simplices, tangent polygons and
//! seeded random polygons.

use rand::Rng;

use super::hull::convex_hull_2d;
use super::polytope::{HPolytope, Vector};
use crate::error::Result;

/// The cube `[-1, 1]ⁿ`.
pub fn cube(n: usize) -> HPolytope {
    boxed(&vec![1.0; n])
}

/// Axis-aligned box `Π [-w_i, w_i]`.
pub fn boxed(half_widths: &[f64]) -> HPolytope {
    let n = half_widths.len();
    let mut rows = Vec::with_capacity(2 * n);
    for (i, &w) in half_widths.iter().enumerate() {
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        rows.push((e.clone(), w));
        rows.push((-e, w));
    }
    HPolytope::from_rows(n, rows).expect("box construction")
}

/// The standard simplex `{x ≥ 0, Σ x ≤ 1}`.
pub fn standard_simplex(n: usize) -> HPolytope {
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut e = Vector::zeros(n);
        e[i] = -1.0;
        rows.push((e, 0.0));
    }
    rows.push((Vector::from_element(n, 1.0), 1.0));
    HPolytope::from_rows(n, rows).expect("simplex construction")
}

/// Regular simplex centered at the origin with circumradius one. The facet
/// opposite vertex `u_i` is `⟨-u_i, x⟩ ≤ 1/n`, so the centered inradius is
/// `1/n` and the John ellipsoid is the ball of that radius.
pub fn regular_simplex(n: usize) -> HPolytope {
    let verts = regular_simplex_vertices(n);
    let rows = verts
        .iter()
        .map(|u| (-u.clone(), 1.0 / n as f64))
        .collect::<Vec<_>>();
    HPolytope::from_rows(n, rows).expect("regular simplex construction")
}

/// Unit vertices of the origin-centered regular simplex in `Rⁿ`.
pub fn regular_simplex_vertices(n: usize) -> Vec<Vector> {
    // embed the n+1 coordinate vertices of R^{n+1}, center them, and express
    // them in an orthonormal basis of the hyperplane Σx = const
    let m = n + 1;
    let centered: Vec<Vector> = (0..m)
        .map(|i| {
            let mut v = Vector::from_element(m, -1.0 / m as f64);
            v[i] += 1.0;
            v
        })
        .collect();
    // Gram-Schmidt a basis of 1⊥
    let mut basis: Vec<Vector> = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = Vector::zeros(m);
        e[i] = 1.0;
        let ones = Vector::from_element(m, 1.0 / (m as f64).sqrt());
        let p = ones.dot(&e);
        e.axpy(-p, &ones, 1.0);
        for b in &basis {
            let p = b.dot(&e);
            e.axpy(-p, b, 1.0);
        }
        basis.push(e.normalize());
    }
    centered
        .iter()
        .map(|v| {
            let coords = Vector::from_iterator(n, basis.iter().map(|b| b.dot(v)));
            coords.normalize()
        })
        .collect()
}

/// Regular m-gon tangent to the unit circle (facet lines touch it), so its
/// maximum inscribed disc is exactly the unit disc.
pub fn regular_polygon(m: usize) -> HPolytope {
    let rows = (0..m)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            (Vector::from_vec(vec![th.cos(), th.sin()]), 1.0)
        })
        .collect::<Vec<_>>();
    HPolytope::from_rows(2, rows).expect("polygon construction")
}

/// 2-D polytope from a vertex list (convex position not required).
pub fn polygon_from_vertices(points: &[Vector]) -> Result<HPolytope> {
    let hull = convex_hull_2d(points);
    let mut rows = Vec::with_capacity(hull.len());
    for i in 0..hull.len() {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        // outward normal of the CCW edge a->b
        let normal = Vector::from_vec(vec![b[1] - a[1], a[0] - b[0]]);
        let offset = normal.dot(a);
        rows.push((normal, offset));
    }
    HPolytope::from_rows(2, rows)
}

/// Random polygon with `m` facet directions and offsets in `[r_min, r_max]`,
/// guaranteed bounded with the origin strictly inside.
pub fn random_polygon<R: Rng>(rng: &mut R, m: usize, r_min: f64, r_max: f64) -> HPolytope {
    assert!(m >= 3 && r_min > 0.0 && r_max >= r_min);
    let mut angles: Vec<f64> = (0..m)
        .map(|k| {
            let base = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            base + rng.random_range(-0.3..0.3) * 2.0 * std::f64::consts::PI / m as f64
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let rows = angles
        .into_iter()
        .map(|th| {
            (
                Vector::from_vec(vec![th.cos(), th.sin()]),
                rng.random_range(r_min..r_max),
            )
        })
        .collect::<Vec<_>>();
    HPolytope::from_rows(2, rows).expect("random polygon construction")
}
