//! Low-level convex-hull helpers: orthonormal complements, 2-D hulls,
//! brute-force facet enumeration and recursive fan-triangulation volumes.
//!
//! Everything here is exact up to floating point; no sampling. Dimensions
//! are capped at 6 by the callers, so the brute-force subset scans stay
//! cheap.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;

/// Orthonormal basis of `direction⊥`, returned as an n×(n−1) matrix.
pub fn orthonormal_complement(direction: &Vector) -> DMatrix<f64> {
    let n = direction.len();
    let d = direction.normalize();
    let mut cols: Vec<Vector> = vec![d];
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        for c in &cols {
            let p = c.dot(&e);
            e.axpy(-p, c, 1.0);
        }
        let norm = e.norm();
        if norm > 1e-8 {
            cols.push(e / norm);
        }
    }
    debug_assert_eq!(cols.len(), n);
    let mut basis = DMatrix::zeros(n, n - 1);
    for (k, c) in cols.iter().skip(1).enumerate() {
        basis.set_column(k, c);
    }
    basis
}

fn geometry_scale(points: &[Vector]) -> f64 {
    1.0 + points.iter().map(|p| p.norm()).fold(0.0, f64::max)
}

/// Remove near-coincident points (tolerance relative to the point scale).
pub fn dedup_points(points: &[Vector], rel_tol: f64) -> Vec<Vector> {
    let tol = rel_tol * geometry_scale(points);
    let mut out: Vec<Vector> = Vec::new();
    for p in points {
        if !out.iter().any(|q| (p - q).norm() <= tol) {
            out.push(p.clone());
        }
    }
    out
}

/// Convex hull of 2-D points by Andrew's monotone chain, counter-clockwise,
/// without repeating the first point.
pub fn convex_hull_2d(points: &[Vector]) -> Vec<Vector> {
    let mut pts = dedup_points(points, 1e-12);
    if pts.len() <= 2 {
        return pts;
    }
    pts.sort_by(|a, b| (a[0], a[1]).partial_cmp(&(b[0], b[1])).unwrap());
    let cross = |o: &Vector, a: &Vector, b: &Vector| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let tol = 1e-12 * geometry_scale(&pts).powi(2);
    let mut lower: Vec<Vector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= tol
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= tol
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Area of a counter-clockwise 2-D polygon (shoelace).
pub fn polygon_area(hull: &[Vector]) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..hull.len() {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc.abs()
}

/// One facet of a point hull: outward unit normal, offset, member indices.
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
    pub members: Vec<usize>,
}

fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-force facet enumeration of `conv(points)` in dimension `dim`:
/// every `dim`-subset spanning a hyperplane is tested for one-sidedness.
pub fn facets_bruteforce(points: &[Vector], dim: usize) -> Vec<Facet> {
    let scale = geometry_scale(points);
    let on_tol = 1e-9 * scale;
    let mut facets: Vec<Facet> = Vec::new();
    if points.len() < dim {
        return facets;
    }
    for_each_combination(points.len(), dim, &mut |combo| {
        let base = &points[combo[0]];
        let mut rows = DMatrix::zeros(dim - 1, dim);
        let mut row_scale = 1.0;
        for (r, &i) in combo[1..].iter().enumerate() {
            let d = &points[i] - base;
            row_scale *= d.norm().max(1e-30);
            rows.row_mut(r).copy_from(&d.transpose());
        }
        // generalized cross product: the subset is affinely independent iff
        // the cofactor normal is well separated from zero
        let normal = hyperplane_normal(&rows);
        let len = normal.norm();
        if len <= 1e-9 * row_scale {
            return;
        }
        let normal = normal / len;
        let offset = normal.dot(base);
        // orient outward and reject interior planes
        let mut above = 0usize;
        let mut below = 0usize;
        for p in points {
            let s = normal.dot(p) - offset;
            if s > on_tol {
                above += 1;
            } else if s < -on_tol {
                below += 1;
            }
        }
        let (normal, offset) = if above == 0 {
            (normal, offset)
        } else if below == 0 {
            (-normal, -offset)
        } else {
            return;
        };
        // dedupe coincident planes
        for f in facets.iter() {
            if (f.normal.dot(&normal) - 1.0).abs() < 1e-7
                && (f.offset - offset).abs() < on_tol * 10.0
            {
                return;
            }
        }
        let members: Vec<usize> = points
            .iter()
            .enumerate()
            .filter(|(_, p)| (normal.dot(p) - offset).abs() <= on_tol)
            .map(|(i, _)| i)
            .collect();
        facets.push(Facet {
            normal,
            offset,
            members,
        });
    });
    facets
}

/// Vector orthogonal to the `d-1` rows of `rows` (d columns), computed from
/// the cofactor expansion; zero when the rows are linearly dependent.
fn hyperplane_normal(rows: &DMatrix<f64>) -> Vector {
    let d = rows.ncols();
    let mut normal = Vector::zeros(d);
    for i in 0..d {
        let mut minor = DMatrix::zeros(d - 1, d - 1);
        let mut c = 0;
        for j in 0..d {
            if j == i {
                continue;
            }
            minor.set_column(c, &rows.column(j));
            c += 1;
        }
        let det = minor.determinant();
        normal[i] = if i % 2 == 0 { det } else { -det };
    }
    normal
}

/// Volume of `conv(points)` in dimension `dim` by recursive fan
/// triangulation from the vertex centroid.
pub fn hull_volume(points: &[Vector], dim: usize) -> f64 {
    let pts = dedup_points(points, 1e-12);
    if dim == 0 {
        return if pts.is_empty() { 0.0 } else { 1.0 };
    }
    if pts.len() < dim + 1 {
        return 0.0;
    }
    match dim {
        1 => {
            let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            (hi - lo).max(0.0)
        }
        2 => polygon_area(&convex_hull_2d(&pts)),
        _ => {
            let centroid: Vector = pts.iter().sum::<Vector>() / pts.len() as f64;
            let mut vol = 0.0;
            for facet in facets_bruteforce(&pts, dim) {
                if facet.members.len() < dim {
                    continue;
                }
                let area = facet_measure(&pts, &facet, dim);
                let dist = (facet.offset - facet.normal.dot(&centroid)).abs();
                vol += area * dist / dim as f64;
            }
            vol
        }
    }
}

/// (dim−1)-dimensional measure of a facet, computed in in-plane coordinates.
pub fn facet_measure(points: &[Vector], facet: &Facet, dim: usize) -> f64 {
    let basis = orthonormal_complement(&facet.normal);
    let base = &points[facet.members[0]];
    let projected: Vec<Vector> = facet
        .members
        .iter()
        .map(|&i| basis.transpose() * (&points[i] - base))
        .collect();
    hull_volume(&projected, dim - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn cube_vertices(n: usize) -> Vec<Vector> {
        (0..1usize << n)
            .map(|mask| {
                Vector::from_iterator(
                    n,
                    (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }),
                )
            })
            .collect()
    }

    #[test]
    fn cube_volumes_up_to_5d() {
        for n in 1..=5 {
            let v = hull_volume(&cube_vertices(n), n);
            assert!((v - 2f64.powi(n as i32)).abs() < 1e-9, "n={n} got {v}");
        }
    }

    #[test]
    fn simplex_volume_is_inverse_factorial() {
        for n in 2..=5 {
            let mut pts = vec![Vector::zeros(n)];
            for i in 0..n {
                let mut e = Vector::zeros(n);
                e[i] = 1.0;
                pts.push(e);
            }
            let expect = 1.0 / (1..=n).product::<usize>() as f64;
            let v = hull_volume(&pts, n);
            assert!((v - expect).abs() < 1e-12, "n={n} got {v}");
        }
    }

    #[test]
    fn interior_points_do_not_change_area() {
        let mut pts = cube_vertices(2);
        pts.push(dvector![0.3, -0.2]);
        pts.push(dvector![0.0, 0.0]);
        assert!((hull_volume(&pts, 2) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        let d = dvector![1.0, -2.0, 0.5, 3.0];
        let b = orthonormal_complement(&d);
        let gram = b.transpose() * &b;
        assert!((gram - DMatrix::identity(3, 3)).norm() < 1e-12);
        let proj = b.transpose() * d.normalize();
        assert!(proj.norm() < 1e-12);
    }

    #[test]
    fn octahedron_facets() {
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [-1.0, 1.0] {
                let mut e = Vector::zeros(3);
                e[i] = s;
                pts.push(e);
            }
        }
        let facets = facets_bruteforce(&pts, 3);
        assert_eq!(facets.len(), 8);
        let v = hull_volume(&pts, 3);
        assert!((v - 4.0 / 3.0).abs() < 1e-12, "got {v}");
    }
}
